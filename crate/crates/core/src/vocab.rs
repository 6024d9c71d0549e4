//! Base and real-word vocabularies.
//!
//! The base vocabulary is every token seen at least twice in training. The
//! real-word vocabulary keeps the base tokens that contain a letter and no
//! symbol other than apostrophes and periods; only those can host (or be)
//! a real-word error.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::{is_reserved, Error, Result};

/// Minimum count for base-vocabulary membership.
pub const BASE_MIN_COUNT: u64 = 2;

#[derive(Debug, Clone, Default)]
pub struct Vocabulary {
    counts: HashMap<String, u64>,
    base: HashSet<String>,
    realword: HashSet<String>,
    total_tokens: u64,
    hapax_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VocabStats {
    pub type_count: usize,
    pub hapax_count: usize,
    pub hapax_pct: f64,
    pub token_count: u64,
}

/// True when `token` contains at least one letter and every other character
/// is an apostrophe or a period.
pub fn is_realword(token: &str) -> bool {
    !is_reserved(token)
        && token.chars().any(char::is_alphabetic)
        && token.chars().all(|c| c.is_alphabetic() || matches!(c, '\'' | '\u{2019}' | '.'))
}

/// Order-independent 64-bit FNV-1a fingerprint of a word set.
pub fn fingerprint<'a>(words: impl IntoIterator<Item = &'a str>) -> u64 {
    let sorted: BTreeSet<&str> = words.into_iter().collect();
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for w in sorted {
        for b in w.bytes().chain(std::iter::once(b'\n')) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

impl Vocabulary {
    /// Count a token stream. Reserved symbols are skipped.
    pub fn build<'a, I>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut counts: HashMap<String, u64> = HashMap::new();
        for t in tokens {
            if is_reserved(t) {
                continue;
            }
            match counts.get_mut(t) {
                Some(c) => *c += 1,
                None => {
                    counts.insert(t.to_owned(), 1);
                }
            }
        }
        Self::from_counts(counts)
    }

    /// Count every token of a tokenized corpus.
    pub fn from_corpus(corpus: &[Vec<String>]) -> Result<Self> {
        Self::build(corpus.iter().flatten().map(String::as_str))
    }

    pub fn from_counts(mut counts: HashMap<String, u64>) -> Result<Self> {
        counts.retain(|t, c| *c > 0 && !is_reserved(t));
        if counts.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let base: HashSet<String> =
            counts.iter().filter(|&(_, &c)| c >= BASE_MIN_COUNT).map(|(t, _)| t.clone()).collect();
        let realword = derive_realword(&base);
        let total_tokens = counts.values().sum();
        let hapax_count = counts.values().filter(|&&c| c == 1).count();
        Ok(Vocabulary { counts, base, realword, total_tokens, hapax_count })
    }

    /// Sum the counts of two vocabularies.
    pub fn merge(&self, other: &Vocabulary) -> Result<Self> {
        let mut counts = self.counts.clone();
        for (t, c) in &other.counts {
            *counts.entry(t.clone()).or_default() += c;
        }
        Self::from_counts(counts)
    }

    pub fn count(&self, token: &str) -> u64 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &HashMap<String, u64> {
        &self.counts
    }

    pub fn base(&self) -> &HashSet<String> {
        &self.base
    }

    pub fn realword(&self) -> &HashSet<String> {
        &self.realword
    }

    pub fn in_base(&self, token: &str) -> bool {
        self.base.contains(token)
    }

    pub fn is_realword(&self, token: &str) -> bool {
        self.realword.contains(token)
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn hapax_count(&self) -> usize {
        self.hapax_count
    }

    /// Tokens seen exactly once, sorted.
    pub fn hapaxes(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.counts.iter().filter(|&(_, &c)| c == 1).map(|(t, _)| t.as_str()).collect();
        v.sort_unstable();
        v
    }

    /// Fingerprint of the real-word set; shared by models and indexes built
    /// from this vocabulary.
    pub fn realword_fingerprint(&self) -> u64 {
        fingerprint(self.realword.iter().map(String::as_str))
    }

    pub fn stats(&self) -> VocabStats {
        let type_count = self.counts.len();
        let hapax_pct = if type_count == 0 { 0.0 } else { self.hapax_count as f64 / type_count as f64 };
        VocabStats { type_count, hapax_count: self.hapax_count, hapax_pct, token_count: self.total_tokens }
    }

    /// `token<TAB>count` lines sorted by token.
    pub fn to_tsv(&self) -> String {
        let mut entries: Vec<(&String, &u64)> = self.counts.iter().collect();
        entries.sort_unstable_by(|a, b| a.0.cmp(b.0));
        let mut out = String::new();
        for (t, c) in entries {
            let _ = writeln!(out, "{t}\t{c}");
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut counts = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (token, count) =
                line.split_once('\t').ok_or_else(|| Error::parse(i + 1, "expected token<TAB>count"))?;
            if token.is_empty() || token.chars().any(char::is_whitespace) {
                return Err(Error::parse(i + 1, "token is empty or contains whitespace"));
            }
            let count: u64 = count.trim().parse().map_err(|_| Error::parse(i + 1, format!("bad count {count:?}")))?;
            if counts.insert(token.to_owned(), count).is_some() {
                return Err(Error::parse(i + 1, format!("duplicate token {token:?}")));
            }
        }
        Self::from_counts(counts)
    }
}

/// Real-word subset of a base set.
pub fn derive_realword<S: AsRef<str>>(base: impl IntoIterator<Item = S>) -> HashSet<String> {
    base.into_iter().filter(|t| is_realword(t.as_ref())).map(|t| t.as_ref().to_owned()).collect()
}
