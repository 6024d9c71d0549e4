//! Damerau-Levenshtein distance and distance-1 confusion sets.
//!
//! The confusion set of a word is every real-word vocabulary entry at
//! distance exactly 1. Sets are generally neither symmetric across the
//! vocabulary nor transitive: `as` is a variation of both `a` and `ask`,
//! but `a` is not a variation of `ask`.
//!
//! [`ConfusionIndex`] precomputes the sets with a deletion-signature index.
//! Every word is filed under itself and each of its single-character
//! deletions; two words at distance 1 always share a key (substitution and
//! transposition meet at a common deletion, insertion and deletion meet at
//! the shorter word itself), so a lookup only needs an exact distance check
//! on the few words that share a key with the query.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::vocab::{fingerprint, Vocabulary};
use crate::{Error, Result};

/// Optimal-string-alignment distance over Unicode scalar values: insertions,
/// deletions, substitutions and adjacent transpositions, each costing 1, with
/// no substring edited twice.
pub fn dl_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    osa(&a, &b)
}

fn osa(a: &[char], b: &[char]) -> usize {
    let (n, m) = (a.len(), b.len());
    if n == 0 {
        return m;
    }
    if m == 0 {
        return n;
    }
    // three rolling rows: i-2, i-1, i
    let mut prev2 = vec![0usize; m + 1];
    let mut prev: Vec<usize> = (0..=m).collect();
    let mut cur = vec![0usize; m + 1];
    for i in 1..=n {
        cur[0] = i;
        for j in 1..=m {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let mut d = (prev[j] + 1).min(cur[j - 1] + 1).min(prev[j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                d = d.min(prev2[j - 2] + 1);
            }
            cur[j] = d;
        }
        std::mem::swap(&mut prev2, &mut prev);
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

/// Cheap exact test for distance 1 (no full table).
pub fn is_distance_one(a: &str, b: &str) -> bool {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (short, long) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
    match long.len() - short.len() {
        0 => {
            let diffs: Vec<usize> = (0..short.len()).filter(|&i| short[i] != long[i]).collect();
            match diffs.as_slice() {
                [_] => true,
                [i, j] => *j == i + 1 && short[*i] == long[*j] && short[*j] == long[*i],
                _ => false,
            }
        }
        1 => {
            let p = short.iter().zip(long.iter()).take_while(|(x, y)| x == y).count();
            short[p..] == long[p + 1..]
        }
        _ => false,
    }
}

fn deletions(w: &[char]) -> impl Iterator<Item = String> + '_ {
    (0..w.len()).map(move |i| w[..i].iter().chain(&w[i + 1..]).collect())
}

/// Precomputed distance-1 neighbourhoods over a real-word vocabulary.
#[derive(Debug, Clone)]
pub struct ConfusionIndex {
    /// Real words, sorted; ids index into this.
    words: Vec<String>,
    ids: HashMap<String, u32>,
    /// Deletion signature -> word ids filed under it.
    signatures: HashMap<String, Vec<u32>>,
    /// Neighbour ids of each word, sorted by string.
    neighborhoods: Vec<Vec<u32>>,
    fingerprint: u64,
}

impl ConfusionIndex {
    pub fn build(vocab: &Vocabulary) -> Self {
        Self::from_words(vocab.realword().iter().map(String::as_str))
    }

    /// Index an explicit real-word list.
    pub fn from_words<'a>(realwords: impl IntoIterator<Item = &'a str>) -> Self {
        let set: BTreeSet<&str> = realwords.into_iter().collect();
        let words: Vec<String> = set.into_iter().map(str::to_owned).collect();
        let ids: HashMap<String, u32> = words.iter().enumerate().map(|(i, w)| (w.clone(), i as u32)).collect();
        let mut signatures: HashMap<String, Vec<u32>> = HashMap::new();
        for (id, w) in words.iter().enumerate() {
            let chars: Vec<char> = w.chars().collect();
            let mut keys: Vec<String> = deletions(&chars).collect();
            keys.push(w.clone());
            keys.sort_unstable();
            keys.dedup();
            for k in keys {
                signatures.entry(k).or_default().push(id as u32);
            }
        }
        let mut index = ConfusionIndex {
            fingerprint: fingerprint(words.iter().map(String::as_str)),
            words,
            ids,
            signatures,
            neighborhoods: Vec::new(),
        };
        index.neighborhoods = (0..index.words.len()).map(|i| index.lookup(&index.words[i])).collect();
        index
    }

    fn lookup(&self, w: &str) -> Vec<u32> {
        let chars: Vec<char> = w.chars().collect();
        let mut candidates: Vec<u32> = std::iter::once(w.to_owned())
            .chain(deletions(&chars))
            .filter_map(|k| self.signatures.get(&k))
            .flatten()
            .copied()
            .collect();
        candidates.sort_unstable();
        candidates.dedup();
        // ids are assigned in sorted word order, so this is sorted by string too
        candidates.retain(|&id| is_distance_one(w, &self.words[id as usize]));
        candidates
    }

    /// Distance-1 real words of any string, sorted.
    pub fn variations(&self, w: &str) -> Vec<&str> {
        match self.ids.get(w) {
            Some(&id) => self.neighborhood_ids(id).iter().map(|&i| self.words[i as usize].as_str()).collect(),
            None => self.lookup(w).into_iter().map(|i| self.words[i as usize].as_str()).collect(),
        }
    }

    /// Number of variations of `w`.
    pub fn variation_count(&self, w: &str) -> usize {
        match self.ids.get(w) {
            Some(&id) => self.neighborhoods[id as usize].len(),
            None => self.lookup(w).len(),
        }
    }

    pub fn contains(&self, w: &str) -> bool {
        self.ids.contains_key(w)
    }

    pub fn id(&self, w: &str) -> Option<u32> {
        self.ids.get(w).copied()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn neighborhood_ids(&self, id: u32) -> &[u32] {
        &self.neighborhoods[id as usize]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Fingerprint of the indexed real-word set.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// `word<TAB>v1,v2,...` lines, sorted by word.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (i, w) in self.words.iter().enumerate() {
            let vs: Vec<&str> = self.neighborhoods[i].iter().map(|&j| self.words[j as usize].as_str()).collect();
            let _ = writeln!(out, "{w}\t{}", vs.join(","));
        }
        out
    }

    /// Load a persisted index. The neighbourhoods are recomputed from the
    /// word column and checked against the stored lists.
    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (w, vs) = line.split_once('\t').ok_or_else(|| Error::parse(i + 1, "expected word<TAB>variations"))?;
            let vs: Vec<&str> = if vs.is_empty() { Vec::new() } else { vs.split(',').collect() };
            rows.push((i + 1, w, vs));
        }
        let index = Self::from_words(rows.iter().map(|r| r.1));
        for (line, w, vs) in rows {
            if index.variations(w) != vs {
                return Err(Error::parse(line, format!("stored variations of {w:?} disagree with the word list")));
            }
        }
        Ok(index)
    }
}
