//! Seeded synthetic real-word error corpora.
//!
//! Every token is considered for replacement with probability `1/r`. A
//! considered token is replaced only if it is a real word with at least one
//! variation, and then by a uniformly chosen variation.
//!
//! Random stream: ChaCha20 seeded with [`SeedableRng::seed_from_u64`], read
//! as 64-bit words. Each token consumes exactly one word `u` for the
//! consideration test `floor(u * r / 2^64) == 0`. A replacement consumes one
//! more word `u` and picks index `floor(u * n / 2^64)` from the `n`
//! variations in sorted order. Considered tokens that are not eligible take
//! no second draw. Any implementation of the same generator and discipline
//! reproduces the same corpus.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::confusion::ConfusionIndex;
use crate::{Corpus, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorruptionConfig {
    /// `r`: each token is considered with chance `1/r`.
    pub rate_denominator: u64,
    pub seed: u64,
}

impl CorruptionConfig {
    pub fn new(rate_denominator: u64, seed: u64) -> Result<Self> {
        let cfg = CorruptionConfig { rate_denominator, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rate_denominator == 0 {
            return Err(Error::InvalidParameter("rate denominator must be at least 1".into()));
        }
        Ok(())
    }
}

/// One planted error.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CorruptionRecord {
    pub sentence_id: usize,
    pub position: usize,
    pub original: String,
    pub error: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub sentences_total: usize,
    pub sentences_with_errors: usize,
    pub sentences_with_multiple_errors: usize,
}

/// `floor(u * n / 2^64)`: maps a uniform 64-bit word onto `0..n`.
#[inline]
fn scale(u: u64, n: u64) -> u64 {
    ((u128::from(u) * u128::from(n)) >> 64) as u64
}

/// Corrupt a tokenized corpus. Eligibility is membership in the index's
/// real-word set, which is the real-word vocabulary it was built from.
pub fn corrupt_corpus(
    sentences: &[Vec<String>],
    index: &ConfusionIndex,
    cfg: &CorruptionConfig,
) -> Result<(Corpus, Vec<CorruptionRecord>)> {
    cfg.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let mut records = Vec::new();
    let mut out = Vec::with_capacity(sentences.len());
    for (sentence_id, sentence) in sentences.iter().enumerate() {
        let mut corrupted = sentence.clone();
        for (position, token) in corrupted.iter_mut().enumerate() {
            if scale(rng.next_u64(), cfg.rate_denominator) != 0 {
                continue;
            }
            let Some(id) = index.id(token) else { continue };
            let vars = index.neighborhood_ids(id);
            if vars.is_empty() {
                continue;
            }
            let pick = vars[scale(rng.next_u64(), vars.len() as u64) as usize];
            let error = index.word(pick).to_owned();
            records.push(CorruptionRecord {
                sentence_id,
                position,
                original: std::mem::replace(token, error.clone()),
                error,
            });
        }
        out.push(corrupted);
    }
    Ok((out, records))
}

/// Tally sentences carrying one or more planted errors.
pub fn multi_error_census(records: &[CorruptionRecord], sentences_total: usize) -> Census {
    let mut per_sentence: BTreeMap<usize, usize> = BTreeMap::new();
    for r in records {
        *per_sentence.entry(r.sentence_id).or_default() += 1;
    }
    Census {
        sentences_total,
        sentences_with_errors: per_sentence.len(),
        sentences_with_multiple_errors: per_sentence.values().filter(|&&n| n > 1).count(),
    }
}

/// `sentence_id<TAB>position<TAB>original<TAB>error` lines.
pub fn records_to_tsv(records: &[CorruptionRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let _ = writeln!(out, "{}\t{}\t{}\t{}", r.sentence_id, r.position, r.original, r.error);
    }
    out
}

pub fn records_from_tsv(text: &str) -> Result<Vec<CorruptionRecord>> {
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [sid, pos, original, error] = fields[..] else {
            return Err(Error::parse(i + 1, format!("expected 4 fields, found {}", fields.len())));
        };
        let num = |s: &str| s.parse::<usize>().map_err(|_| Error::parse(i + 1, format!("bad index {s:?}")));
        records.push(CorruptionRecord {
            sentence_id: num(sid)?,
            position: num(pos)?,
            original: original.to_owned(),
            error: error.to_owned(),
        });
    }
    Ok(records)
}

/// Rebuild the observed corpus from the original text and its records,
/// checking that every record lines up.
pub fn apply_records(original: &[Vec<String>], records: &[CorruptionRecord]) -> Result<Corpus> {
    let mut out = original.to_vec();
    for r in records {
        let sentence = out.get_mut(r.sentence_id).ok_or_else(|| Error::Alignment {
            sentence_id: r.sentence_id,
            message: "record beyond end of corpus".into(),
        })?;
        let token = sentence.get_mut(r.position).ok_or_else(|| Error::Alignment {
            sentence_id: r.sentence_id,
            message: format!("record position {} beyond sentence length", r.position),
        })?;
        if *token != r.original {
            return Err(Error::Alignment {
                sentence_id: r.sentence_id,
                message: format!("position {} holds {:?}, record says {:?}", r.position, token, r.original),
            });
        }
        *token = r.error.clone();
    }
    Ok(out)
}
