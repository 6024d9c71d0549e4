//! Scoring: original-vs-altered discrimination and token outcome metrics.
//!
//! Every aligned `(original, observed, corrected)` triple falls into one of
//! five classes:
//!
//! | triple    | class |
//! |-----------|-------|
//! | (x, x, x) | TN    |
//! | (x, x, y) | FP    |
//! | (x, y, x) | TP    |
//! | (x, y, y) | FN    |
//! | (x, y, z) | MC    |
//!
//! Correction precision and recall are `TP/(TP+FP)` and `TP/(TP+FN+MC)`.
//! Detection counts a miscorrection as a hit, since the error was flagged:
//! precision `(TP+MC)/(TP+MC+FP)`, recall `(TP+MC)/(TP+MC+FN)`. Accuracy is
//! `(TN+TP)` over all positions. Any 0/0 ratio is 0.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corruptor::{apply_records, CorruptionRecord};
use crate::lm::TrigramModel;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    TrueNegative,
    FalsePositive,
    TruePositive,
    FalseNegative,
    Miscorrection,
}

pub fn classify_outcome(original: &str, observed: &str, corrected: &str) -> Outcome {
    match (original == observed, observed == corrected, original == corrected) {
        (true, true, _) => Outcome::TrueNegative,
        (true, false, _) => Outcome::FalsePositive,
        (false, _, true) => Outcome::TruePositive,
        (false, true, _) => Outcome::FalseNegative,
        (false, false, false) => Outcome::Miscorrection,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub tn: u64,
    pub fp: u64,
    pub tp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub mc: u64,
}

impl OutcomeCounts {
    pub fn add(&mut self, o: Outcome) {
        match o {
            Outcome::TrueNegative => self.tn += 1,
            Outcome::FalsePositive => self.fp += 1,
            Outcome::TruePositive => self.tp += 1,
            Outcome::FalseNegative => self.fn_ += 1,
            Outcome::Miscorrection => self.mc += 1,
        }
    }

    pub fn merge(self, o: OutcomeCounts) -> OutcomeCounts {
        OutcomeCounts {
            tn: self.tn + o.tn,
            fp: self.fp + o.fp,
            tp: self.tp + o.tp,
            fn_: self.fn_ + o.fn_,
            mc: self.mc + o.mc,
        }
    }

    pub fn total(&self) -> u64 {
        self.tn + self.fp + self.tp + self.fn_ + self.mc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    fn new(precision: f64, recall: f64) -> Self {
        Prf { precision, recall, f1: ratio(2.0 * precision * recall, precision + recall) }
    }
}

/// Settings a report was produced under.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub beta: f64,
    pub t: Option<usize>,
    pub rate: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub detection: Prf,
    pub correction: Prf,
    pub accuracy: f64,
    pub counts: OutcomeCounts,
    pub params: Option<RunParams>,
}

impl EvalReport {
    pub fn with_params(mut self, params: RunParams) -> Self {
        self.params = Some(params);
        self
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

pub fn compute_metrics(c: &OutcomeCounts) -> EvalReport {
    let [tn, fp, tp, fn_, mc] = [c.tn, c.fp, c.tp, c.fn_, c.mc].map(|x| x as f64);
    let hit = tp + mc;
    EvalReport {
        detection: Prf::new(ratio(hit, hit + fp), ratio(hit, hit + fn_)),
        correction: Prf::new(ratio(tp, tp + fp), ratio(tp, tp + fn_ + mc)),
        accuracy: ratio(tn + tp, c.total() as f64),
        counts: *c,
        params: None,
    }
}

/// Classify every position of three aligned corpora.
pub fn count_outcomes(
    original: &[Vec<String>],
    observed: &[Vec<String>],
    corrected: &[Vec<String>],
) -> Result<OutcomeCounts> {
    if original.len() != observed.len() || original.len() != corrected.len() {
        let sentence_id = original.len().min(observed.len()).min(corrected.len());
        return Err(Error::Alignment {
            sentence_id,
            message: format!(
                "corpus lengths differ: {} original, {} observed, {} corrected",
                original.len(),
                observed.len(),
                corrected.len()
            ),
        });
    }
    let mut counts = OutcomeCounts::default();
    for (sentence_id, ((o, b), c)) in original.iter().zip(observed).zip(corrected).enumerate() {
        if o.len() != b.len() || o.len() != c.len() {
            return Err(Error::Alignment {
                sentence_id,
                message: format!(
                    "token counts differ: {} original, {} observed, {} corrected",
                    o.len(),
                    b.len(),
                    c.len()
                ),
            });
        }
        for ((x, y), z) in o.iter().zip(b).zip(c) {
            counts.add(classify_outcome(x, y, z));
        }
    }
    Ok(counts)
}

/// Score a corrected corpus against the original text and the gold records
/// that produced the observed text.
pub fn evaluate_run(
    original: &[Vec<String>],
    records: &[CorruptionRecord],
    corrected: &[Vec<String>],
) -> Result<EvalReport> {
    let observed = apply_records(original, records)?;
    Ok(compute_metrics(&count_outcomes(original, &observed, corrected)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BotdChoice {
    Original,
    Altered,
    Tie,
}

pub fn botd_discriminate<S: AsRef<str>>(m: &TrigramModel, original: &[S], altered: &[S]) -> BotdChoice {
    let (a, b) = (m.logprob_sentence(original), m.logprob_sentence(altered));
    if a > b {
        BotdChoice::Original
    } else if b > a {
        BotdChoice::Altered
    } else {
        BotdChoice::Tie
    }
}

/// One `(original, altered)` pair per sentence that received at least one
/// error; the altered side carries all of that sentence's errors.
pub fn botd_pairs<'a>(
    original: &'a [Vec<String>],
    corrupted: &'a [Vec<String>],
    records: &[CorruptionRecord],
) -> Vec<(&'a [String], &'a [String])> {
    let mut ids: Vec<usize> = records.iter().map(|r| r.sentence_id).collect();
    ids.sort_unstable();
    ids.dedup();
    ids.into_iter()
        .filter(|&i| i < original.len() && i < corrupted.len() && original[i] != corrupted[i])
        .map(|i| (original[i].as_slice(), corrupted[i].as_slice()))
        .collect()
}

/// Share of pairs where the model prefers the original. Ties are misses.
pub fn botd_accuracy<S: AsRef<str> + Sync>(m: &TrigramModel, pairs: &[(&[S], &[S])]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::NoPairs);
    }
    let wins = pairs.par_iter().filter(|(o, a)| botd_discriminate(m, o, a) == BotdChoice::Original).count();
    Ok(wins as f64 / pairs.len() as f64)
}

/// Fixed-width table, one row per report.
pub fn format_table(reports: &[EvalReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>6} {:>8} {:>6} | {:>6} {:>6} {:>6} | {:>6} {:>6} {:>6} | {:>6}",
        "t", "beta", "rate", "det P", "det R", "det F", "cor P", "cor R", "cor F", "acc"
    );
    for r in reports {
        let (t, beta, rate) = match r.params {
            Some(p) => (
                p.t.map_or("inf".to_owned(), |t| t.to_string()),
                format!("{}", p.beta),
                p.rate.map_or("-".to_owned(), |x| format!("1/{x}")),
            ),
            None => ("-".into(), "-".into(), "-".into()),
        };
        let _ = writeln!(
            out,
            "{t:>6} {beta:>8} {rate:>6} | {:>6.3} {:>6.3} {:>6.3} | {:>6.3} {:>6.3} {:>6.3} | {:>6.3}",
            r.detection.precision,
            r.detection.recall,
            r.detection.f1,
            r.correction.precision,
            r.correction.recall,
            r.correction.f1,
            r.accuracy
        );
    }
    out
}
