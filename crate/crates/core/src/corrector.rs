//! Noisy-channel trigram decoder.
//!
//! The intended sentence is a hidden sequence. Each observed token was typed
//! correctly with probability `beta`; otherwise it is one of the intended
//! word's variations, each equally likely. The prior over intended
//! sentences is the trigram model, so a lattice state is a pair
//! `(previous word, word)` and a transition from `(a, b)` to `(b, c)` costs
//! `P(c | a, b) * P(observed | c)`.
//!
//! Each position keeps only the `t` best states by full path score. Ties,
//! in pruning and in choosing a backpointer, go to the lexicographically
//! smallest `(word, prev_word)`. The final `P(</s> | a, b)` term is added at
//! the last position before pruning, so the sentence ending takes part in
//! selecting the survivors there.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::confusion::ConfusionIndex;
use crate::lm::{TrigramModel, WordId};
use crate::{Corpus, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Probability that an observed word is the intended word.
    pub beta: f64,
}

impl ChannelParams {
    pub fn new(beta: f64) -> Result<Self> {
        let p = ChannelParams { beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta > 0.0 && self.beta <= 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("beta must lie in (0, 1], got {}", self.beta)))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoderConfig {
    /// States kept per position. `usize::MAX` disables pruning.
    pub t: usize,
}

impl DecoderConfig {
    pub fn new(t: usize) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidParameter("beam width must be at least 1".into()));
        }
        Ok(DecoderConfig { t })
    }

    pub const fn unbounded() -> Self {
        DecoderConfig { t: usize::MAX }
    }

    pub fn is_unbounded(&self) -> bool {
        self.t == usize::MAX
    }
}

/// A proposed replacement of an observed token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Change {
    pub sentence_id: usize,
    pub position: usize,
    pub observed: String,
    pub proposed: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Correction {
    pub sentence: Vec<String>,
    /// log10 of the prior times the channel probability of `sentence`.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusCorrection {
    pub corrected: Corpus,
    pub scores: Vec<f64>,
    pub changes: Vec<Change>,
}

/// Words that might have been intended when `w` was observed: `w` itself and,
/// for real words, each of its variations. Everything else (punctuation,
/// digit classes, unknown words) is taken as typed.
pub fn candidate_intended<'a>(w: &'a str, index: &'a ConfusionIndex) -> Vec<&'a str> {
    let mut out = vec![w];
    if index.contains(w) {
        out.extend(index.variations(w));
    }
    out.sort_unstable();
    out
}

/// log10 P(observed | intended). Returns negative infinity when `observed`
/// cannot be produced from `intended`.
pub fn emission_logprob(intended: &str, observed: &str, index: &ConfusionIndex, cp: &ChannelParams) -> f64 {
    if intended == observed {
        return cp.beta.log10();
    }
    match index.id(intended) {
        Some(id) => {
            let vars = index.neighborhood_ids(id);
            if vars.iter().any(|&v| index.word(v) == observed) {
                ((1.0 - cp.beta) / vars.len() as f64).log10()
            } else {
                f64::NEG_INFINITY
            }
        }
        None => f64::NEG_INFINITY,
    }
}

struct Cand<'a> {
    word: &'a str,
    id: WordId,
    emit: f64,
}

#[derive(Clone, Copy)]
struct State {
    /// Candidate index at the previous position (unused at position 0).
    prev: u32,
    cur: u32,
    score: f64,
    /// Index of the predecessor in the previous position's surviving states.
    back: u32,
}

fn candidates<'a>(observed: &'a str, m: &TrigramModel, index: &'a ConfusionIndex, cp: &ChannelParams) -> Vec<Cand<'a>> {
    let log_beta = cp.beta.log10();
    let mut out = vec![Cand { word: observed, id: m.id(observed), emit: log_beta }];
    if let Some(oid) = index.id(observed) {
        // observed is a variation of each of its variations, at the rate set
        // by the variation's own confusion-set size
        for &v in index.neighborhood_ids(oid) {
            let n = index.neighborhood_ids(v).len();
            let emit = ((1.0 - cp.beta) / n as f64).log10();
            if emit.is_finite() {
                let word = index.word(v);
                out.push(Cand { word, id: m.id(word), emit });
            }
        }
    }
    out.retain(|c| c.emit.is_finite());
    out.sort_unstable_by(|a, b| a.word.cmp(b.word));
    out
}

/// Most probable intended sentence for an observed one.
pub fn viterbi_correct<S: AsRef<str>>(
    s: &[S],
    m: &TrigramModel,
    index: &ConfusionIndex,
    cp: &ChannelParams,
    dc: &DecoderConfig,
) -> Result<Correction> {
    if s.is_empty() {
        return Err(Error::EmptySentence);
    }
    cp.validate()?;
    if dc.t == 0 {
        return Err(Error::InvalidParameter("beam width must be at least 1".into()));
    }
    let cands: Vec<Vec<Cand>> = s.iter().map(|w| candidates(w.as_ref(), m, index, cp)).collect();
    let n = s.len();
    let (bos, eos) = (m.bos(), m.eos());

    let mut lattice: Vec<Vec<State>> = Vec::with_capacity(n);
    for i in 0..n {
        let here = &cands[i];
        let last = i + 1 == n;
        let mut states: Vec<State> = if i == 0 {
            here.iter()
                .enumerate()
                .map(|(c, cand)| {
                    let mut score = m.logprob_ids(bos, bos, cand.id) + cand.emit;
                    if last {
                        score += m.logprob_ids(bos, cand.id, eos);
                    }
                    State { prev: 0, cur: c as u32, score, back: 0 }
                })
                .collect()
        } else {
            let before = &cands[i - 1];
            let width = here.len();
            // dense table over (candidate at i-1, candidate at i)
            let mut best: Vec<Option<State>> = vec![None; before.len() * width];
            for (pi, p) in lattice[i - 1].iter().enumerate() {
                let a = if i == 1 { bos } else { cands[i - 2][p.prev as usize].id };
                let b = before[p.cur as usize].id;
                for (c, cand) in here.iter().enumerate() {
                    let mut score = p.score + m.logprob_ids(a, b, cand.id) + cand.emit;
                    if last {
                        score += m.logprob_ids(b, cand.id, eos);
                    }
                    let slot = &mut best[p.cur as usize * width + c];
                    let better = match slot {
                        None => true,
                        Some(old) => {
                            score > old.score
                                || (score == old.score && i >= 2 && p.prev < lattice[i - 1][old.back as usize].prev)
                        }
                    };
                    if better {
                        *slot = Some(State { prev: p.cur, cur: c as u32, score, back: pi as u32 });
                    }
                }
            }
            best.into_iter().flatten().collect()
        };
        if states.is_empty() {
            // cannot happen while the observed word is always a candidate
            return Err(Error::InvalidParameter("no finite path through the lattice".into()));
        }
        // candidate lists are sorted, so index order is string order
        states.sort_unstable_by(|x, y| y.score.total_cmp(&x.score).then(x.cur.cmp(&y.cur)).then(x.prev.cmp(&y.prev)));
        states.truncate(dc.t);
        lattice.push(states);
    }

    let mut sentence = vec![String::new(); n];
    let score = lattice[n - 1][0].score;
    let mut k = 0usize;
    for i in (0..n).rev() {
        let st = lattice[i][k];
        sentence[i] = cands[i][st.cur as usize].word.to_owned();
        k = st.back as usize;
    }
    Ok(Correction { sentence, score })
}

/// Decode every sentence (in parallel; results keep input order) and list
/// the tokens that changed.
pub fn correct_corpus(
    sentences: &[Vec<String>],
    m: &TrigramModel,
    index: &ConfusionIndex,
    cp: &ChannelParams,
    dc: &DecoderConfig,
) -> Result<CorpusCorrection> {
    let (model_fp, index_fp) = (m.realword_fingerprint(), index.fingerprint());
    if model_fp != index_fp {
        return Err(Error::VocabularyMismatch { model: model_fp, index: index_fp });
    }
    let results: Vec<Correction> =
        sentences.par_iter().map(|s| viterbi_correct(s, m, index, cp, dc)).collect::<Result<_>>()?;
    let mut out =
        CorpusCorrection { corrected: Vec::with_capacity(results.len()), scores: Vec::new(), changes: Vec::new() };
    for (sentence_id, (observed, r)) in sentences.iter().zip(results).enumerate() {
        for (position, (o, p)) in observed.iter().zip(&r.sentence).enumerate() {
            if o != p {
                out.changes.push(Change { sentence_id, position, observed: o.clone(), proposed: p.clone() });
            }
        }
        out.scores.push(r.score);
        out.corrected.push(r.sentence);
    }
    Ok(out)
}

/// `sentence_id<TAB>position<TAB>observed<TAB>proposed` lines.
pub fn changes_to_tsv(changes: &[Change]) -> String {
    let mut out = String::new();
    for c in changes {
        let _ = writeln!(out, "{}\t{}\t{}\t{}", c.sentence_id, c.position, c.observed, c.proposed);
    }
    out
}
