//! Backoff trigram language model.
//!
//! Probabilities are stored as log10 values, ARPA style. A query for an
//! unstored trigram backs off through the history's backoff weight to the
//! bigram estimate, and from there to the unigram estimate:
//!
//! ```text
//! log P(w | u v) = tri(u v w)                           if stored
//!                = bow(u v) + log P(w | v)              otherwise
//! log P(w | v)   = bi(v w)                              if stored
//!                = bow(v) + uni(w)                      otherwise
//! ```
//!
//! Tokens outside the training vocabulary are scored as `<unk>`.

mod arpa;
mod train;

pub use arpa::{export_arpa, import_arpa};
pub use train::{train, Discount};

use rustc_hash::FxHashMap;

use crate::vocab::{fingerprint, is_realword};
use crate::{is_reserved, BOS, EOS, UNK};

/// log10 value used for structural zeros (`<s>` is never predicted).
pub const LOG_ZERO: f64 = -99.0;

pub type WordId = u32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Entry {
    pub prob: f64,
    pub bow: f64,
}

#[inline]
pub(crate) fn bigram_key(v: WordId, w: WordId) -> u64 {
    (u64::from(v) << 32) | u64::from(w)
}

#[inline]
pub(crate) fn trigram_key(u: WordId, v: WordId, w: WordId) -> u128 {
    (u128::from(u) << 64) | u128::from(bigram_key(v, w))
}

/// A trained or imported trigram model. Immutable once built; share it by
/// reference across scoring threads.
#[derive(Debug, Clone)]
pub struct TrigramModel {
    words: Vec<String>,
    ids: FxHashMap<String, WordId>,
    bos: WordId,
    eos: WordId,
    unk: WordId,
    unigrams: Vec<Entry>,
    bigrams: FxHashMap<u64, Entry>,
    trigrams: FxHashMap<u128, f64>,
    discounts: Option<[Discount; 3]>,
}

impl TrigramModel {
    pub(crate) fn from_parts(
        words: Vec<String>,
        unigrams: Vec<Entry>,
        bigrams: FxHashMap<u64, Entry>,
        trigrams: FxHashMap<u128, f64>,
        discounts: Option<[Discount; 3]>,
    ) -> Self {
        let ids: FxHashMap<String, WordId> = words.iter().enumerate().map(|(i, w)| (w.clone(), i as WordId)).collect();
        let id = |s: &str| ids[s];
        let (bos, eos, unk) = (id(BOS), id(EOS), id(UNK));
        TrigramModel { words, ids, bos, eos, unk, unigrams, bigrams, trigrams, discounts }
    }

    pub const fn order(&self) -> usize {
        3
    }

    /// Model id of a token; anything unknown (or reserved `<s>`) maps to `<unk>`
    /// unless it is literally one of the reserved symbols.
    pub fn id(&self, token: &str) -> WordId {
        self.ids.get(token).copied().unwrap_or(self.unk)
    }

    /// Whether the token has its own unigram (reserved symbols included).
    pub fn contains(&self, token: &str) -> bool {
        self.ids.contains_key(token)
    }

    pub fn word(&self, id: WordId) -> &str {
        &self.words[id as usize]
    }

    pub fn bos(&self) -> WordId {
        self.bos
    }

    pub fn eos(&self) -> WordId {
        self.eos
    }

    pub fn unk(&self) -> WordId {
        self.unk
    }

    /// Number of unigram entries including the reserved symbols.
    pub fn vocab_size(&self) -> usize {
        self.words.len()
    }

    /// Vocabulary words (reserved symbols excluded).
    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str).filter(|w| !is_reserved(w))
    }

    /// Every id that can be predicted: the vocabulary plus `</s>` and `<unk>`.
    pub fn events(&self) -> impl Iterator<Item = WordId> + '_ {
        (0..self.words.len() as WordId).filter(move |&i| i != self.bos)
    }

    /// Fingerprint of the real-word subset of this model's vocabulary.
    pub fn realword_fingerprint(&self) -> u64 {
        fingerprint(self.vocabulary().filter(|w| is_realword(w)))
    }

    /// Discounts estimated at training time, unigram order first. `None` for
    /// imported models.
    pub fn discounts(&self) -> Option<&[Discount; 3]> {
        self.discounts.as_ref()
    }

    /// Counts of stored n-grams per order.
    pub fn ngram_counts(&self) -> [usize; 3] {
        [self.unigrams.len(), self.bigrams.len(), self.trigrams.len()]
    }

    #[inline]
    pub fn unigram_logprob(&self, w: WordId) -> f64 {
        self.unigrams[w as usize].prob
    }

    #[inline]
    pub fn bigram_logprob(&self, v: WordId, w: WordId) -> f64 {
        match self.bigrams.get(&bigram_key(v, w)) {
            Some(e) => e.prob,
            None => self.unigrams[v as usize].bow + self.unigrams[w as usize].prob,
        }
    }

    /// log10 P(w | u v) over model ids.
    #[inline]
    pub fn logprob_ids(&self, u: WordId, v: WordId, w: WordId) -> f64 {
        if let Some(&p) = self.trigrams.get(&trigram_key(u, v, w)) {
            return p;
        }
        let bow = self.bigrams.get(&bigram_key(u, v)).map_or(0.0, |e| e.bow);
        bow + self.bigram_logprob(v, w)
    }

    /// log10 P(w | h.0 h.1).
    pub fn logprob_word(&self, history: (&str, &str), w: &str) -> f64 {
        self.logprob_ids(self.id(history.0), self.id(history.1), self.id(w))
    }

    /// Map a sentence to model ids (out-of-vocabulary tokens become `<unk>`).
    pub fn sentence_ids<S: AsRef<str>>(&self, sentence: &[S]) -> Vec<WordId> {
        sentence.iter().map(|t| self.id(t.as_ref())).collect()
    }

    /// log10 probability of a whole sentence, padded with two `<s>` and
    /// closed by `</s>`.
    pub fn logprob_sentence<S: AsRef<str>>(&self, sentence: &[S]) -> f64 {
        self.logprob_sentence_ids(&self.sentence_ids(sentence))
    }

    pub fn logprob_sentence_ids(&self, ids: &[WordId]) -> f64 {
        let (mut u, mut v) = (self.bos, self.bos);
        let mut total = 0.0;
        for &w in ids.iter().chain(std::iter::once(&self.eos)) {
            total += self.logprob_ids(u, v, w);
            u = v;
            v = w;
        }
        total
    }

    /// Σ_w P(w | u v) over every predictable event. Equals 1 for a
    /// well-formed model.
    pub fn history_mass(&self, u: WordId, v: WordId) -> f64 {
        self.events().map(|w| 10f64.powf(self.logprob_ids(u, v, w))).sum()
    }

    /// Ids of the bigram histories (v, w) that have at least one stored trigram.
    pub fn trigram_histories(&self) -> Vec<(WordId, WordId)> {
        let mut out: Vec<(WordId, WordId)> =
            self.trigrams.keys().map(|&k| ((k >> 64) as WordId, ((k >> 32) & 0xffff_ffff) as WordId)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub(crate) fn words(&self) -> &[String] {
        &self.words
    }

    pub(crate) fn unigram_entries(&self) -> &[Entry] {
        &self.unigrams
    }

    pub(crate) fn bigram_entries(&self) -> &FxHashMap<u64, Entry> {
        &self.bigrams
    }

    pub(crate) fn trigram_entries(&self) -> &FxHashMap<u128, f64> {
        &self.trigrams
    }
}
