//! Modified Kneser-Ney estimation with Katz-style backoff.
//!
//! Counts used at each order:
//!
//! - trigrams: raw counts;
//! - bigrams: the number of distinct left extensions `N1+(. v w)`, except
//!   bigrams starting with `<s>` which keep their raw count (they cannot be
//!   extended to the left);
//! - unigrams: the number of distinct left neighbours `N1+(. w)`.
//!
//! Each order gets three discounts from its count-of-counts n1..n4:
//!
//! ```text
//! Y   = n1 / (n1 + 2 n2)
//! D1  = 1 - 2Y n2/n1
//! D2  = 2 - 3Y n3/n2
//! D3+ = 3 - 4Y n4/n3
//! ```
//!
//! Stored n-grams get `(c - D(c)) / c(h)`; the freed mass of each history
//! is handed to the lower order through a backoff weight chosen so the
//! history sums to one. The unigram order spreads its freed mass uniformly
//! over every predictable word, which is what gives `<unk>` and unseen
//! vocabulary words a nonzero floor.

use std::collections::BTreeMap;

use log::warn;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::{bigram_key, trigram_key, Entry, TrigramModel, WordId, LOG_ZERO};
use crate::vocab::Vocabulary;
use crate::{BOS, EOS, UNK};

/// Single absolute discount used when the count-of-counts cannot support
/// the three-way estimate.
pub const FALLBACK_DISCOUNT: f64 = 0.5;

/// Remaining mass below which a history is treated as having nothing left
/// to back off to.
const EMPTY_COMPLEMENT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Discount {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    pub fallback: bool,
}

impl Discount {
    fn flat(d: f64) -> Self {
        Discount { d1: d, d2: d, d3: d, fallback: true }
    }

    #[inline]
    pub fn for_count(&self, c: u64) -> f64 {
        match c {
            0 => 0.0,
            1 => self.d1,
            2 => self.d2,
            _ => self.d3,
        }
    }

    /// Estimate from count-of-counts `n[k-1] = #{ngrams with count k}`.
    pub fn estimate(n: [u64; 4], order: usize) -> Self {
        let [n1, n2, n3, n4] = n.map(|x| x as f64);
        if n.contains(&0) {
            warn!("order {order}: empty count-of-counts bin {n:?}, using discount {FALLBACK_DISCOUNT}");
            return Self::flat(FALLBACK_DISCOUNT);
        }
        let y = n1 / (n1 + 2.0 * n2);
        let d = Discount {
            d1: 1.0 - 2.0 * y * n2 / n1,
            d2: 2.0 - 3.0 * y * n3 / n2,
            d3: 3.0 - 4.0 * y * n4 / n3,
            fallback: false,
        };
        if d.d1 > 0.0 && d.d2 > 0.0 && d.d3 > 0.0 {
            d
        } else {
            warn!("order {order}: non-positive discount {d:?}, using discount {FALLBACK_DISCOUNT}");
            Self::flat(FALLBACK_DISCOUNT)
        }
    }
}

fn count_of_counts<'a>(counts: impl Iterator<Item = &'a u64>) -> [u64; 4] {
    let mut n = [0u64; 4];
    for &c in counts {
        if (1..=4).contains(&c) {
            n[c as usize - 1] += 1;
        }
    }
    n
}

/// Train on a tokenized corpus. Tokens outside the base vocabulary are
/// counted as `<unk>`; every sentence is padded `<s> <s> ... </s>`.
pub fn train(corpus: &[Vec<String>], vocab: &Vocabulary) -> TrigramModel {
    let mut base: Vec<&str> = vocab.base().iter().map(String::as_str).collect();
    base.sort_unstable();
    let mut words: Vec<String> = vec![BOS.to_owned(), EOS.to_owned(), UNK.to_owned()];
    words.extend(base.iter().map(|s| (*s).to_owned()));
    let ids: FxHashMap<&str, WordId> = words.iter().enumerate().map(|(i, w)| (w.as_str(), i as WordId)).collect();
    let (bos, eos, unk): (WordId, WordId, WordId) = (0, 1, 2);
    let n_words = words.len();

    // raw trigram and bigram event counts
    let mut tri_raw: FxHashMap<u128, u64> = FxHashMap::default();
    let mut bi_raw: FxHashMap<u64, u64> = FxHashMap::default();
    let mut padded: Vec<WordId> = Vec::new();
    for sentence in corpus {
        padded.clear();
        padded.extend([bos, bos]);
        padded.extend(sentence.iter().map(|t| ids.get(t.as_str()).copied().unwrap_or(unk)));
        padded.push(eos);
        for win in padded.windows(3) {
            *tri_raw.entry(trigram_key(win[0], win[1], win[2])).or_default() += 1;
            *bi_raw.entry(bigram_key(win[1], win[2])).or_default() += 1;
        }
    }

    // bigram counts: continuation counts, raw for <s>-initial bigrams
    let mut bi_counts: FxHashMap<u64, u64> = FxHashMap::default();
    for &k in tri_raw.keys() {
        let vw = k as u64;
        if (vw >> 32) as WordId != bos {
            *bi_counts.entry(vw).or_default() += 1;
        }
    }
    for (&k, &c) in &bi_raw {
        if (k >> 32) as WordId == bos {
            bi_counts.insert(k, c);
        }
    }

    // unigram continuation counts
    let mut uni_counts = vec![0u64; n_words];
    for &k in bi_raw.keys() {
        uni_counts[(k & 0xffff_ffff) as usize] += 1;
    }

    let discounts = [
        Discount::estimate(count_of_counts(uni_counts.iter()), 1),
        Discount::estimate(count_of_counts(bi_counts.values()), 2),
        Discount::estimate(count_of_counts(tri_raw.values()), 3),
    ];

    // unigrams
    let events = n_words - 1;
    let total: u64 = uni_counts.iter().sum();
    let mut uni_prob = vec![0.0f64; n_words];
    if total > 0 {
        let total = total as f64;
        let leftover: f64 = uni_counts.iter().map(|&c| discounts[0].for_count(c)).sum::<f64>() / total;
        let floor = leftover / events as f64;
        for (w, &c) in uni_counts.iter().enumerate() {
            if w as WordId != bos {
                uni_prob[w] = (c as f64 - discounts[0].for_count(c)) / total + floor;
            }
        }
    } else {
        for (w, p) in uni_prob.iter_mut().enumerate() {
            if w as WordId != bos {
                *p = 1.0 / events as f64;
            }
        }
    }

    // bigrams, grouped by history
    let bi_groups = group(&bi_counts, |k| (k >> 32) as WordId, |k| (k & 0xffff_ffff) as WordId);
    let mut bi_prob: FxHashMap<u64, f64> = FxHashMap::default();
    let mut uni_bow = vec![1.0f64; n_words];
    for (&v, entries) in &bi_groups {
        let probs = discounted(entries, &discounts[1]);
        let lower: Vec<f64> = entries.iter().map(|&(w, _)| uni_prob[w as usize]).collect();
        let (probs, bow) = backoff(probs, &lower);
        uni_bow[v as usize] = bow;
        for (&(w, _), p) in entries.iter().zip(probs) {
            bi_prob.insert(bigram_key(v, w), p);
        }
    }
    let p_bigram = |v: WordId, w: WordId| -> f64 {
        bi_prob.get(&bigram_key(v, w)).copied().unwrap_or_else(|| uni_bow[v as usize] * uni_prob[w as usize])
    };

    // trigrams, grouped by two-word history
    let tri_groups = group(
        &tri_raw,
        |k| ((k >> 64) as WordId, ((k >> 32) & 0xffff_ffff) as WordId),
        |k| (k & 0xffff_ffff) as WordId,
    );
    let mut trigrams: FxHashMap<u128, f64> = FxHashMap::default();
    let mut bi_bow: FxHashMap<u64, f64> = FxHashMap::default();
    for (&(u, v), entries) in &tri_groups {
        let probs = discounted(entries, &discounts[2]);
        let lower: Vec<f64> = entries.iter().map(|&(w, _)| p_bigram(v, w)).collect();
        let (probs, bow) = backoff(probs, &lower);
        bi_bow.insert(bigram_key(u, v), bow);
        for (&(w, _), p) in entries.iter().zip(probs) {
            trigrams.insert(trigram_key(u, v, w), p.log10());
        }
    }

    let mut bigrams: FxHashMap<u64, Entry> = bi_prob
        .iter()
        .map(|(&k, &p)| (k, Entry { prob: p.log10(), bow: bi_bow.get(&k).map_or(0.0, |b| b.log10()) }))
        .collect();
    // (<s>, <s>) only ever appears as a history
    bigrams.insert(
        bigram_key(bos, bos),
        Entry { prob: LOG_ZERO, bow: bi_bow.get(&bigram_key(bos, bos)).map_or(0.0, |b| b.log10()) },
    );

    let unigrams: Vec<Entry> = (0..n_words)
        .map(|w| Entry {
            prob: if w as WordId == bos { LOG_ZERO } else { uni_prob[w].log10() },
            bow: uni_bow[w].log10(),
        })
        .collect();

    TrigramModel::from_parts(words, unigrams, bigrams, trigrams, Some(discounts))
}

/// Group `(key, count)` pairs by history, with each group sorted by word id.
fn group<K: Copy, H: Ord + Copy>(
    counts: &FxHashMap<K, u64>,
    history: impl Fn(K) -> H,
    word: impl Fn(K) -> WordId,
) -> BTreeMap<H, Vec<(WordId, u64)>> {
    let mut groups: BTreeMap<H, Vec<(WordId, u64)>> = BTreeMap::new();
    for (&k, &c) in counts {
        groups.entry(history(k)).or_default().push((word(k), c));
    }
    for entries in groups.values_mut() {
        entries.sort_unstable();
    }
    groups
}

fn discounted(entries: &[(WordId, u64)], d: &Discount) -> Vec<f64> {
    let total: u64 = entries.iter().map(|&(_, c)| c).sum();
    let total = total as f64;
    entries.iter().map(|&(_, c)| (c as f64 - d.for_count(c)) / total).collect()
}

/// Turn the discounted probabilities of one history into final probabilities
/// and a backoff weight (linear, not log). `lower` holds the lower-order
/// probability of each stored word.
fn backoff(mut probs: Vec<f64>, lower: &[f64]) -> (Vec<f64>, f64) {
    let stored: f64 = probs.iter().sum();
    let leftover = (1.0 - stored).max(0.0);
    let complement = 1.0 - lower.iter().sum::<f64>();
    if complement > EMPTY_COMPLEMENT {
        (probs, leftover / complement)
    } else {
        // every event is stored under this history: renormalize instead
        for p in &mut probs {
            *p /= stored;
        }
        (probs, 1.0)
    }
}
