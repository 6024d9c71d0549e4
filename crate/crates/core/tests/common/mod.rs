//! Test-side reference implementations, written independently of the
//! library's id-keyed tables.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Read;
use std::path::PathBuf;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use realword::confusion::{dl_distance, ConfusionIndex};
use realword::corrector::{candidate_intended, emission_logprob, ChannelParams};
use realword::lm::{train, TrigramModel};
use realword::textprep::{prepare_document, split_documents, AbbrevLexicon};
use realword::vocab::Vocabulary;
use realword::Corpus;

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";

// ---------------------------------------------------------------- KN oracle

fn discounts(counts: impl Iterator<Item = u64>) -> [f64; 3] {
    let mut n = [0f64; 5];
    for c in counts {
        if (1..=4).contains(&c) {
            n[c as usize] += 1.0;
        }
    }
    if n[1] == 0.0 || n[2] == 0.0 || n[3] == 0.0 || n[4] == 0.0 {
        return [0.5; 3];
    }
    let y = n[1] / (n[1] + 2.0 * n[2]);
    let d = [1.0 - 2.0 * y * n[2] / n[1], 2.0 - 3.0 * y * n[3] / n[2], 3.0 - 4.0 * y * n[4] / n[3]];
    if d.iter().all(|&x| x > 0.0) {
        d
    } else {
        [0.5; 3]
    }
}

fn disc(d: &[f64; 3], c: u64) -> f64 {
    match c {
        0 => 0.0,
        1 => d[0],
        2 => d[1],
        _ => d[2],
    }
}

/// Straightforward string-keyed modified Kneser-Ney backoff trigram model.
pub struct KnOracle {
    pub events: Vec<String>,
    uni: HashMap<String, f64>,
    /// history -> (word -> discounted prob), plus backoff weight
    bi: HashMap<String, (HashMap<String, f64>, f64)>,
    tri: HashMap<(String, String), (HashMap<String, f64>, f64)>,
    known: BTreeSet<String>,
}

fn finish(mut probs: HashMap<String, f64>, lower: impl Fn(&str) -> f64) -> (HashMap<String, f64>, f64) {
    let stored: f64 = probs.values().sum();
    let lower_sum: f64 = probs.keys().map(|w| lower(w)).sum();
    if 1.0 - lower_sum > 1e-12 {
        let bow = (1.0 - stored).max(0.0) / (1.0 - lower_sum);
        (probs, bow)
    } else {
        for p in probs.values_mut() {
            *p /= stored;
        }
        (probs, 1.0)
    }
}

impl KnOracle {
    pub fn train(corpus: &[Vec<String>]) -> Self {
        let mut freq: HashMap<&str, u64> = HashMap::new();
        for t in corpus.iter().flatten() {
            *freq.entry(t.as_str()).or_default() += 1;
        }
        let known: BTreeSet<String> = freq.iter().filter(|&(_, &c)| c >= 2).map(|(w, _)| (*w).to_owned()).collect();
        let map = |t: &str| if known.contains(t) { t.to_owned() } else { UNK.to_owned() };

        let mut c3: BTreeMap<(String, String, String), u64> = BTreeMap::new();
        let mut bigram_tokens: BTreeMap<(String, String), u64> = BTreeMap::new();
        for s in corpus {
            let mut p = vec![BOS.to_owned(), BOS.to_owned()];
            p.extend(s.iter().map(|t| map(t)));
            p.push(EOS.to_owned());
            for i in 2..p.len() {
                *c3.entry((p[i - 2].clone(), p[i - 1].clone(), p[i].clone())).or_default() += 1;
                *bigram_tokens.entry((p[i - 1].clone(), p[i].clone())).or_default() += 1;
            }
        }
        let mut c2: BTreeMap<(String, String), u64> = BTreeMap::new();
        for (v, w) in bigram_tokens.keys() {
            let c = if v == BOS {
                bigram_tokens[&(v.clone(), w.clone())]
            } else {
                c3.keys().filter(|(_, b, c)| b == v && c == w).count() as u64
            };
            c2.insert((v.clone(), w.clone()), c);
        }
        let mut events: Vec<String> = known.iter().cloned().collect();
        events.push(EOS.to_owned());
        events.push(UNK.to_owned());
        let c1: HashMap<String, u64> =
            events.iter().map(|w| (w.clone(), bigram_tokens.keys().filter(|(_, b)| b == w).count() as u64)).collect();

        let d1 = discounts(c1.values().copied());
        let d2 = discounts(c2.values().copied());
        let d3 = discounts(c3.values().copied());

        let total1: u64 = c1.values().sum();
        let freed: f64 = c1.values().map(|&c| disc(&d1, c)).sum::<f64>() / total1 as f64;
        let uni: HashMap<String, f64> = events
            .iter()
            .map(|w| (w.clone(), (c1[w] as f64 - disc(&d1, c1[w])) / total1 as f64 + freed / events.len() as f64))
            .collect();

        let mut bi = HashMap::new();
        let histories: BTreeSet<&String> = c2.keys().map(|(v, _)| v).collect();
        for v in histories {
            let entries: Vec<(&String, u64)> =
                c2.iter().filter(|((a, _), _)| a == v).map(|((_, w), &c)| (w, c)).collect();
            let total: u64 = entries.iter().map(|e| e.1).sum();
            let probs: HashMap<String, f64> =
                entries.iter().map(|&(w, c)| (w.clone(), (c as f64 - disc(&d2, c)) / total as f64)).collect();
            bi.insert(v.clone(), finish(probs, |w| uni[w]));
        }
        let mut oracle = KnOracle { events, uni, bi, tri: HashMap::new(), known };

        let histories: BTreeSet<(String, String)> = c3.keys().map(|(u, v, _)| (u.clone(), v.clone())).collect();
        let mut tri = HashMap::new();
        for (u, v) in histories {
            let entries: Vec<(&String, u64)> =
                c3.iter().filter(|((a, b, _), _)| *a == u && *b == v).map(|((_, _, w), &c)| (w, c)).collect();
            let total: u64 = entries.iter().map(|e| e.1).sum();
            let probs: HashMap<String, f64> =
                entries.iter().map(|&(w, c)| (w.clone(), (c as f64 - disc(&d3, c)) / total as f64)).collect();
            let done = finish(probs, |w| oracle.p2(&v, w));
            tri.insert((u, v), done);
        }
        oracle.tri = tri;
        oracle
    }

    fn norm(&self, t: &str) -> String {
        if t == BOS || t == EOS || self.known.contains(t) {
            t.to_owned()
        } else {
            UNK.to_owned()
        }
    }

    pub fn p1(&self, w: &str) -> f64 {
        self.uni.get(&self.norm(w)).copied().unwrap_or(0.0)
    }

    pub fn p2(&self, v: &str, w: &str) -> f64 {
        let (v, w) = (self.norm(v), self.norm(w));
        match self.bi.get(&v) {
            Some((probs, bow)) => probs.get(&w).copied().unwrap_or_else(|| bow * self.p1(&w)),
            None => self.p1(&w),
        }
    }

    pub fn p3(&self, u: &str, v: &str, w: &str) -> f64 {
        let (u, v, w) = (self.norm(u), self.norm(v), self.norm(w));
        match self.tri.get(&(u, v.clone())) {
            Some((probs, bow)) => probs.get(&w).copied().unwrap_or_else(|| bow * self.p2(&v, &w)),
            None => self.p2(&v, &w),
        }
    }

    pub fn logprob_sentence(&self, s: &[String]) -> f64 {
        let mut p = vec![BOS.to_owned(), BOS.to_owned()];
        p.extend(s.iter().cloned());
        p.push(EOS.to_owned());
        (2..p.len()).map(|i| self.p3(&p[i - 2], &p[i - 1], &p[i]).log10()).sum()
    }
}

// ------------------------------------------------------ decoder brute force

pub struct BruteForce {
    pub best: Vec<String>,
    pub best_score: f64,
    /// Gap between the best and second-best distinct sequences.
    pub margin: f64,
}

/// Score every combination of candidates.
pub fn brute_force(s: &[String], m: &TrigramModel, idx: &ConfusionIndex, cp: &ChannelParams) -> BruteForce {
    let cands: Vec<Vec<&str>> = s.iter().map(|w| candidate_intended(w, idx)).collect();
    let mut best: Option<(f64, Vec<String>)> = None;
    let mut second = f64::NEG_INFINITY;
    let mut choice = vec![0usize; s.len()];
    loop {
        let seq: Vec<String> = choice.iter().zip(&cands).map(|(&k, c)| c[k].to_owned()).collect();
        let emit: f64 = seq.iter().zip(s).map(|(c, o)| emission_logprob(c, o, idx, cp)).sum();
        if emit.is_finite() {
            let score = m.logprob_sentence(&seq) + emit;
            match &best {
                Some((b, _)) if score <= *b => second = second.max(score),
                _ => {
                    if let Some((b, _)) = &best {
                        second = second.max(*b);
                    }
                    best = Some((score, seq));
                }
            }
        }
        // odometer
        let mut i = 0;
        loop {
            if i == choice.len() {
                let (best_score, best) = best.expect("the observed sentence always scores");
                return BruteForce { best, best_score, margin: best_score - second };
            }
            choice[i] += 1;
            if choice[i] < cands[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Brute-force distance-1 scan.
pub fn scan_neighbors<'a>(w: &str, words: &'a [String]) -> Vec<&'a str> {
    let mut v: Vec<&str> = words.iter().filter(|x| dl_distance(w, x) == 1).map(String::as_str).collect();
    v.sort_unstable();
    v
}

// ----------------------------------------------------------------- fixtures

pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn below(&mut self, n: usize) -> usize {
        ((u128::from(self.0.next_u64()) * n as u128) >> 64) as usize
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.below(xs.len())]
    }
}

pub struct Fixture {
    pub model: TrigramModel,
    pub index: ConfusionIndex,
    pub sentence: Vec<String>,
    pub beta: f64,
}

fn random_word(rng: &mut Rng) -> String {
    let len = 1 + rng.below(3);
    (0..len).map(|_| *rng.pick(&['a', 'b', 'c', 'd'])).collect()
}

/// Small random decoding problem: at most 12 vocabulary words, a sentence of
/// at most `max_len` tokens, and at most `max_cands` candidates per position.
pub fn decoder_fixture(rng: &mut Rng, max_len: usize, max_cands: usize) -> Fixture {
    loop {
        let mut words: Vec<String> = Vec::new();
        let target = 3 + rng.below(10);
        let mut tries = 0;
        while words.len() < target && tries < 200 {
            tries += 1;
            let w = random_word(rng);
            if words.contains(&w) {
                continue;
            }
            words.push(w);
            let ok = words.iter().all(|x| scan_neighbors(x, &words).len() < max_cands);
            if !ok {
                words.pop();
            }
        }
        let sentences = 4 + rng.below(12);
        let mut corpus: Corpus = Vec::new();
        for _ in 0..sentences {
            let len = 1 + rng.below(6);
            corpus.push((0..len).map(|_| rng.pick(&words).clone()).collect());
        }
        // a few singletons feed the unknown-word estimate
        corpus.push(vec![format!("x{}", rng.below(1000)), rng.pick(&words).clone()]);
        let vocab = Vocabulary::from_corpus(&corpus).unwrap();
        let model = train(&corpus, &vocab);
        let index = ConfusionIndex::build(&vocab);
        let len = 1 + rng.below(max_len);
        let sentence: Vec<String> = (0..len)
            .map(|_| match rng.below(10) {
                0 => "zz".to_owned(),
                1 => ",".to_owned(),
                _ => rng.pick(&words).clone(),
            })
            .collect();
        if sentence.iter().all(|w| candidate_intended(w, &index).len() <= max_cands) {
            let beta = *rng.pick(&[0.3, 0.5, 0.7, 0.9, 0.99]);
            return Fixture { model, index, sentence, beta };
        }
    }
}

// ------------------------------------------------------------------ corpora

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// The bundled addresses, one string per address.
pub fn sotu_documents() -> Vec<String> {
    let f = std::fs::File::open(data_dir().join("sotu.txt.gz")).expect("data/sotu.txt.gz");
    let mut text = String::new();
    flate2::read::GzDecoder::new(f).read_to_string(&mut text).unwrap();
    split_documents(&text).into_iter().map(str::to_owned).collect()
}

pub fn tokenize_documents(docs: &[String]) -> Corpus {
    let lex = AbbrevLexicon::english();
    docs.iter().flat_map(|d| prepare_document(d, &lex).unwrap()).map(|s| s.surfaces()).collect()
}

/// Every tenth address is held out.
pub fn sotu_split() -> (Corpus, Corpus) {
    let docs = sotu_documents();
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (i, d) in docs.into_iter().enumerate() {
        if i % 10 == 9 {
            test.push(d);
        } else {
            train.push(d);
        }
    }
    (tokenize_documents(&train), tokenize_documents(&test))
}
