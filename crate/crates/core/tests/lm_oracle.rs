mod common;

use common::{KnOracle, Rng, BOS, EOS};
use realword::lm::{export_arpa, import_arpa, train};
use realword::vocab::Vocabulary;
use realword::Corpus;

fn random_corpus(rng: &mut Rng) -> Corpus {
    let alphabet = ["the", "cat", "sat", "on", "a", "mat", "dog", "ran", ".", "it", "was", "red"];
    let size = 2 + rng.below(alphabet.len() - 1);
    let words = &alphabet[..size];
    let mut corpus = Vec::new();
    let mut tokens = 0;
    let budget = 20 + rng.below(180);
    while tokens < budget {
        let len = 1 + rng.below(8);
        let mut s: Vec<String> = (0..len).map(|_| (*rng.pick(words)).to_owned()).collect();
        if rng.below(5) == 0 {
            s.push(format!("rare{}", rng.below(50)));
        }
        tokens += s.len();
        corpus.push(s);
    }
    corpus
}

#[test]
fn matches_string_keyed_reference() {
    let mut rng = Rng::new(20);
    for _ in 0..60 {
        let corpus = random_corpus(&mut rng);
        let vocab = Vocabulary::from_corpus(&corpus).unwrap();
        let model = train(&corpus, &vocab);
        let oracle = KnOracle::train(&corpus);

        let mut histories: Vec<String> = oracle.events.clone();
        histories.push(BOS.to_owned());
        histories.push("never-seen".to_owned());
        for h0 in &histories {
            for h1 in &histories {
                for w in &oracle.events {
                    let expect = oracle.p3(h0, h1, w).log10();
                    let got = model.logprob_word((h0, h1), w);
                    assert!((expect - got).abs() < 1e-10, "P({w} | {h0} {h1}): oracle {expect}, model {got}");
                }
            }
        }
        for s in &corpus {
            assert!((oracle.logprob_sentence(s) - model.logprob_sentence(s)).abs() < 1e-9);
        }
    }
}

#[test]
fn reference_is_normalized_too() {
    let mut rng = Rng::new(21);
    for _ in 0..20 {
        let corpus = random_corpus(&mut rng);
        let oracle = KnOracle::train(&corpus);
        for h in &oracle.events {
            let total: f64 = oracle.events.iter().map(|w| oracle.p3(BOS, h, w)).sum();
            assert!((total - 1.0).abs() < 1e-9, "history <s> {h}: {total}");
        }
    }
}

#[test]
fn arpa_import_scores_like_reference() {
    let mut rng = Rng::new(22);
    let corpus = random_corpus(&mut rng);
    let vocab = Vocabulary::from_corpus(&corpus).unwrap();
    let model = import_arpa(&export_arpa(&train(&corpus, &vocab))).unwrap();
    let oracle = KnOracle::train(&corpus);
    for w in &oracle.events {
        let expect = oracle.p3(BOS, BOS, w).log10();
        assert!((model.logprob_word((BOS, BOS), w) - expect).abs() < 1e-6);
    }
    assert!((model.logprob_word((BOS, BOS), EOS) - oracle.p3(BOS, BOS, EOS).log10()).abs() < 1e-6);
}
