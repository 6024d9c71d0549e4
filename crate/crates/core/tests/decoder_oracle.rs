mod common;

use common::{brute_force, decoder_fixture, Rng};
use realword::confusion::ConfusionIndex;
use realword::corrector::{viterbi_correct, ChannelParams, DecoderConfig};
use realword::lm::train;
use realword::parse_corpus;
use realword::vocab::Vocabulary;

#[test]
fn unpruned_search_finds_the_exhaustive_argmax() {
    let mut rng = Rng::new(1);
    let (mut exact, mut ties) = (0, 0);
    for _ in 0..300 {
        let f = decoder_fixture(&mut rng, 6, 4);
        let cp = ChannelParams::new(f.beta).unwrap();
        let got = viterbi_correct(&f.sentence, &f.model, &f.index, &cp, &DecoderConfig::unbounded()).unwrap();
        let bf = brute_force(&f.sentence, &f.model, &f.index, &cp);
        assert!((got.score - bf.best_score).abs() < 1e-9, "{:?}: {} vs {}", f.sentence, got.score, bf.best_score);
        if got.sentence == bf.best {
            exact += 1;
        } else {
            // only acceptable when two sequences score the same
            assert!(bf.margin < 1e-9, "{:?}: {:?} vs {:?}", f.sentence, got.sentence, bf.best);
            ties += 1;
        }
    }
    assert!(exact > ties);
}

#[test]
fn wider_beams_never_score_worse() {
    // Pruning is greedy, so this is not a theorem: on longer sentences a
    // narrow beam can luckily keep the optimum that a wider one squeezes out.
    let mut rng = Rng::new(2);
    for _ in 0..300 {
        let f = decoder_fixture(&mut rng, 6, 4);
        let cp = ChannelParams::new(f.beta).unwrap();
        let mut last = f64::NEG_INFINITY;
        for t in [1, 3, 9, 27, usize::MAX] {
            let r = viterbi_correct(&f.sentence, &f.model, &f.index, &cp, &DecoderConfig { t }).unwrap();
            assert_eq!(r.sentence.len(), f.sentence.len());
            assert!(r.score >= last, "{:?} t={t}: {} < {last}", f.sentence, r.score);
            last = r.score;
        }
    }
}

#[test]
fn no_beam_beats_the_exact_search() {
    let mut rng = Rng::new(4);
    for _ in 0..200 {
        let f = decoder_fixture(&mut rng, 8, 4);
        let cp = ChannelParams::new(f.beta).unwrap();
        let exact = viterbi_correct(&f.sentence, &f.model, &f.index, &cp, &DecoderConfig::unbounded()).unwrap();
        for t in 1..=6 {
            let r = viterbi_correct(&f.sentence, &f.model, &f.index, &cp, &DecoderConfig { t }).unwrap();
            assert!(r.score <= exact.score);
            // the returned score is the true score of the returned sentence
            let rescored = f.model.logprob_sentence(&r.sentence)
                + r.sentence
                    .iter()
                    .zip(&f.sentence)
                    .map(|(c, o)| realword::corrector::emission_logprob(c, o, &f.index, &cp))
                    .sum::<f64>();
            assert!((rescored - r.score).abs() < 1e-9);
        }
    }
}

#[test]
fn recovers_two_adjacent_errors() {
    let text = "we had to go to the store\n".repeat(30)
        + &"to go to the store is fun\n".repeat(30)
        + "two go toe he\ntwo go toe he\n";
    let corpus = parse_corpus(&text);
    let vocab = Vocabulary::from_corpus(&corpus).unwrap();
    let m = train(&corpus, &vocab);
    let idx = ConfusionIndex::build(&vocab);
    let observed: Vec<String> = "we had two go toe the store".split(' ').map(str::to_owned).collect();
    let cp = ChannelParams::new(0.9).unwrap();
    let bf = brute_force(&observed, &m, &idx, &cp);
    assert_eq!(bf.best.join(" "), "we had to go to the store");
    let got = viterbi_correct(&observed, &m, &idx, &cp, &DecoderConfig::new(9).unwrap()).unwrap();
    assert_eq!(got.sentence, bf.best);
}

#[test]
fn decoding_is_deterministic() {
    let mut rng = Rng::new(3);
    for _ in 0..30 {
        let f = decoder_fixture(&mut rng, 6, 4);
        let cp = ChannelParams::new(f.beta).unwrap();
        let dc = DecoderConfig::new(2).unwrap();
        let a = viterbi_correct(&f.sentence, &f.model, &f.index, &cp, &dc).unwrap();
        let b = viterbi_correct(&f.sentence, &f.model, &f.index, &cp, &dc).unwrap();
        assert_eq!(a, b);
    }
}
