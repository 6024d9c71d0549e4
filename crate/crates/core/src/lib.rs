//! Real-word spelling error detection and correction.
//!
//! The pipeline runs raw text through [`textprep`] (sentence segmentation,
//! tokenization, digit regularization), builds a [`vocab::Vocabulary`],
//! trains a backoff trigram model ([`lm::TrigramModel`]) and a
//! Damerau-Levenshtein confusion index ([`confusion::ConfusionIndex`]).
//! The [`corrector`] decodes observed sentences with a pair-state trigram
//! Viterbi search under a noisy-channel emission model. [`corruptor`]
//! produces seeded synthetic error corpora and [`evalkit`] scores runs.

pub mod confusion;
pub mod corrector;
pub mod corruptor;
pub mod error;
pub mod evalkit;
pub mod lm;
pub mod textprep;
pub mod vocab;

pub use error::{Error, Result};

/// Sentence-initial padding symbol.
pub const BOS: &str = "<s>";
/// Sentence-final symbol.
pub const EOS: &str = "</s>";
/// Stand-in for every token outside the base vocabulary.
pub const UNK: &str = "<unk>";

/// True for the three symbols the model reserves for itself.
pub fn is_reserved(token: &str) -> bool {
    token == BOS || token == EOS || token == UNK
}

/// A corpus in the interchange layout: one sentence per entry, each a list of tokens.
pub type Corpus = Vec<Vec<String>>;

/// Parse the interchange format: one sentence per line, tokens separated by
/// whitespace. Blank lines are skipped.
pub fn parse_corpus(text: &str) -> Corpus {
    text.lines()
        .map(|line| line.split_whitespace().map(str::to_owned).collect::<Vec<_>>())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Render a corpus in the interchange format (trailing newline after every sentence).
pub fn format_corpus(corpus: &[Vec<String>]) -> String {
    let mut out = String::new();
    for sentence in corpus {
        out.push_str(&sentence.join(" "));
        out.push('\n');
    }
    out
}
