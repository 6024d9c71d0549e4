use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("document has no content")]
    EmptyDocument,

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("sentence is empty")]
    EmptySentence,

    #[error("no sentence pairs to score")]
    NoPairs,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vocabulary mismatch: model {model:016x}, confusion index {index:016x}")]
    VocabularyMismatch { model: u64, index: u64 },

    #[error("sentence {sentence_id}: {message}")]
    Alignment { sentence_id: usize, message: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }
}
