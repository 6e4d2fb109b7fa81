use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid token {token:?}: {reason}")]
    InvalidToken { token: String, reason: &'static str },

    #[error("invalid label {label:?}: {reason}")]
    InvalidLabel { label: String, reason: &'static str },

    #[error("tag/token length mismatch: {tokens} tokens, {tags} tags")]
    LengthMismatch { tokens: usize, tags: usize },

    #[error("span {start}..{end} is invalid for a sequence of length {len}")]
    SpanOutOfRange {
        start: usize,
        end: usize,
        len: usize,
    },

    #[error("span {start}..{end} overlaps the previous span ending at {prev_end}")]
    SpanOverlap {
        start: usize,
        end: usize,
        prev_end: usize,
    },

    #[error("corpus size mismatch: {gold} gold sentences, {pred} predicted")]
    CorpusMismatch { gold: usize, pred: usize },

    #[error("ids differ between gold and prediction (missing from predictions: [{}]; missing from gold: [{}])", missing_pred.join(", "), missing_gold.join(", "))]
    IdMismatch {
        missing_pred: Vec<String>,
        missing_gold: Vec<String>,
    },

    #[error("gold record {0:?} has no gold_tags")]
    MissingGold(String),

    #[error("duplicate id {0:?}")]
    DuplicateId(String),

    #[error("{path}:{line}: {message}")]
    Malformed {
        path: String,
        line: usize,
        message: String,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}
