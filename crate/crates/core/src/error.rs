use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("multicurve is not embeddable: chords {0:?} and {1:?} cross")]
    NonEmbeddable((usize, usize), (usize, usize)),
    #[error("tracks do not lie in a common cone: chords {0:?} and {1:?} cross")]
    NotSameCone((usize, usize), (usize, usize)),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal consistency error: {0}")]
    Inconsistent(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
