use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sample is empty")]
    EmptySample,
    #[error("non-finite value at index {index}")]
    NonFiniteValue { index: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("sample too small: need at least {needed} observations, got {got}")]
    SampleTooSmall { needed: usize, got: usize },
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },
    #[error("protected group `{0}` is empty")]
    EmptyGroup(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::Singular(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
