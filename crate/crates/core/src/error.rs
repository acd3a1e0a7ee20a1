use thiserror::Error;

/// Errors surfaced by the estimation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input file (CSV syntax, unparsable cell).
    #[error("parse error at row {row}: {message}")]
    Parse { row: usize, message: String },

    /// Input violates a documented precondition.
    #[error("{0}")]
    Domain(String),

    /// Design matrix columns are linearly dependent.
    #[error("rank-deficient design: column `{0}` is linearly dependent on earlier columns")]
    RankDeficient(String),

    /// An estimator failed on otherwise valid input.
    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn parse(row: usize, msg: impl Into<String>) -> Self {
        Error::Parse { row, message: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
