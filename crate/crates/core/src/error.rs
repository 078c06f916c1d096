use thiserror::Error;

#[derive(Debug, Error)]
pub enum HdError {
    #[error("invalid dimension {0}: must be at least 1")]
    InvalidDimension(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("noise probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("memory is empty")]
    EmptyMemory,

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("duplicate name `{0}`")]
    DuplicateName(String),

    #[error("duplicate address at rows {0} and {1}")]
    DuplicateAddress(usize, usize),

    #[error("stack is empty")]
    EmptyStack,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("component overflow during {0}")]
    Overflow(&'static str),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HdError>;

pub(crate) fn check_dims(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(HdError::DimensionMismatch { left, right })
    }
}
