use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid block partition: {0}")]
    InvalidPartition(String),

    #[error("coefficient variant not applicable: {0}")]
    InvalidVariant(String),

    #[error("asynchronicity parameter psi = {psi} exceeds the 3/7 theory window")]
    OutsideTheoryWindow { psi: f64 },

    #[error("{message} at line {line}")]
    Parse { line: usize, message: String },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("insufficient history: {0}")]
    History(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
