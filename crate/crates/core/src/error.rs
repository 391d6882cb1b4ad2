//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad or unknown configuration keys/values.
    #[error("config error: {0}")]
    Config(String),
    /// Malformed, missing, or insufficient market data.
    #[error("data error: {0}")]
    Data(String),
    /// An internal contract was violated (dimension mismatch, illegal call).
    #[error("contract violation: {0}")]
    Contract(String),
    /// API used outside its lifecycle (e.g. step after done).
    #[error("lifecycle error: {0}")]
    Lifecycle(String),
    /// Non-finite loss or other optimization failure.
    #[error("training fault: {0}")]
    TrainingFault(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// CLI process exit code: 2 config, 3 data, 4 training fault, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Data(_) => 3,
            Error::TrainingFault(_) => 4,
            _ => 1,
        }
    }
}
