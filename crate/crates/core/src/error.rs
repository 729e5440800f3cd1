use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// Lengths or dimensions that do not line up.
    #[error("shape error: {0}")]
    Shape(String),

    /// An input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("feature `{feature}` failed: {source}")]
    Feature {
        feature: &'static str,
        #[source]
        source: Box<Error>,
    },

    /// A model file whose dimensions disagree with the pipeline.
    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    /// Experiment or corpus configuration problems, e.g. a missing set.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("json error in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("csv error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
