use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates its family's constraints. `path` is the JSON path
    /// of the offending field, e.g. `params.alpha`.
    #[error("invalid value at {path}: {message}")]
    InvalidSpec { path: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("h_X is not positive at x = {x} (h_X = {value})")]
    NonPositiveH { x: f64, value: f64 },

    #[error("{0}")]
    Unsupported(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn spec(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidSpec { path: path.into(), message: message.into() }
    }

    /// Nests a spec error's path under `prefix`.
    pub fn within(self, prefix: &str) -> Self {
        match self {
            Error::InvalidSpec { path, message } => Error::InvalidSpec { path: format!("{prefix}.{path}"), message },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
