use std::io;

/// Errors produced while loading graphs or running the search.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    EigenNotConverged { iterations: usize, residual: f64 },

    #[error("random walk did not converge after {iterations} iterations")]
    WalkNotConverged { iterations: usize },

    #[error("sweep found no connected proper prefix")]
    NoConnectedPrefix,

    #[error("synthetic generation failed: {0}")]
    Generation(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Process exit code used by the CLI: 3 for numerical failures, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::EigenNotConverged { .. } | Error::WalkNotConverged { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(Error::EigenNotConverged { iterations: 5, residual: 1e-3 }.exit_code(), 3);
        assert_eq!(Error::WalkNotConverged { iterations: 5 }.exit_code(), 3);
        assert_eq!(Error::Parse { line: 2, message: "bad".into() }.exit_code(), 2);
        assert_eq!(Error::invalid("x").exit_code(), 2);
        assert_eq!(Error::TooLarge("x".into()).exit_code(), 2);
    }
}
