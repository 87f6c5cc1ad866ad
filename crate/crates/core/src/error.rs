use thiserror::Error;

/// Failure modes shared by every module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("label mismatch: {0}")]
    LabelMismatch(String),
    #[error("no convergence after {iterations} iterations (residual {residual:.3e}): {context}")]
    NoConvergence {
        context: String,
        iterations: usize,
        residual: f64,
    },
    #[error("prevertex collision between indices {0} and {1}")]
    Collision(usize, usize),
    #[error("rank-deficient design: {0}")]
    RankDeficient(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for failures caused by the caller's data rather than by a solver.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::NoConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
