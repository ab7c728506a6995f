use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Operands use incompatible representations (different bases, torus vs
    /// component sums, nonparallel line foliations).
    #[error("representation mismatch: {0}")]
    RepresentationMismatch(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("normalization error: {0}")]
    Normalization(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An iterative solver ran out of budget. `residuals` holds the history
    /// of the convergence measure, most recent last.
    #[error("no convergence after {iterations} iterations (last residual {last:e})")]
    NonConvergence {
        iterations: usize,
        last: f64,
        residuals: Vec<f64>,
    },
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn mismatch(msg: impl Into<String>) -> Self {
        Error::RepresentationMismatch(msg.into())
    }
}
