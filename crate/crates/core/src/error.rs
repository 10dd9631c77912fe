use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph is disconnected (lambda2 = {0:e})")]
    Disconnected(f64),

    #[error("invalid eigenvalue interval [{alpha}, {beta}]")]
    InvalidInterval { alpha: f64, beta: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("graph generation failed: {0}")]
    Generation(String),

    #[error("search needs {required} grid evaluations but the budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("memory depth {got} is not supported here (expected {expected})")]
    WrongDepth { expected: usize, got: usize },

    #[error("consensus error ratio is undefined: initial state is already at consensus")]
    UndefinedRatio,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("{0}")]
    Io(String),
}

impl Error {
    /// True for failures of an iterative numerical method, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}
