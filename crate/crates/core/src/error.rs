use thiserror::Error;

/// Errors raised by the toolkit. Each variant maps onto one CLI exit code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A well-posed search that produced no solution.
    #[error("not found: {0}")]
    NotFound(String),

    /// Newton or continuation failed on a bracketed problem.
    #[error("convergence failure: {context} (residual {residual:.3e} after {iterations} iterations)")]
    Convergence {
        context: String,
        residual: f64,
        iterations: usize,
    },

    /// Table prediction and direct enumeration disagree.
    #[error("classification inconsistency in {region}: table predicts {predicted}, enumeration found {found}")]
    ClassificationInconsistency {
        region: String,
        predicted: usize,
        found: usize,
    },

    /// Simulation blew up; the time step is too coarse.
    #[error("step size too large: {0}")]
    StepSize(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
