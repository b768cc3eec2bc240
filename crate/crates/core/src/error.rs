use thiserror::Error;

/// Errors produced by the analytic and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The supplied interval does not bracket a sign change.
    #[error("bracket error: f({lo}) = {f_lo} and f({hi}) = {f_hi} have the same sign")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    /// An iterative method ran out of iterations.
    #[error("no convergence after {iterations} iterations")]
    Convergence { iterations: usize },

    /// A quantizer description violates its invariants.
    #[error("invalid quantizer: {0}")]
    Quantizer(String),

    /// A simulation or sweep parameter is out of range.
    #[error("parameter error: {0}")]
    Parameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {x}")))
    }
}
