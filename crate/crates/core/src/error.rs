use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Mismatched vector/matrix dimensions or mode indices out of range.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// A parameter is outside its physical or documented domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A state failed a physicality check (V + i/4 Omega not PSD, or a
    /// fidelity/probability left [0, 1] by more than the tolerance).
    #[error("unphysical state: {0}")]
    Unphysical(String),

    /// An iterative routine did not reach its tolerance. Carries the last
    /// estimate so callers can decide whether it is still useful.
    #[error("{context}: no convergence after {evals} evaluations (last estimate {last:e})")]
    NonConvergence {
        context: &'static str,
        evals: usize,
        last: f64,
    },

    /// A root/extremum bracket could not be established.
    #[error("bracketing failed: {0}")]
    Bracket(String),

    /// Config-file or key=value parse problem.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
