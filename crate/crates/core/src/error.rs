use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// The variants split into caller mistakes (invalid input, preconditions)
/// and numerical failures; the CLI maps the two groups to different exit
/// codes via [`Error::is_numerical`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("grid does not resolve the problem: {0}")]
    Resolution(String),

    #[error("grid function is not periodizable: tail magnitude {tail:.3e} exceeds {limit:.1e} of its peak")]
    NotPeriodizable { tail: f64, limit: f64 },

    #[error("singular factorization at pivot {pivot}")]
    Singular { pivot: usize },

    #[error("{what} did not converge after {iterations} iterations (last change {last_change:.3e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        last_change: f64,
    },

    #[error("limiting-absorption extrapolation did not stabilise after {halvings} halvings")]
    EpsilonExtrapolation { halvings: usize },

    #[error("cross-check failed: {0}")]
    CrossCheck(String),

    #[error("invalid run: {0}")]
    InvalidRun(String),
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. }
                | Error::NoConvergence { .. }
                | Error::EpsilonExtrapolation { .. }
                | Error::CrossCheck(_)
                | Error::InvalidRun(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
