use thiserror::Error;

/// Errors produced by the pricing engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// One or more input fields violate their invariants.
    #[error("invalid parameters: {}", .0.join("; "))]
    Validation(Vec<String>),

    /// A numeric argument is outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The law is a point mass and has no density/quantile structure.
    #[error("degenerate law: {0}")]
    DegenerateLaw(&'static str),

    /// P[S_T > k] is below the double-precision floor.
    #[error("tail probability {tail:e} above strike {strike} is below the representable floor")]
    TailUnderflow { strike: f64, tail: f64 },

    #[error("quadrature did not converge: estimated error {achieved:e} exceeds target {target:e}")]
    Quadrature { achieved: f64, target: f64 },

    #[error("support has {outcomes} outcomes (limit {limit}); too large, use Monte Carlo")]
    EnumerationTooLarge { outcomes: f64, limit: usize },

    #[error("only {count} samples exceed the strike, need at least {required}")]
    InsufficientExceedances { count: usize, required: usize },

    #[error("{} of {total} curve points failed (first at index {}): {first_error}", .failed.len(), .failed[0])]
    PartialCurve { failed: Vec<usize>, total: usize, first_error: Box<Error> },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors raised by input validation rather than by numerics.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Validation(_) | Error::Domain(_) | Error::Parse { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
