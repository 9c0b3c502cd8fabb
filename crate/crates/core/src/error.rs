use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("argument `{name}` = {value} outside its domain: {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("too few samples: segment sizes {p_len} and {q_len}, need at least {min} each")]
    TooFewSamples { p_len: usize, q_len: usize, min: usize },
    #[error("invalid sample shape: {0}")]
    InvalidShape(String),
    #[error("closed forms are only available in dimension 1 (got dimension {dim})")]
    UnsupportedScenario { dim: usize },
    #[error("degenerate sample: {0}")]
    DegenerateSample(&'static str),
    #[error("scenario is null (P = Q): {0}")]
    NullScenario(&'static str),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("root finder failed to converge: {0}")]
    ConvergenceFailure(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        expected,
    }
}
