use thiserror::Error;

use crate::exprlang::ParseError;

/// A function was evaluated outside the set where it is defined, or produced
/// a non-finite value.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("domain error: {message}")]
pub struct DomainError {
    pub message: String,
}

impl DomainError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("wave speed must be positive, got a = {0}")]
    NonPositiveSpeed(f64),

    #[error("function `{name}` has arity {found}, expected {expected}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error(transparent)]
    Domain(#[from] DomainError),

    #[error("{source} at t = {t}, x = {x}")]
    DomainAt {
        t: f64,
        x: f64,
        #[source]
        source: DomainError,
    },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("adaptive quadrature hit the depth limit; best estimate {estimate}")]
    MaxDepthExceeded { estimate: f64 },

    #[error("alpha must lie in (0, 1), got {0}")]
    AlphaOutOfRange(f64),

    #[error("CFL condition violated: nu = {nu} > 1")]
    CflViolation { nu: f64 },

    #[error("the power-law family solves only the Neumann problem")]
    DirichletUnsupported,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
