use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid degree {0}: must be at least 1")]
    InvalidDegree(usize),

    #[error("kernel index {k} out of range 1..={n}")]
    IndexOutOfRange { k: usize, n: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("angle {theta} lies outside [0, pi]")]
    OutOfDomain { theta: f64 },

    #[error("function `{name}` is not finite at {at}")]
    FunctionDomain { name: String, at: f64 },

    #[error("quadrature failed{}: {detail}", panel.map(|k| format!(" on panel k={k}")).unwrap_or_default())]
    QuadratureFailure { detail: String, panel: Option<usize> },

    #[error("integral diverges near {at} (geometric grading ratio {ratio:.4})")]
    Divergent { at: f64, ratio: f64 },

    #[error("invalid exponent p={0}: must be at least 1")]
    InvalidExponent(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data: need at least {needed} positive records, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("unknown function `{name}`; registry: {}", known.join(", "))]
    UnknownFunction { name: String, known: Vec<String> },

    #[error("envelope vanishes at theta={theta} while the error is {error:e}")]
    EnvelopeDegenerate { theta: f64, error: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
