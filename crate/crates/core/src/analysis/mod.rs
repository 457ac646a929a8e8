//! Measurement instruments: moduli, K-functional bounds, maximal functions,
//! kernel integrals, rate fits and the pointwise envelope.

mod envelope;
mod fit;
mod kfunctional;
mod maximal;
mod modulus;
mod proposition;

pub use envelope::{envelope_check, EnvelopeFit, ENVELOPE_ZERO};
pub use fit::{linear_fit, m_n, rate_fit, semilog_fit, RateFit};
pub use kfunctional::{k_functional_sweep, k_functional_upper, KSweep, Smoother, BANDWIDTH_EXPONENTS};
pub use maximal::{maximal_function, maximal_function_with, maximal_ratio, MAXIMAL_FLOOR, MAX_MAXIMAL_GRID};
pub use modulus::{modulus, modulus_of_samples, ModulusTable};
pub use proposition::{prop_norm_i, prop_norm_ii};

use crate::operators::OperatorKind;

/// Which norm an error was measured in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormDescriptor {
    /// `None` for the grid sup norm.
    pub p: Option<f64>,
    /// Exponent of a power weight, if any.
    pub weight_alpha: Option<f64>,
    pub a: f64,
    pub b: f64,
}

/// One `(n, error)` observation.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub function: String,
    pub operator: OperatorKind,
    pub norm: NormDescriptor,
    pub n: usize,
    pub error: f64,
    pub wall_time: f64,
}
