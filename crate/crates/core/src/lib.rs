//! Numerical laboratory for Grünwald-Kantorovich operators on Chebyshev nodes.
//!
//! The operators live on `[0, π]`. Starting from the Chebyshev angles
//! `θ_k = (2k−1)π/(2n)`, the crate evaluates the fundamental Lagrange
//! polynomials `P_k`, the averaged kernels
//! `S_{k,n}(θ) = ½{P_k(θ + π/2n) + P_k(θ − π/2n)}`, and the operator
//!
//! ```text
//! GK_n(f)(θ) = Σ_k a_k S_{k,n}(θ),   a_k = (2n/π) ∫_{θ_k}^{θ_k + π/2n} f
//! ```
//!
//! together with the measuring instruments (norms, moduli of continuity,
//! K-functional bounds, maximal functions, rate fits) needed to check its
//! boundedness and convergence empirically.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`, which is what the
//! experiment runner uses.

pub mod adversarial;
pub mod analysis;
pub mod corpus;
mod error;
pub mod kernels;
pub mod numerics;
pub mod operators;
mod scalar;

pub use error::{Error, Result};
pub use scalar::{compensated_sum, CompensatedSum, Scalar};

pub type NodeSet = kernels::NodeSet<f64>;
pub type Grid = numerics::Grid<f64>;
pub type FunctionSpec = corpus::FunctionSpec<f64>;
pub type Approximant = operators::Approximant<f64>;
pub type KantorovichMeans = operators::KantorovichMeans<f64>;
pub type HatFunction = adversarial::HatFunction<f64>;
pub type WeightSpec = numerics::WeightSpec<f64>;

pub use analysis::RateFit;
pub use kernels::KernelKind;
pub use numerics::QuadratureSpec;
pub use operators::OperatorKind;
