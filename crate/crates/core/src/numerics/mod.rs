//! Grids, composite quadrature and norms.

mod grid;
mod norms;
mod quadrature;

pub use grid::{Grid, DEFAULT_GRID_SIZE};
pub use norms::{lp_norm, lp_norm_resolved, sample, sup_norm, WeightKind, WeightSpec};
pub(crate) use norms::check_exponent;
pub use quadrature::{
    integrate, integrate_fn, sign_changes, Features, GaussLegendre, QuadratureSpec, GRADING_LEVELS,
};
