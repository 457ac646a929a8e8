use rayon::prelude::*;

use super::quadrature::{check_range, integrate_fn, Features};
use super::{Grid, QuadratureSpec};
use crate::corpus::FunctionSpec;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightKind {
    Unweighted,
    /// `w(t) = t^α`.
    Power,
}

/// Weight attached to an `L^p` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec<T> {
    pub kind: WeightKind,
    pub alpha: T,
}

impl<T: Scalar> Default for WeightSpec<T> {
    fn default() -> Self {
        Self::unweighted()
    }
}

impl<T: Scalar> WeightSpec<T> {
    pub fn unweighted() -> Self {
        Self { kind: WeightKind::Unweighted, alpha: T::zero() }
    }

    pub fn power(alpha: T) -> Self {
        Self { kind: WeightKind::Power, alpha }
    }

    #[inline]
    pub fn eval(&self, t: T) -> T {
        match self.kind {
            WeightKind::Unweighted => T::one(),
            WeightKind::Power => t.powf(self.alpha),
        }
    }

    /// Power weights must lie in the Muckenhoupt range `α ∈ (−1, p − 1)`.
    pub fn validate(&self, p: T) -> Result<()> {
        if self.kind == WeightKind::Power
            && !(self.alpha > -T::one() && self.alpha < p - T::one())
        {
            return Err(Error::InvalidArgument(format!(
                "power weight exponent {} outside (-1, {})",
                self.alpha,
                p - T::one()
            )));
        }
        Ok(())
    }

    fn singular_at_zero(&self) -> bool {
        self.kind == WeightKind::Power && self.alpha < T::zero()
    }
}

pub(crate) fn check_exponent<T: Scalar>(p: T) -> Result<()> {
    if !(p >= T::one()) || !p.is_finite() {
        return Err(Error::InvalidExponent(p.as_f64()));
    }
    Ok(())
}

/// `(∫_a^b |f|^p w)^{1/p}`.
pub fn lp_norm<T: Scalar>(
    f: &FunctionSpec<T>,
    p: T,
    a: T,
    b: T,
    weight: &WeightSpec<T>,
    quad: &QuadratureSpec,
) -> Result<T> {
    lp_norm_resolved(f, p, a, b, weight, quad, None)
}

/// [`lp_norm`] with every segment cut into panels no wider than `resolution`.
/// Used for oscillatory integrands such as operator outputs of high degree.
pub fn lp_norm_resolved<T: Scalar>(
    f: &FunctionSpec<T>,
    p: T,
    a: T,
    b: T,
    weight: &WeightSpec<T>,
    quad: &QuadratureSpec,
    resolution: Option<T>,
) -> Result<T> {
    check_exponent(p)?;
    weight.validate(p)?;
    check_range(a, b)?;
    let mut singular: Vec<T> = f.singular_points().to_vec();
    if weight.singular_at_zero() {
        singular.push(T::zero());
    }
    let features = Features { name: f.name(), breakpoints: f.breakpoints(), singular: &singular, resolution: f.resolution() };
    let integrand = |t: T| {
        let v = f.value(t).abs();
        let powered = if p == T::one() { v } else { v.powf(p) };
        powered * weight.eval(t)
    };
    let total = integrate_fn(&integrand, features, a, b, quad, resolution)?;
    Ok(total.max(T::zero()).powf(p.recip()))
}

/// Grid maximum of `|f|`.
pub fn sup_norm<T: Scalar>(f: &FunctionSpec<T>, grid: &Grid<T>) -> Result<T> {
    let values = sample(f, grid)?;
    Ok(values.iter().fold(T::zero(), |m, v| m.max(v.abs())))
}

/// Evaluates `f` at every grid point, failing on the first non-finite value.
pub fn sample<T: Scalar>(f: &FunctionSpec<T>, grid: &Grid<T>) -> Result<Vec<T>> {
    grid.points().par_iter().map(|&t| f.eval(t)).collect()
}
