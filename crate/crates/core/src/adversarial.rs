//! The hat family `f_{n,m}` on which the un-averaged Grünwald operators blow
//! up in `L¹`, together with the constants `C_n`.
//!
//! The hats are built from their geometric description (peak `m` at `θ_n`,
//! linear flanks, half-width `2^{-(N+1)}`). The explicit piecewise formula
//! found in the literature has inconsistent denominators in its middle
//! branches and is not used.

use crate::corpus::{FunctionSpec, Smoothness};
use crate::kernels::NodeSet;
use crate::numerics::{integrate_fn, sign_changes, Features, QuadratureSpec, WeightSpec};
use crate::operators::{grunwald, grunwald_kantorovich};
use crate::{Error, Result, Scalar};

/// Uniform probes per unit of degree used to locate the zeros of the
/// `C_n` integrand.
pub const SIGN_PROBES_PER_DEGREE: usize = 64;

/// `C_n = ∫_0^π |P_n(θ − π/2n) + P_n(θ + π/2n)| dθ`.
pub fn c_n_constant<T: Scalar>(n: usize, quad: &QuadratureSpec) -> Result<T> {
    let nodes = NodeSet::<T>::new(n)?;
    let two = T::lit(2.0);
    let sum = |theta: T| two * nodes.kernel(n, theta).expect("index in range");
    let mut cuts = sign_changes(&sum, T::zero(), T::PI(), SIGN_PROBES_PER_DEGREE * n);
    let tn = nodes.theta(n)?;
    let h = nodes.half_step();
    cuts.extend([tn - h, tn, tn + h].into_iter().filter(|&c| c > T::zero() && c < T::PI()));
    let integrand = |theta: T| sum(theta).abs();
    let features = Features { name: "c_n", breakpoints: &cuts, singular: &[], resolution: None };
    integrate_fn(&integrand, features, T::zero(), T::PI(), quad, Some(h / two))
}

/// The witness `f_{n,m}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HatFunction<T> {
    pub n: usize,
    pub m: T,
    /// Sharpness exponent `N`.
    pub big_n: u32,
    pub peak: T,
    pub half_width: T,
}

impl<T: Scalar> HatFunction<T> {
    pub fn value(&self, theta: T) -> T {
        let d = (theta - self.peak).abs();
        if d >= self.half_width {
            T::zero()
        } else {
            self.m * (T::one() - d / self.half_width)
        }
    }

    /// `‖f_{n,m}‖₁ = m·2^{-(N+1)}`.
    pub fn l1_norm(&self) -> T {
        self.m * self.half_width
    }

    pub fn support(&self) -> (T, T) {
        (self.peak - self.half_width, self.peak + self.half_width)
    }

    pub fn to_function(&self) -> FunctionSpec<T> {
        let hat = *self;
        let (lo, hi) = self.support();
        let name = format!("hat_n{}_m{}", self.n, self.m);
        FunctionSpec::new(name, move |t| hat.value(t))
            .with_breakpoints(vec![lo, hat.peak, hi])
            .with_smoothness(Smoothness::Lipschitz)
            .with_lipschitz(hat.m / hat.half_width)
            .with_antiderivative(move |t| hat.primitive(t))
    }

    fn primitive(&self, t: T) -> T {
        let (lo, hi) = self.support();
        let two = T::lit(2.0);
        if t <= lo {
            T::zero()
        } else if t >= hi {
            self.l1_norm()
        } else if t <= self.peak {
            let u = t - lo;
            self.m * u * u / (two * self.half_width)
        } else {
            let u = hi - t;
            self.l1_norm() - self.m * u * u / (two * self.half_width)
        }
    }
}

/// Builds `f_{n,m}` with the smallest `N ≥ 1` such that `2^{-N} < C_n/m`
/// and `2^{-(N+1)} <= π/(2n)`.
pub fn build_hat<T: Scalar>(n: usize, m: T, quad: &QuadratureSpec) -> Result<HatFunction<T>> {
    let c_n = c_n_constant::<T>(n, quad)?;
    build_hat_with(n, m, c_n)
}

/// [`build_hat`] with a precomputed `C_n`.
pub fn build_hat_with<T: Scalar>(n: usize, m: T, c_n: T) -> Result<HatFunction<T>> {
    if !(m > T::zero()) || !m.is_finite() {
        return Err(Error::InvalidArgument(format!("hat height must be positive, got {m}")));
    }
    let nodes = NodeSet::<T>::new(n)?;
    let h = nodes.half_step();
    let two = T::lit(2.0);
    let mut big_n = 1u32;
    let mut width = T::lit(0.5);
    while !(width < c_n / m && width / two <= h) {
        big_n += 1;
        width = width / two;
        if big_n > 200 {
            return Err(Error::InvalidArgument(format!("no sharpness exponent for n={n}, m={m}")));
        }
    }
    Ok(HatFunction { n, m, big_n, peak: nodes.theta(n)?, half_width: width / two })
}

/// Result of one blow-up measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Blowup<T> {
    /// `‖G_n f‖₁ / ‖f‖₁`.
    pub ratio: T,
    pub gnorm: T,
    pub fnorm: T,
}

/// `‖G_n f_{n,m}‖₁ / ‖f_{n,m}‖₁`.
pub fn l1_blowup<T: Scalar>(n: usize, m: T, quad: &QuadratureSpec) -> Result<Blowup<T>> {
    let hat = build_hat(n, m, quad)?;
    let nodes = NodeSet::<T>::new(n)?;
    let g = grunwald(&nodes, &hat.to_function())?;
    let gnorm = g.lp_norm(T::one(), T::zero(), T::PI(), &WeightSpec::unweighted(), quad)?;
    let fnorm = hat.l1_norm();
    Ok(Blowup { ratio: gnorm / fnorm, gnorm, fnorm })
}

/// `‖GK_n f_{n,m}‖₁ / ‖f_{n,m}‖₁` for the same hat.
pub fn gk_contrast<T: Scalar>(hat: &HatFunction<T>, quad: &QuadratureSpec) -> Result<T> {
    let nodes = NodeSet::<T>::new(hat.n)?;
    let gk = grunwald_kantorovich(&nodes, &hat.to_function(), quad)?;
    let norm = gk.lp_norm(T::one(), T::zero(), T::PI(), &WeightSpec::unweighted(), quad)?;
    Ok(norm / hat.l1_norm())
}

/// `max_k (2n/π)·‖S_{k,n}‖₁`, the exact `L¹ → L¹` norm of `GK_n`.
pub fn gk_l1_operator_norm<T: Scalar>(n: usize, quad: &QuadratureSpec) -> Result<T> {
    let scale = T::lit(2.0) * T::from_index(n) / T::PI();
    let mut best = T::zero();
    for k in 1..=n {
        best = best.max(scale * crate::analysis::prop_norm_ii(n, k, T::one(), quad)?);
    }
    Ok(best)
}
