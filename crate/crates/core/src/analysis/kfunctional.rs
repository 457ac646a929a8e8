//! Upper bounds for `K_p(f, δ) = inf_{g ∈ C¹} ‖f − g‖_p + δ‖g'‖_∞`.
//!
//! Candidates are moving averages of the even reflection `f̃` of `f` across
//! `0` and `π`. For a window `h` the average is
//! `f_h(x) = (F̃(x + h/2) − F̃(x − h/2))/h` and its derivative is the exact
//! difference quotient `(f̃(x + h/2) − f̃(x − h/2))/h`. Unbounded functions get
//! a second averaging pass, whose derivative is the difference quotient of
//! `f_h`, so the sup of the derivative stays finite.

use rayon::prelude::*;

use crate::corpus::FunctionSpec;
use crate::numerics::{check_exponent, integrate_fn, Features, GaussLegendre, Grid, QuadratureSpec};
use crate::{Error, Result, Scalar};

/// Bandwidth exponents `j` in `h = π·2^{−j}`.
pub const BANDWIDTH_EXPONENTS: std::ops::RangeInclusive<i32> = 2..=16;
const MESH_CELLS: usize = 4096;
const RESIDUAL_PANELS: f64 = 1024.0;

/// Moving-average smoother of the even reflection of one function.
pub struct Smoother<T: Scalar> {
    f: FunctionSpec<T>,
    step: T,
    cumulative: Vec<T>,
    rule: GaussLegendre<T>,
    quad: QuadratureSpec,
    // structural points of the reflected function on [−π, 2π]
    structure: Vec<T>,
}

impl<T: Scalar> Smoother<T> {
    pub fn new(f: &FunctionSpec<T>, quad: &QuadratureSpec) -> Result<Self> {
        quad.validate()?;
        let step = T::PI() / T::from_index(MESH_CELLS);
        let single = quad.with_subpanels(1);
        let eval = |t: T| f.value(t);
        let cells: Vec<T> = (0..MESH_CELLS)
            .into_par_iter()
            .map(|i| {
                let lo = step * T::from_index(i);
                let hi = if i + 1 == MESH_CELLS { T::PI() } else { step * T::from_index(i + 1) };
                integrate_fn(&eval, Features::of(f), lo, hi, &single, None)
            })
            .collect::<Result<Vec<T>>>()?;
        let mut cumulative = Vec::with_capacity(MESH_CELLS + 1);
        cumulative.push(T::zero());
        let mut acc = crate::CompensatedSum::new();
        for c in cells {
            acc.add(c);
            cumulative.push(acc.value());
        }
        let two_pi = T::lit(2.0) * T::PI();
        let mut structure = Vec::new();
        for &s in f.breakpoints().iter().chain(f.singular_points()).chain(&[T::zero(), T::PI()]) {
            structure.extend([s, -s, two_pi - s]);
        }
        Ok(Self {
            f: f.clone(),
            step,
            cumulative,
            rule: GaussLegendre::new(quad.order)?,
            quad: *quad,
            structure,
        })
    }

    fn has_structure_in(&self, lo: T, hi: T) -> bool {
        self.f
            .breakpoints()
            .iter()
            .chain(self.f.singular_points())
            .any(|&s| s >= lo && s <= hi)
    }

    /// `F(x) = ∫_0^x f` for `x ∈ [0, π]`.
    pub fn primitive(&self, x: T) -> T {
        let i = (x / self.step).floor().to_usize().unwrap_or(0).min(MESH_CELLS);
        let base = self.step * T::from_index(i);
        if x <= base {
            return self.cumulative[i];
        }
        let eval = |t: T| self.f.value(t);
        let part = if self.has_structure_in(base, x) {
            integrate_fn(&eval, Features::of(&self.f), base, x, &self.quad.with_subpanels(1), None)
                .unwrap_or(T::nan())
        } else {
            self.rule.panel(&eval, base, x).unwrap_or(T::nan())
        };
        self.cumulative[i] + part
    }

    /// Primitive of the even reflection, valid on `[−π, 2π]`.
    pub fn reflected_primitive(&self, y: T) -> T {
        let pi = T::PI();
        if y < T::zero() {
            -self.primitive(-y)
        } else if y > pi {
            T::lit(2.0) * self.cumulative[MESH_CELLS] - self.primitive(T::lit(2.0) * pi - y)
        } else {
            self.primitive(y)
        }
    }

    pub fn reflected_value(&self, y: T) -> T {
        let pi = T::PI();
        if y < T::zero() {
            self.f.value(-y)
        } else if y > pi {
            self.f.value(T::lit(2.0) * pi - y)
        } else {
            self.f.value(y)
        }
    }

    /// `f_h(x)`.
    pub fn average(&self, x: T, h: T) -> T {
        let half = T::lit(0.5) * h;
        (self.reflected_primitive(x + half) - self.reflected_primitive(x - half)) / h
    }

    /// `f_h'(x)`.
    pub fn average_slope(&self, x: T, h: T) -> T {
        let half = T::lit(0.5) * h;
        (self.reflected_value(x + half) - self.reflected_value(x - half)) / h
    }

    /// `(f_h)_h(x)`: the average of `f_h` over the window.
    pub fn double_average(&self, x: T, h: T) -> T {
        let half = T::lit(0.5) * h;
        let (lo, hi) = (x - half, x + half);
        let mut cuts = vec![lo];
        let mut inner: Vec<T> = self
            .structure
            .iter()
            .flat_map(|&s| [s - half, s + half])
            .filter(|&c| c > lo && c < hi)
            .collect();
        inner.sort_by(|a, b| a.partial_cmp(b).expect("finite cuts"));
        cuts.extend(inner);
        cuts.push(hi);
        let g = |t: T| self.average(t, h);
        let mut acc = crate::CompensatedSum::new();
        for w in cuts.windows(2) {
            acc.add(self.rule.panel(&g, w[0], w[1]).unwrap_or(T::nan()));
        }
        acc.value() / h
    }

    /// Derivative of the double average.
    pub fn double_average_slope(&self, x: T, h: T) -> T {
        let half = T::lit(0.5) * h;
        (self.average(x + half, h) - self.average(x - half, h)) / h
    }

    fn kinks(&self, h: T, double: bool) -> Vec<T> {
        let half = T::lit(0.5) * h;
        let offsets: Vec<T> = if double { vec![-h, -half, T::zero(), half, h] } else { vec![-half, T::zero(), half] };
        let mut out: Vec<T> = self
            .structure
            .iter()
            .flat_map(|&s| offsets.iter().map(move |&o| s + o))
            .filter(|&c| c > T::zero() && c < T::PI())
            .collect();
        out.sort_by(|a, b| a.partial_cmp(b).expect("finite kinks"));
        out.dedup();
        out
    }
}

/// Residual and derivative terms of every candidate bandwidth.
#[derive(Debug, Clone, PartialEq)]
pub struct KSweep<T> {
    pub bandwidths: Vec<T>,
    pub residuals: Vec<T>,
    pub slopes: Vec<T>,
    /// Whether the double average was used.
    pub double: bool,
}

impl<T: Scalar> KSweep<T> {
    /// `min_h ‖f − g_h‖_p + δ‖g_h'‖_∞` over the sweep.
    pub fn upper(&self, delta: T) -> T {
        self.residuals
            .iter()
            .zip(&self.slopes)
            .map(|(&r, &s)| if delta == T::zero() { r } else { r + delta * s })
            .filter(|v| v.is_finite())
            .fold(T::infinity(), T::min)
    }

    /// Bandwidth attaining [`KSweep::upper`].
    pub fn best_bandwidth(&self, delta: T) -> T {
        let mut best = (T::infinity(), self.bandwidths[0]);
        for ((&r, &s), &h) in self.residuals.iter().zip(&self.slopes).zip(&self.bandwidths) {
            let v = if delta == T::zero() { r } else { r + delta * s };
            if v < best.0 {
                best = (v, h);
            }
        }
        best.1
    }
}

/// Evaluates every candidate once so the bound can be read off for many `δ`.
pub fn k_functional_sweep<T: Scalar>(
    f: &FunctionSpec<T>,
    p: T,
    quad: &QuadratureSpec,
    grid: &Grid<T>,
) -> Result<KSweep<T>> {
    check_exponent(p)?;
    if !f.in_lp(p.as_f64()) {
        return Err(Error::InvalidArgument(format!("`{}` is not in L^{p}", f.name())));
    }
    let smoother = Smoother::new(f, quad)?;
    let double = !f.singular_points().is_empty();
    let resolution = T::PI() / T::lit(RESIDUAL_PANELS);
    let mut sweep = KSweep { bandwidths: vec![], residuals: vec![], slopes: vec![], double };
    for j in BANDWIDTH_EXPONENTS {
        let h = T::PI() * T::lit(2f64.powi(-j));
        let kinks = smoother.kinks(h, double);
        let features = Features { name: f.name(), breakpoints: &kinks, singular: f.singular_points(), resolution: f.resolution() };
        let residual_integrand = |x: T| {
            let smooth = if double { smoother.double_average(x, h) } else { smoother.average(x, h) };
            let d = (f.value(x) - smooth).abs();
            if p == T::one() {
                d
            } else {
                d.powf(p)
            }
        };
        let residual = integrate_fn(&residual_integrand, features, T::zero(), T::PI(), quad, Some(resolution))?
            .max(T::zero())
            .powf(p.recip());
        let slope = grid
            .points()
            .par_iter()
            .map(|&x| {
                let s = if double { smoother.double_average_slope(x, h) } else { smoother.average_slope(x, h) };
                s.abs()
            })
            .reduce(T::zero, |a, b| if a.is_nan() || b.is_nan() { T::nan() } else { a.max(b) });
        sweep.bandwidths.push(h);
        sweep.residuals.push(residual);
        sweep.slopes.push(slope);
    }
    Ok(sweep)
}

/// Upper bound on `K_p(f, δ)` from the moving-average sweep.
pub fn k_functional_upper<T: Scalar>(
    f: &FunctionSpec<T>,
    delta: T,
    p: T,
    quad: &QuadratureSpec,
    grid: &Grid<T>,
) -> Result<T> {
    if !(delta >= T::zero()) {
        return Err(Error::InvalidArgument(format!("K-functional needs delta >= 0, got {delta}")));
    }
    Ok(k_functional_sweep(f, p, quad, grid)?.upper(delta))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::corpus::corpus_get;

    fn setup() -> (QuadratureSpec, Grid<f64>) {
        (QuadratureSpec::default(), Grid::default_full())
    }

    #[test]
    fn smoother_primitive_matches_closed_form() {
        let (quad, _) = setup();
        for name in ["sine", "kink", "step", "root_singular"] {
            let f = corpus_get::<f64>(name).unwrap();
            let s = Smoother::new(&f, &quad).unwrap();
            for x in [0.1, 1.0, PI / 2.0, 2.5, PI] {
                let exact = f.closed_form_integral(0.0, x).unwrap();
                assert!((s.primitive(x) - exact).abs() < 1e-10, "{name} at {x}");
            }
        }
    }

    #[test]
    fn zero_delta_is_small_for_lipschitz_members() {
        let (quad, grid) = setup();
        for name in ["sine", "kink", "hat_narrow", "linear"] {
            let f = corpus_get::<f64>(name).unwrap();
            let k = k_functional_upper(&f, 0.0, 1.0, &quad, &grid).unwrap();
            assert!(k <= 1e-3, "{name}: {k}");
        }
    }

    #[test]
    fn smooth_member_is_bounded_by_derivative() {
        let (quad, grid) = setup();
        let sine = corpus_get::<f64>("sine").unwrap();
        let sweep = k_functional_sweep(&sine, 2.0, &quad, &grid).unwrap();
        for delta in [1e-4, 1e-2, 0.3] {
            assert!(sweep.upper(delta) <= delta + 1e-3);
        }
    }

    #[test]
    fn step_tracks_square_root_optimum() {
        let (quad, grid) = setup();
        let step = corpus_get::<f64>("step").unwrap();
        let sweep = k_functional_sweep(&step, 1.0, &quad, &grid).unwrap();
        for delta in [1e-4, 1e-3, 1e-2, 1e-1] {
            let k = sweep.upper(delta);
            assert!(k <= 1.25 * (2.0 * delta).sqrt(), "delta={delta} k={k}");
        }
    }

    #[test]
    fn unbounded_member_uses_double_average() {
        let (quad, grid) = setup();
        let root = corpus_get::<f64>("root_singular").unwrap();
        let sweep = k_functional_sweep(&root, 2.0, &quad, &grid).unwrap();
        assert!(sweep.double);
        assert!(sweep.slopes.iter().all(|s| s.is_finite()));
        let k = sweep.upper(0.01);
        assert!(k.is_finite() && k > 0.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let (quad, grid) = setup();
        let sine = corpus_get::<f64>("sine").unwrap();
        assert!(k_functional_upper(&sine, 0.1, 0.5, &quad, &grid).is_err());
        assert!(k_functional_upper(&sine, -0.1, 1.0, &quad, &grid).is_err());
        let root = corpus_get::<f64>("root_singular").unwrap();
        assert!(k_functional_upper(&root, 0.1, 4.0, &quad, &grid).is_err());
    }
}
