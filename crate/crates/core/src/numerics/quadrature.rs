use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use crate::corpus::FunctionSpec;
use crate::{CompensatedSum, Error, Result, Scalar};

/// Composite Gauss–Legendre configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadratureSpec {
    /// Gauss–Legendre points per panel.
    pub order: usize,
    /// Panels per breakpoint-free segment.
    pub subpanels: usize,
    /// Split the integration range at the integrand's breakpoints.
    pub split_at_breakpoints: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { order: 16, subpanels: 4, split_at_breakpoints: true }
    }
}

impl QuadratureSpec {
    pub fn new(order: usize, subpanels: usize) -> Result<Self> {
        let spec = Self { order, subpanels, split_at_breakpoints: true };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 2 {
            return Err(Error::InvalidArgument(format!("quadrature order {} < 2", self.order)));
        }
        if self.subpanels < 1 {
            return Err(Error::InvalidArgument("quadrature needs at least one subpanel".into()));
        }
        Ok(())
    }

    pub fn with_subpanels(self, subpanels: usize) -> Self {
        Self { subpanels, ..self }
    }
}

/// Levels of geometric grading toward a singular endpoint.
pub const GRADING_LEVELS: usize = 20;
/// A level-to-level ratio at or above this is treated as divergence.
const DIVERGENCE_RATIO: f64 = 0.95;
const PARALLEL_PANELS: usize = 64;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

fn legendre_table(order: usize) -> Arc<Vec<(f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    guard.entry(order).or_insert_with(|| Arc::new(newton_legendre(order))).clone()
}

// Roots of P_order by Newton from the Chebyshev-like initial guesses.
fn newton_legendre(order: usize) -> Vec<(f64, f64)> {
    let m = order as f64;
    let mut pairs = Vec::with_capacity(order);
    for i in 0..order {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=order {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let p = if order == 1 { x } else { p1 };
            let prev = if order == 1 { 1.0 } else { p0 };
            dp = m * (x * p - prev) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        pairs.push((x, w));
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite nodes"));
    pairs
}

impl<T: Scalar> GaussLegendre<T> {
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidArgument(format!("quadrature order {order} < 2")));
        }
        let table = legendre_table(order);
        Ok(Self {
            nodes: table.iter().map(|&(x, _)| T::lit(x)).collect(),
            weights: table.iter().map(|&(_, w)| T::lit(w)).collect(),
        })
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Single-panel rule on `[a, b]`; `None` if any sample is non-finite.
    #[inline]
    pub fn panel<F: Fn(T) -> T>(&self, g: &F, a: T, b: T) -> std::result::Result<T, T> {
        let half = T::lit(0.5) * (b - a);
        let mid = T::lit(0.5) * (a + b);
        let mut acc = CompensatedSum::new();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let t = mid + half * x;
            let v = g(t);
            if !v.is_finite() {
                return Err(t);
            }
            acc.add(w * v);
        }
        Ok(half * acc.value())
    }
}

/// Structural features of an integrand that drive panel layout.
#[derive(Debug, Clone, Copy)]
pub struct Features<'a, T> {
    pub name: &'a str,
    pub breakpoints: &'a [T],
    pub singular: &'a [T],
    /// Widest admissible panel, if the integrand oscillates.
    pub resolution: Option<T>,
}

impl<'a, T: Scalar> Features<'a, T> {
    pub fn of(f: &'a FunctionSpec<T>) -> Self {
        Self { name: f.name(), breakpoints: f.breakpoints(), singular: f.singular_points(), resolution: f.resolution() }
    }

    pub fn smooth(name: &'a str) -> Self {
        Self { name, breakpoints: &[], singular: &[], resolution: None }
    }
}

#[derive(Debug, Clone, Copy)]
enum Grading {
    None,
    Left,
    Right,
}

fn near<T: Scalar>(x: T, y: T) -> bool {
    (x - y).abs() <= T::lit(64.0) * T::epsilon() * (T::one() + x.abs())
}

/// Composite rule for an arbitrary closure on `[a, b]` (no domain check).
///
/// The range is split at `features.breakpoints` (when requested), every
/// segment gets `max(quad.subpanels, ⌈len/resolution⌉)` panels, and panels
/// touching a singular point are graded geometrically toward it.
pub fn integrate_fn<T, F>(
    g: &F,
    features: Features<'_, T>,
    a: T,
    b: T,
    quad: &QuadratureSpec,
    resolution: Option<T>,
) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> T + Sync,
{
    quad.validate()?;
    if !(a < b) {
        if a == b {
            return Ok(T::zero());
        }
        return Err(Error::InvalidArgument(format!("integration bounds a={a} >= b={b}")));
    }
    let rule = GaussLegendre::<T>::new(quad.order)?;
    let resolution = crate::corpus::finer(resolution, features.resolution);

    let mut cuts = vec![a];
    if quad.split_at_breakpoints {
        let mut inner: Vec<T> = features
            .breakpoints
            .iter()
            .chain(features.singular)
            .copied()
            .filter(|&t| t > a && t < b && !near(t, a) && !near(t, b))
            .collect();
        inner.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
        inner.dedup_by(|x, y| near(*x, *y));
        cuts.extend(inner);
    }
    cuts.push(b);

    let mut panels: Vec<(T, T, Grading)> = Vec::new();
    for seg in cuts.windows(2) {
        let (lo, hi) = (seg[0], seg[1]);
        let len = hi - lo;
        let mut count = quad.subpanels;
        if let Some(res) = resolution {
            let want = (len / res).ceil().to_usize().unwrap_or(count);
            count = count.max(want);
        }
        let width = len / T::from_index(count);
        for i in 0..count {
            let p0 = lo + width * T::from_index(i);
            let p1 = if i + 1 == count { hi } else { lo + width * T::from_index(i + 1) };
            let left = features.singular.iter().any(|&s| near(s, p0));
            let right = features.singular.iter().any(|&s| near(s, p1));
            let grading = match (left, right) {
                (true, _) => Grading::Left,
                (false, true) => Grading::Right,
                _ => Grading::None,
            };
            panels.push((p0, p1, grading));
        }
    }

    let eval_panel = |&(p0, p1, grading): &(T, T, Grading)| -> Result<T> {
        match grading {
            Grading::None => rule.panel(g, p0, p1).map_err(|t| failure(features.name, t)),
            Grading::Left => graded(&rule, g, features.name, p0, p1, true),
            Grading::Right => graded(&rule, g, features.name, p0, p1, false),
        }
    };

    let values: Vec<Result<T>> = if panels.len() >= PARALLEL_PANELS {
        panels.par_iter().map(eval_panel).collect()
    } else {
        panels.iter().map(eval_panel).collect()
    };
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v?);
    }
    Ok(acc.value())
}

fn failure<T: Scalar>(name: &str, t: T) -> Error {
    Error::QuadratureFailure {
        detail: format!("integrand `{name}` is not finite at {t}"),
        panel: None,
    }
}

// Geometric grading toward one endpoint with a geometric tail estimate for
// the innermost piece.
fn graded<T: Scalar, F: Fn(T) -> T>(
    rule: &GaussLegendre<T>,
    g: &F,
    name: &str,
    p0: T,
    p1: T,
    toward_left: bool,
) -> Result<T> {
    let width = p1 - p0;
    let two = T::lit(2.0);
    let mut levels = Vec::with_capacity(GRADING_LEVELS);
    let mut outer = width;
    for _ in 0..GRADING_LEVELS {
        let inner = outer / two;
        let (lo, hi) = if toward_left {
            (p0 + inner, p0 + outer)
        } else {
            (p1 - outer, p1 - inner)
        };
        levels.push(rule.panel(g, lo, hi).map_err(|t| failure(name, t))?);
        outer = inner;
    }
    let last = levels[GRADING_LEVELS - 1];
    let prev = levels[GRADING_LEVELS - 2];
    let mut acc = CompensatedSum::new();
    for &v in levels.iter().rev() {
        acc.add(v);
    }
    let total = acc.value();
    let ratio = if prev != T::zero() { last / prev } else { T::zero() };
    let ratio = if ratio.is_finite() { ratio } else { T::zero() };
    if ratio >= T::lit(DIVERGENCE_RATIO) && last.abs() > T::lit(1e-14) * total.abs() {
        return Err(Error::Divergent {
            at: if toward_left { p0.as_f64() } else { p1.as_f64() },
            ratio: ratio.as_f64(),
        });
    }
    let tail = if ratio > T::zero() && ratio < T::one() {
        last * ratio / (T::one() - ratio)
    } else {
        T::zero()
    };
    Ok(total + tail)
}

/// `∫_a^b f` for `0 <= a < b <= π` by composite Gauss–Legendre.
pub fn integrate<T: Scalar>(f: &FunctionSpec<T>, a: T, b: T, quad: &QuadratureSpec) -> Result<T> {
    check_range(a, b)?;
    let eval = |t: T| f.value(t);
    integrate_fn(&eval, Features::of(f), a, b, quad, None)
}

pub(crate) fn check_range<T: Scalar>(a: T, b: T) -> Result<()> {
    if !(a >= T::zero() && b <= T::PI()) {
        return Err(Error::InvalidArgument(format!("bounds [{a}, {b}] leave [0, pi]")));
    }
    if !(a < b) {
        return Err(Error::InvalidArgument(format!("integration bounds a={a} >= b={b}")));
    }
    Ok(())
}

/// Roots of `g` on `[a, b]` located by a uniform scan with `probes` cells
/// followed by bisection.
pub fn sign_changes<T: Scalar, F: Fn(T) -> T>(g: &F, a: T, b: T, probes: usize) -> Vec<T> {
    let probes = probes.max(1);
    let step = (b - a) / T::from_index(probes);
    let mut roots = Vec::new();
    let mut x0 = a;
    let mut g0 = g(a);
    for i in 1..=probes {
        let x1 = if i == probes { b } else { a + step * T::from_index(i) };
        let g1 = g(x1);
        if g0 == T::zero() {
            if i > 1 {
                roots.push(x0);
            }
        } else if g0 * g1 < T::zero() {
            let (mut lo, mut hi, mut glo) = (x0, x1, g0);
            for _ in 0..200 {
                let mid = T::lit(0.5) * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let gm = g(mid);
                if gm == T::zero() {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (gm < T::zero()) == (glo < T::zero()) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            roots.push(T::lit(0.5) * (lo + hi));
        }
        x0 = x1;
        g0 = g1;
    }
    roots
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::corpus::{corpus_get, FunctionSpec};

    #[test]
    fn legendre_rule_is_exact_to_degree_2m_minus_1() {
        let rule = GaussLegendre::<f64>::new(16).unwrap();
        let w: f64 = rule.weights().iter().sum();
        assert_abs_diff_eq!(w, 2.0, epsilon = 1e-14);
        let v = rule.panel(&|t: f64| t.powi(31), 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(v, 1.0 / 32.0, epsilon = 1e-14);
        let v = rule.panel(&|t: f64| t.powi(30), -1.0, 1.0).unwrap();
        assert_abs_diff_eq!(v, 2.0 / 31.0, epsilon = 1e-14);
    }

    #[test]
    fn textbook_integrals() {
        let quad = QuadratureSpec::default();
        let sine = corpus_get::<f64>("sine").unwrap();
        assert_abs_diff_eq!(integrate(&sine, 0.0, PI, &quad).unwrap(), 2.0, epsilon = 1e-12);
        let lin = corpus_get::<f64>("linear").unwrap();
        assert_abs_diff_eq!(
            integrate(&lin, PI / 2.0, PI, &quad).unwrap(),
            3.0 * PI * PI / 8.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn singular_endpoint_is_graded() {
        let quad = QuadratureSpec::default();
        let root = corpus_get::<f64>("root_singular").unwrap();
        let exact = 4.0 / 3.0 * PI.powf(0.75);
        assert_abs_diff_eq!(integrate(&root, 0.0, PI, &quad).unwrap(), exact, epsilon = 1e-10);
    }

    #[test]
    fn divergence_is_reported() {
        let quad = QuadratureSpec::default();
        let inv = FunctionSpec::new("inverse", |t: f64| 1.0 / t).with_singular_points(vec![0.0]);
        assert!(matches!(integrate(&inv, 0.0, 1.0, &quad), Err(Error::Divergent { .. })));
    }

    #[test]
    fn non_finite_integrand_fails() {
        let quad = QuadratureSpec::default();
        let bad = FunctionSpec::new("bad", |t: f64| if t > 0.5 { f64::NAN } else { 1.0 });
        assert!(matches!(integrate(&bad, 0.0, 1.0, &quad), Err(Error::QuadratureFailure { .. })));
    }

    #[test]
    fn jump_is_split() {
        let quad = QuadratureSpec::default();
        let step = corpus_get::<f64>("step").unwrap();
        assert_abs_diff_eq!(integrate(&step, 0.0, PI, &quad).unwrap(), PI / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn roots_by_bisection() {
        let roots = sign_changes(&|t: f64| (3.0 * t).cos(), 0.0, PI, 64);
        assert_eq!(roots.len(), 3);
        for (r, k) in roots.iter().zip([1.0, 3.0, 5.0]) {
            assert_abs_diff_eq!(*r, k * PI / 6.0, epsilon = 1e-13);
        }
    }
}
