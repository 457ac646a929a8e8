//! The three operator families built on Chebyshev nodes.
//!
//! * Lagrange `L_n(f)(θ) = Σ f(θ_k) P_k(θ)`
//! * Grünwald `G_n(f)(θ) = Σ f(θ_k) S_{k,n}(θ)`
//! * Grünwald–Kantorovich `GK_n(f)(θ) = Σ a_k S_{k,n}(θ)` with panel means
//!   `a_k = (2n/π) ∫_{θ_k}^{θ_k+π/2n} f`.
//!
//! Each is represented by an [`Approximant`]: the node set plus one
//! coefficient per node, so that the O(n) coefficient work happens once and
//! evaluation on a grid costs O(n) per point.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rayon::prelude::*;

use crate::corpus::{FunctionSpec, Smoothness};
use crate::kernels::{KernelKind, NodeSet};
use crate::numerics::{integrate, lp_norm_resolved, Grid, QuadratureSpec, WeightSpec};
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    Lagrange,
    Grunwald,
    GrunwaldKantorovich,
}

impl OperatorKind {
    pub fn kernel(self) -> KernelKind {
        match self {
            OperatorKind::Lagrange => KernelKind::Lagrange,
            OperatorKind::Grunwald | OperatorKind::GrunwaldKantorovich => KernelKind::Grunwald,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            OperatorKind::Lagrange => "L",
            OperatorKind::Grunwald => "G",
            OperatorKind::GrunwaldKantorovich => "GK",
        }
    }
}

/// Panel means `a_k = (2n/π) ∫_{θ_k}^{θ_k+π/2n} f`.
#[derive(Debug, Clone, PartialEq)]
pub struct KantorovichMeans<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Scalar> KantorovichMeans<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

/// The averaging panel `[θ_k, θ_k + π/2n]` for a 1-based index.
pub fn panel<T: Scalar>(nodes: &NodeSet<T>, k: usize) -> Result<(T, T)> {
    let lo = nodes.theta(k)?;
    let hi = if k == nodes.n() { T::PI() } else { lo + nodes.half_step() };
    Ok((lo, hi))
}

pub fn kantorovich_means<T: Scalar>(
    nodes: &NodeSet<T>,
    f: &FunctionSpec<T>,
    quad: &QuadratureSpec,
) -> Result<KantorovichMeans<T>> {
    quad.validate()?;
    let n = nodes.n();
    let scale = T::lit(2.0) * T::from_index(n) / T::PI();
    let values = (1..=n)
        .into_par_iter()
        .map(|k| {
            let (lo, hi) = panel(nodes, k)?;
            integrate(f, lo, hi, quad)
                .map(|v| scale * v)
                .map_err(|e| match e {
                    Error::QuadratureFailure { detail, .. } => {
                        Error::QuadratureFailure { detail, panel: Some(k) }
                    }
                    Error::Divergent { .. } => {
                        Error::QuadratureFailure { detail: e.to_string(), panel: Some(k) }
                    }
                    other => other,
                })
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(KantorovichMeans { n, values })
}

/// An operator applied to one function: nodes plus one coefficient per node.
#[derive(Debug, Clone)]
pub struct Approximant<T> {
    kind: OperatorKind,
    nodes: Arc<NodeSet<T>>,
    coeffs: Arc<[T]>,
    source: String,
}

fn check_angle<T: Scalar>(theta: T) -> Result<()> {
    if theta >= T::zero() && theta <= T::PI() {
        Ok(())
    } else {
        Err(Error::OutOfDomain { theta: theta.as_f64() })
    }
}

fn samples<T: Scalar>(nodes: &NodeSet<T>, f: &FunctionSpec<T>) -> Result<Vec<T>> {
    nodes.thetas().iter().map(|&t| f.eval(t)).collect()
}

/// `L_n f`.
pub fn lagrange<T: Scalar>(nodes: &NodeSet<T>, f: &FunctionSpec<T>) -> Result<Approximant<T>> {
    Ok(Approximant::new(OperatorKind::Lagrange, nodes, samples(nodes, f)?, f.name()))
}

/// `G_n f`.
pub fn grunwald<T: Scalar>(nodes: &NodeSet<T>, f: &FunctionSpec<T>) -> Result<Approximant<T>> {
    Ok(Approximant::new(OperatorKind::Grunwald, nodes, samples(nodes, f)?, f.name()))
}

/// `GK_n f`.
pub fn grunwald_kantorovich<T: Scalar>(
    nodes: &NodeSet<T>,
    f: &FunctionSpec<T>,
    quad: &QuadratureSpec,
) -> Result<Approximant<T>> {
    let means = kantorovich_means(nodes, f, quad)?;
    Ok(Approximant::from_means(nodes, &means, f.name()))
}

pub fn lagrange_apply<T: Scalar>(nodes: &NodeSet<T>, f: &FunctionSpec<T>, theta: T) -> Result<T> {
    check_angle(theta)?;
    lagrange(nodes, f)?.eval(theta)
}

pub fn grunwald_apply<T: Scalar>(nodes: &NodeSet<T>, f: &FunctionSpec<T>, theta: T) -> Result<T> {
    check_angle(theta)?;
    grunwald(nodes, f)?.eval(theta)
}

pub fn gk_apply<T: Scalar>(
    nodes: &NodeSet<T>,
    f: &FunctionSpec<T>,
    theta: T,
    quad: &QuadratureSpec,
) -> Result<T> {
    check_angle(theta)?;
    grunwald_kantorovich(nodes, f, quad)?.eval(theta)
}

impl<T: Scalar> Approximant<T> {
    pub fn new(kind: OperatorKind, nodes: &NodeSet<T>, coeffs: Vec<T>, source: &str) -> Self {
        assert_eq!(coeffs.len(), nodes.n(), "one coefficient per node");
        Self {
            kind,
            nodes: Arc::new(nodes.clone()),
            coeffs: coeffs.into(),
            source: source.to_string(),
        }
    }

    pub fn from_means(nodes: &NodeSet<T>, means: &KantorovichMeans<T>, source: &str) -> Self {
        Self::new(OperatorKind::GrunwaldKantorovich, nodes, means.values.clone(), source)
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.nodes.n()
    }

    pub fn nodes(&self) -> &NodeSet<T> {
        &self.nodes
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coeffs
    }

    pub fn name(&self) -> String {
        format!("{}_{}({})", self.kind.label(), self.nodes.n(), self.source)
    }

    pub fn eval(&self, theta: T) -> Result<T> {
        check_angle(theta)?;
        Ok(self.eval_unchecked(theta))
    }

    /// Evaluation without the `[0, π]` check; the kernels extend analytically.
    #[inline]
    pub fn eval_unchecked(&self, theta: T) -> T {
        self.nodes.combine(self.kind.kernel(), &self.coeffs, theta)
    }

    pub fn eval_grid(&self, grid: &Grid<T>) -> Vec<T> {
        grid.points().par_iter().map(|&t| self.eval_unchecked(t)).collect()
    }

    /// The approximant as a smooth corpus-style function.
    pub fn to_function(&self) -> FunctionSpec<T> {
        let this = self.clone();
        FunctionSpec::new(self.name(), move |t| this.eval_unchecked(t))
            .with_smoothness(Smoothness::Analytic)
            .with_resolution(self.resolution())
    }

    /// Panel width that resolves the kernel oscillations of this degree.
    pub fn resolution(&self) -> T {
        self.nodes.half_step() / T::lit(2.0)
    }

    /// Grid maximum of `|A(θ) − f(θ)|`.
    pub fn sup_error(&self, f: &FunctionSpec<T>, grid: &Grid<T>) -> Result<T> {
        let errs: Vec<T> = grid
            .points()
            .par_iter()
            .map(|&t| Ok((self.eval_unchecked(t) - f.eval(t)?).abs()))
            .collect::<Result<Vec<T>>>()?;
        Ok(errs.into_iter().fold(T::zero(), T::max))
    }

    /// `‖A − f‖_{p,w}` on `[a, b]`.
    pub fn lp_error(
        &self,
        f: &FunctionSpec<T>,
        p: T,
        a: T,
        b: T,
        weight: &WeightSpec<T>,
        quad: &QuadratureSpec,
    ) -> Result<T> {
        let diff = f.minus(&self.to_function());
        lp_norm_resolved(&diff, p, a, b, weight, quad, Some(self.resolution()))
    }

    /// `‖A‖_{p,w}` on `[a, b]`.
    pub fn lp_norm(&self, p: T, a: T, b: T, weight: &WeightSpec<T>, quad: &QuadratureSpec) -> Result<T> {
        lp_norm_resolved(&self.to_function(), p, a, b, weight, quad, Some(self.resolution()))
    }
}

/// Sup-grid errors of `GK_n` on the test functions `1, θ, θ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KorovkinProbe<T> {
    pub e0: T,
    pub e1: T,
    pub e2: T,
}

pub fn korovkin_probe<T: Scalar>(n: usize, grid: &Grid<T>, quad: &QuadratureSpec) -> Result<KorovkinProbe<T>> {
    let nodes = NodeSet::new(n)?;
    let mut errs = [T::zero(); 3];
    for (slot, name) in errs.iter_mut().zip(["const_one", "linear", "square"]) {
        let g = crate::corpus::corpus_get(name)?;
        *slot = grunwald_kantorovich(&nodes, &g, quad)?.sup_error(&g, grid)?;
    }
    Ok(KorovkinProbe { e0: errs[0], e1: errs[1], e2: errs[2] })
}

type MeansKey = (usize, String, QuadratureSpec);

/// Shared panel means keyed by `(n, function name, quadrature)`.
///
/// Function names identify functions, so custom functions must carry unique names.
#[derive(Debug, Default)]
pub struct MeansCache<T> {
    inner: RwLock<HashMap<MeansKey, Arc<KantorovichMeans<T>>>>,
}

impl<T: Scalar> MeansCache<T> {
    pub fn new() -> Self {
        Self { inner: RwLock::new(HashMap::new()) }
    }

    pub fn get_or_compute(
        &self,
        nodes: &NodeSet<T>,
        f: &FunctionSpec<T>,
        quad: &QuadratureSpec,
    ) -> Result<Arc<KantorovichMeans<T>>> {
        let key = (nodes.n(), f.name().to_string(), *quad);
        if let Some(hit) = self.inner.read().expect("means cache poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let fresh = Arc::new(kantorovich_means(nodes, f, quad)?);
        let mut guard = self.inner.write().expect("means cache poisoned");
        Ok(guard.entry(key).or_insert(fresh).clone())
    }

    pub fn len(&self) -> usize {
        self.inner.read().expect("means cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{PI, SQRT_2};

    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::corpus::corpus_get;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn lagrange_reproduces_constants_and_cosine() {
        let five = FunctionSpec::new("five", |_t: f64| 5.0);
        let cosine = corpus_get::<f64>("cosine").unwrap();
        for n in [1usize, 2, 7, 40] {
            let nodes = NodeSet::new(n).unwrap();
            for theta in [0.0, 0.4, 1.7, PI] {
                assert_abs_diff_eq!(lagrange_apply(&nodes, &five, theta).unwrap(), 5.0, epsilon = 1e-11);
                if n >= 2 {
                    assert_abs_diff_eq!(
                        lagrange_apply(&nodes, &cosine, theta).unwrap(),
                        theta.cos(),
                        epsilon = 1e-10
                    );
                }
            }
            let sine = corpus_get::<f64>("sine").unwrap();
            for &t in nodes.thetas() {
                assert_abs_diff_eq!(lagrange_apply(&nodes, &sine, t).unwrap(), t.sin(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn grunwald_small_degrees() {
        let sine = corpus_get::<f64>("sine").unwrap();
        let one = NodeSet::new(1).unwrap();
        for theta in [0.0, 1.0, PI] {
            assert_abs_diff_eq!(grunwald_apply(&one, &sine, theta).unwrap(), 1.0, epsilon = 1e-15);
        }
        let two = NodeSet::new(2).unwrap();
        let lin = corpus_get::<f64>("linear").unwrap();
        let expected = (2.0 + SQRT_2) / 4.0 * (PI / 4.0) + (2.0 - SQRT_2) / 4.0 * (3.0 * PI / 4.0);
        assert_abs_diff_eq!(grunwald_apply(&two, &lin, PI / 4.0).unwrap(), expected, epsilon = 1e-14);
    }

    #[test]
    fn means_of_constants_and_identity() {
        let one = corpus_get::<f64>("const_one").unwrap();
        let lin = corpus_get::<f64>("linear").unwrap();
        for n in [1usize, 3, 16, 101] {
            let nodes = NodeSet::new(n).unwrap();
            let m1 = kantorovich_means(&nodes, &one, &quad()).unwrap();
            assert_eq!(m1.values().len(), n);
            assert!(m1.values().iter().all(|v| (v - 1.0).abs() <= 1e-12));
            let ml = kantorovich_means(&nodes, &lin, &quad()).unwrap();
            for (k, v) in ml.values().iter().enumerate() {
                let expected = nodes.thetas()[k] + PI / (4.0 * n as f64);
                assert_abs_diff_eq!(*v, expected, epsilon = 1e-12);
            }
        }
        let nodes = NodeSet::new(1).unwrap();
        assert_abs_diff_eq!(gk_apply(&nodes, &lin, 0.2, &quad()).unwrap(), 3.0 * PI / 4.0, epsilon = 1e-13);
    }

    #[test]
    fn gk_reproduces_constants() {
        let one = corpus_get::<f64>("const_one").unwrap();
        for n in [1usize, 2, 9, 64, 257] {
            let nodes = NodeSet::new(n).unwrap();
            let gk = grunwald_kantorovich(&nodes, &one, &quad()).unwrap();
            for theta in [0.0, 0.01, 1.0, 2.2, PI] {
                assert_abs_diff_eq!(gk.eval(theta).unwrap(), 1.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn angles_outside_domain_are_rejected() {
        let nodes = NodeSet::new(4).unwrap();
        let sine = corpus_get::<f64>("sine").unwrap();
        assert!(matches!(gk_apply(&nodes, &sine, -0.1, &quad()), Err(Error::OutOfDomain { .. })));
        assert!(matches!(lagrange_apply(&nodes, &sine, 3.2), Err(Error::OutOfDomain { .. })));
        assert!(grunwald_apply(&nodes, &sine, f64::NAN).is_err());
    }

    #[test]
    fn evaluator_failure_surfaces() {
        let bad = FunctionSpec::new("holey", |t: f64| if (t - PI / 2.0).abs() < 1e-9 { f64::NAN } else { t });
        let nodes = NodeSet::new(1).unwrap();
        assert!(matches!(lagrange_apply(&nodes, &bad, 0.3), Err(Error::FunctionDomain { .. })));
    }

    #[test]
    fn quadrature_failure_names_the_panel() {
        let bad = FunctionSpec::new("blows_up", |t: f64| if t > 3.0 { f64::INFINITY } else { 1.0 });
        let nodes = NodeSet::new(4).unwrap();
        match kantorovich_means(&nodes, &bad, &quad()) {
            Err(Error::QuadratureFailure { panel, .. }) => assert_eq!(panel, Some(4)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn piecewise_constant_means_are_reproduced() {
        let nodes = NodeSet::<f64>::new(12).unwrap();
        let sine = corpus_get::<f64>("sine").unwrap();
        let means = kantorovich_means(&nodes, &sine, &quad()).unwrap();
        let (thetas, vals) = (nodes.thetas().to_vec(), means.values().to_vec());
        let h = nodes.half_step();
        let mut cuts = Vec::new();
        for &t in &thetas {
            cuts.push(t);
            cuts.push(t + h);
        }
        let pc = FunctionSpec::new("panel_constant", move |t: f64| {
            thetas
                .iter()
                .zip(&vals)
                .find(|(&lo, _)| t >= lo && t <= lo + h)
                .map(|(_, &v)| v)
                .unwrap_or(0.0)
        })
        .with_breakpoints(cuts);
        let gk_pc = grunwald_kantorovich(&nodes, &pc, &quad()).unwrap();
        let gk = Approximant::from_means(&nodes, &means, "sine");
        for theta in [0.0, 0.5, 1.5, 2.5, PI] {
            assert_abs_diff_eq!(gk_pc.eval(theta).unwrap(), gk.eval(theta).unwrap(), epsilon = 1e-12);
        }
    }

    #[test]
    fn korovkin_probe_constant_is_exact() {
        let grid = Grid::<f64>::full(1025).unwrap();
        let probe = korovkin_probe(16, &grid, &quad()).unwrap();
        assert!(probe.e0 <= 1e-10);
        assert!(probe.e1 > 0.0 && probe.e2 > 0.0);
    }

    #[test]
    fn means_cache_shares_results() {
        let cache = MeansCache::<f64>::new();
        let nodes = NodeSet::new(8).unwrap();
        let sine = corpus_get::<f64>("sine").unwrap();
        let a = cache.get_or_compute(&nodes, &sine, &quad()).unwrap();
        let b = cache.get_or_compute(&nodes, &sine, &quad()).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(cache.len(), 1);
    }
}
