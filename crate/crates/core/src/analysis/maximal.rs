use rayon::prelude::*;

use crate::corpus::FunctionSpec;
use crate::kernels::NodeSet;
use crate::numerics::{integrate_fn, Features, Grid, QuadratureSpec};
use crate::operators::grunwald_kantorovich;
use crate::{Error, Result, Scalar};

/// Largest grid the quadratic scan accepts.
pub const MAX_MAXIMAL_GRID: usize = 4096;
/// Denominator floor in [`maximal_ratio`].
pub const MAXIMAL_FLOOR: f64 = 1e-12;

/// Hardy–Littlewood maximal function restricted to grid-aligned intervals.
pub fn maximal_function<T: Scalar>(f: &FunctionSpec<T>, grid: &Grid<T>) -> Result<Vec<T>> {
    maximal_function_with(f, grid, &QuadratureSpec::default())
}

pub fn maximal_function_with<T: Scalar>(
    f: &FunctionSpec<T>,
    grid: &Grid<T>,
    quad: &QuadratureSpec,
) -> Result<Vec<T>> {
    let n = grid.len();
    if n > MAX_MAXIMAL_GRID {
        return Err(Error::InvalidGrid(format!(
            "maximal function scans O(N^2) pairs; N={n} exceeds {MAX_MAXIMAL_GRID}"
        )));
    }
    let pts = grid.points();
    let abs = |t: T| f.value(t).abs();
    let single = quad.with_subpanels(1);
    let cells: Vec<T> = (0..n - 1)
        .into_par_iter()
        .map(|i| {
            integrate_fn(&abs, Features::of(f), pts[i], pts[i + 1], &single, None).map_err(|e| match e {
                Error::Divergent { .. } => {
                    Error::QuadratureFailure { detail: e.to_string(), panel: None }
                }
                other => other,
            })
        })
        .collect::<Result<Vec<T>>>()?;
    let mut prefix = Vec::with_capacity(n);
    prefix.push(T::zero());
    let mut acc = crate::CompensatedSum::new();
    for c in &cells {
        acc.add(*c);
        prefix.push(acc.value());
    }

    // For a fixed left end i, best[m] = max over right ends j >= max(m, i+1);
    // interval [i, j] contains m exactly when i <= m <= j.
    let merged = (0..n - 1)
        .into_par_iter()
        .fold(
            || (vec![T::zero(); n], vec![T::zero(); n]),
            |(mut mf, mut best), i| {
                best[n - 1] = (prefix[n - 1] - prefix[i]) / (pts[n - 1] - pts[i]);
                for j in (i + 1..n - 1).rev() {
                    let avg = (prefix[j] - prefix[i]) / (pts[j] - pts[i]);
                    best[j] = best[j + 1].max(avg);
                }
                mf[i] = mf[i].max(best[i + 1]);
                for m in i + 1..n {
                    mf[m] = mf[m].max(best[m]);
                }
                (mf, best)
            },
        )
        .map(|(mf, _)| mf)
        .reduce(
            || vec![T::zero(); n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x = x.max(y);
                }
                a
            },
        );
    Ok(merged)
}

/// `max |GK_n f(θ)| / max(Mf(θ), floor)` over the grid points in `[ε, π − ε]`.
///
/// The maximal function is taken over intervals of the whole grid, so `grid`
/// should span `[0, π]`; only the ratio is restricted to the interior.
pub fn maximal_ratio<T: Scalar>(
    n: usize,
    f: &FunctionSpec<T>,
    eps: T,
    grid: &Grid<T>,
    quad: &QuadratureSpec,
) -> Result<T> {
    if !(eps > T::zero() && eps < T::FRAC_PI_2()) {
        return Err(Error::InvalidArgument(format!("eps {eps} outside (0, pi/2)")));
    }
    let nodes = NodeSet::new(n)?;
    let gk = grunwald_kantorovich(&nodes, f, quad)?;
    let mf = maximal_function_with(f, grid, quad)?;
    let floor = T::lit(MAXIMAL_FLOOR);
    let hi = T::PI() - eps;
    let ratio = grid
        .points()
        .par_iter()
        .zip(mf.par_iter())
        .filter(|(&t, _)| t >= eps && t <= hi)
        .map(|(&t, &m)| gk.eval_unchecked(t).abs() / m.max(floor))
        .reduce(T::zero, T::max);
    Ok(ratio)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use approx::assert_abs_diff_eq;

    use super::*;
    use crate::analysis::modulus;
    use crate::corpus::corpus_get;

    #[test]
    fn constant_maximal_function() {
        let grid = Grid::<f64>::full(513).unwrap();
        let one = corpus_get::<f64>("const_one").unwrap();
        let mf = maximal_function(&one, &grid).unwrap();
        assert!(mf.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn indicator_decays_like_a_over_x() {
        let a = 1.0;
        let grid = Grid::<f64>::full(1025).unwrap();
        let ind = FunctionSpec::new("indicator", move |t: f64| if t <= a { 1.0 } else { 0.0 }).with_breakpoints(vec![a]);
        let mf = maximal_function(&ind, &grid).unwrap();
        let h = grid.step();
        for (&x, &m) in grid.points().iter().zip(&mf) {
            if x > a + h {
                assert!((m - a / x).abs() <= 2.0 * h * (a / x), "x={x} m={m}");
            }
        }
    }

    #[test]
    fn dominates_continuous_values() {
        let grid = Grid::<f64>::full(1025).unwrap();
        for name in ["sine", "kink", "rough"] {
            let f = corpus_get::<f64>(name).unwrap();
            let mf = maximal_function(&f, &grid).unwrap();
            let w = modulus(&f, grid.step(), &grid).unwrap();
            for (&x, &m) in grid.points().iter().zip(&mf) {
                assert!(m >= f.value(x).abs() - w - 1e-12, "{name} at {x}");
            }
        }
    }

    #[test]
    fn singular_member_is_integrable() {
        let grid = Grid::<f64>::full(257).unwrap();
        let root = corpus_get::<f64>("root_singular").unwrap();
        let mf = maximal_function(&root, &grid).unwrap();
        // best interval for x is at least [0, x]
        let x = grid.points()[100];
        assert!(mf[100] >= 4.0 / 3.0 * x.powf(-0.25) - 1e-9);
    }

    #[test]
    fn oversized_grid_is_rejected() {
        let grid = Grid::<f64>::full(4097).unwrap();
        let one = corpus_get::<f64>("const_one").unwrap();
        assert!(matches!(maximal_function(&one, &grid), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn constant_ratio_is_one() {
        let grid = Grid::<f64>::full(1025).unwrap();
        let one = corpus_get::<f64>("const_one").unwrap();
        for n in [4usize, 32] {
            let r = maximal_ratio(n, &one, 0.3, &grid, &QuadratureSpec::default()).unwrap();
            assert_abs_diff_eq!(r, 1.0, epsilon = 1e-8);
        }
        assert!(maximal_ratio(4, &one, 2.0, &grid, &QuadratureSpec::default()).is_err());
        let _ = PI;
    }
}
