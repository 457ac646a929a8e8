//! Chebyshev angles, fundamental polynomials and the averaged Grünwald kernels.
//!
//! All evaluation stays in θ-space. The fundamental polynomial
//!
//! ```text
//! P_k(θ) = (−1)^{k+1} cos(nθ) sin θ_k / (n (cos θ − cos θ_k))
//! ```
//!
//! is a polynomial in `x = cos θ`, so it extends to every real θ and its only
//! removable singularities sit where `cos θ = cos θ_k`. Inside the guard
//! `|cos θ − cos θ_k| < Scalar::SINGULAR_GUARD` the value comes from the
//! expansion `P_k ≈ 1 + cos θ_k / (2 sin² θ_k) · (cos θ − cos θ_k)`, which
//! follows from the Chebyshev differential equation at a root of `T_n`.

use rayon::prelude::*;

use crate::numerics::Grid;
use crate::{CompensatedSum, Error, Result, Scalar};

/// Which kernel family a Lebesgue function is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// Raw Lagrange fundamental polynomials `P_k`.
    Lagrange,
    /// Averaged kernels `S_{k,n}`.
    Grunwald,
}

/// Below this the difference of cosines is recomputed as a product of sines.
const CANCELLATION_ZONE: f64 = 1e-3;

/// The `n` Chebyshev angles of degree `n`, with cached trigonometric values.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSet<T> {
    n: usize,
    thetas: Vec<T>,
    cos: Vec<T>,
    // (−1)^{k+1} sin θ_k / n
    scale: Vec<T>,
    // cos θ_k / (2 sin² θ_k)
    slope: Vec<T>,
}

/// Builds the Chebyshev angles `θ_k = (2k−1)π/(2n)`, `k = 1..n`.
pub fn chebyshev_nodes<T: Scalar>(n: usize) -> Result<NodeSet<T>> {
    NodeSet::new(n)
}

impl<T: Scalar> NodeSet<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDegree(n));
        }
        let mut thetas = Vec::with_capacity(n);
        let mut cos = Vec::with_capacity(n);
        let mut scale = Vec::with_capacity(n);
        let mut slope = Vec::with_capacity(n);
        let nf = T::from_index(n);
        for k in 1..=n {
            let theta = node_angle::<T>(n, k);
            let (s, c) = theta.sin_cos();
            let sign = if k % 2 == 1 { T::one() } else { -T::one() };
            thetas.push(theta);
            cos.push(c);
            scale.push(sign * s / nf);
            slope.push(c / (T::lit(2.0) * s * s));
        }
        Ok(Self { n, thetas, cos, scale, slope })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Angles in ascending order; `thetas()[k-1]` is `θ_k`.
    pub fn thetas(&self) -> &[T] {
        &self.thetas
    }

    /// `θ_k` for a 1-based index.
    pub fn theta(&self, k: usize) -> Result<T> {
        self.check_index(k)?;
        Ok(self.thetas[k - 1])
    }

    /// Half the node spacing, `π/(2n)`.
    pub fn half_step(&self) -> T {
        T::PI() / (T::lit(2.0) * T::from_index(self.n))
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.n {
            Err(Error::IndexOutOfRange { k, n: self.n })
        } else {
            Ok(())
        }
    }

    #[inline]
    fn fundamental_at(&self, idx: usize, theta: T, cos_nt: T, cos_t: T) -> T {
        let mut diff = cos_t - self.cos[idx];
        if diff.abs() < T::lit(CANCELLATION_ZONE) {
            let half = T::lit(0.5);
            let tk = self.thetas[idx];
            diff = -T::lit(2.0) * ((theta + tk) * half).sin() * ((theta - tk) * half).sin();
        }
        if diff.abs() < T::SINGULAR_GUARD {
            T::one() + self.slope[idx] * diff
        } else {
            self.scale[idx] * cos_nt / diff
        }
    }

    /// `P_k(θ)` for a 1-based index.
    pub fn fundamental(&self, k: usize, theta: T) -> Result<T> {
        self.check_index(k)?;
        let cos_nt = (T::from_index(self.n) * theta).cos();
        Ok(self.fundamental_at(k - 1, theta, cos_nt, theta.cos()))
    }

    /// `S_{k,n}(θ)` for a 1-based index.
    pub fn kernel(&self, k: usize, theta: T) -> Result<T> {
        self.check_index(k)?;
        let h = self.half_step();
        let nf = T::from_index(self.n);
        let (up, down) = (theta + h, theta - h);
        let p_up = self.fundamental_at(k - 1, up, (nf * up).cos(), up.cos());
        let p_down = self.fundamental_at(k - 1, down, (nf * down).cos(), down.cos());
        Ok(T::lit(0.5) * (p_up + p_down))
    }

    /// Writes `P_1(θ), …, P_n(θ)` into `out`.
    pub fn fundamental_row(&self, theta: T, out: &mut [T]) {
        assert_eq!(out.len(), self.n, "row buffer must have length n");
        let cos_nt = (T::from_index(self.n) * theta).cos();
        let cos_t = theta.cos();
        for (idx, slot) in out.iter_mut().enumerate() {
            *slot = self.fundamental_at(idx, theta, cos_nt, cos_t);
        }
    }

    /// Writes `S_{1,n}(θ), …, S_{n,n}(θ)` into `out`.
    pub fn kernel_row(&self, theta: T, out: &mut [T]) {
        assert_eq!(out.len(), self.n, "row buffer must have length n");
        let h = self.half_step();
        let nf = T::from_index(self.n);
        let (up, down) = (theta + h, theta - h);
        let (cn_up, c_up) = ((nf * up).cos(), up.cos());
        let (cn_down, c_down) = ((nf * down).cos(), down.cos());
        let half = T::lit(0.5);
        for (idx, slot) in out.iter_mut().enumerate() {
            let a = self.fundamental_at(idx, up, cn_up, c_up);
            let b = self.fundamental_at(idx, down, cn_down, c_down);
            *slot = half * (a + b);
        }
    }

    /// Fills `out` with the row of the requested kernel family.
    pub fn row(&self, kind: KernelKind, theta: T, out: &mut [T]) {
        match kind {
            KernelKind::Lagrange => self.fundamental_row(theta, out),
            KernelKind::Grunwald => self.kernel_row(theta, out),
        }
    }

    /// `Σ_k coeffs[k−1] · kernel_k(θ)`, accumulated in ascending k.
    pub fn combine(&self, kind: KernelKind, coeffs: &[T], theta: T) -> T {
        assert_eq!(coeffs.len(), self.n, "one coefficient per node");
        let nf = T::from_index(self.n);
        let mut acc = CompensatedSum::new();
        match kind {
            KernelKind::Lagrange => {
                let (cn, c) = ((nf * theta).cos(), theta.cos());
                for (idx, &a) in coeffs.iter().enumerate() {
                    acc.add(a * self.fundamental_at(idx, theta, cn, c));
                }
            }
            KernelKind::Grunwald => {
                let h = self.half_step();
                let (up, down) = (theta + h, theta - h);
                let (cn_up, c_up) = ((nf * up).cos(), up.cos());
                let (cn_down, c_down) = ((nf * down).cos(), down.cos());
                let half = T::lit(0.5);
                for (idx, &a) in coeffs.iter().enumerate() {
                    let s = half
                        * (self.fundamental_at(idx, up, cn_up, c_up)
                            + self.fundamental_at(idx, down, cn_down, c_down));
                    acc.add(a * s);
                }
            }
        }
        acc.value()
    }

    /// `Σ_k |kernel_k(θ)|`, accumulated in ascending k.
    pub fn lebesgue_function(&self, theta: T, kind: KernelKind) -> T {
        let mut row = vec![T::zero(); self.n];
        self.lebesgue_function_with(theta, kind, &mut row)
    }

    fn lebesgue_function_with(&self, theta: T, kind: KernelKind, row: &mut [T]) -> T {
        self.row(kind, theta, row);
        let mut acc = CompensatedSum::new();
        for v in row.iter() {
            acc.add(v.abs());
        }
        acc.value()
    }

    /// Maximum of the Lebesgue function over the grid points.
    pub fn lebesgue_constant(&self, kind: KernelKind, grid: &Grid<T>) -> Result<T> {
        if grid.is_empty() {
            return Err(Error::InvalidGrid("empty grid".into()));
        }
        let best = grid
            .points()
            .par_iter()
            .map_init(
                || vec![T::zero(); self.n],
                |row, &theta| self.lebesgue_function_with(theta, kind, row),
            )
            .reduce(|| T::neg_infinity(), T::max);
        Ok(best)
    }
}

/// `θ_k = (2k−1)π/(2n)` without building a node set.
#[inline]
pub fn node_angle<T: Scalar>(n: usize, k: usize) -> T {
    T::from_index(2 * k - 1) * T::PI() / T::from_index(2 * n)
}

/// `P_k(θ)` of degree `n`.
pub fn eval_fundamental<T: Scalar>(n: usize, k: usize, theta: T) -> Result<T> {
    single(n, k)?.fundamental(1, theta)
}

/// `S_{k,n}(θ) = ½{P_k(θ + π/2n) + P_k(θ − π/2n)}`.
pub fn eval_kernel<T: Scalar>(n: usize, k: usize, theta: T) -> Result<T> {
    let one = single(n, k)?;
    let h = T::PI() / (T::lit(2.0) * T::from_index(n));
    let nf = T::from_index(n);
    let (up, down) = (theta + h, theta - h);
    let a = one.fundamental_at(0, up, (nf * up).cos(), up.cos());
    let b = one.fundamental_at(0, down, (nf * down).cos(), down.cos());
    Ok(T::lit(0.5) * (a + b))
}

// A one-node view of degree n holding only θ_k, so single evaluations skip
// the O(n) setup.
fn single<T: Scalar>(n: usize, k: usize) -> Result<NodeSet<T>> {
    if n == 0 {
        return Err(Error::InvalidDegree(n));
    }
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { k, n });
    }
    let theta = node_angle::<T>(n, k);
    let (s, c) = theta.sin_cos();
    let sign = if k % 2 == 1 { T::one() } else { -T::one() };
    Ok(NodeSet {
        n,
        thetas: vec![theta],
        cos: vec![c],
        scale: vec![sign * s / T::from_index(n)],
        slope: vec![c / (T::lit(2.0) * s * s)],
    })
}

/// `Σ_k |P_k(θ)|` or `Σ_k |S_{k,n}(θ)|` for degree `n`.
pub fn lebesgue_function<T: Scalar>(n: usize, theta: T, kind: KernelKind) -> Result<T> {
    Ok(NodeSet::new(n)?.lebesgue_function(theta, kind))
}

/// Grid maximum of the Lebesgue function for degree `n`.
pub fn lebesgue_constant<T: Scalar>(n: usize, kind: KernelKind, grid: &Grid<T>) -> Result<T> {
    NodeSet::new(n)?.lebesgue_constant(kind, grid)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{PI, SQRT_2};

    use approx::assert_abs_diff_eq;

    use super::*;

    #[test]
    fn nodes_small_degrees() {
        let one = chebyshev_nodes::<f64>(1).unwrap();
        assert_abs_diff_eq!(one.thetas()[0], PI / 2.0, epsilon = 1e-15);
        let two = chebyshev_nodes::<f64>(2).unwrap();
        assert_abs_diff_eq!(two.thetas()[0], PI / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(two.thetas()[1], 3.0 * PI / 4.0, epsilon = 1e-15);
        assert_eq!(chebyshev_nodes::<f64>(0), Err(Error::InvalidDegree(0)));
    }

    #[test]
    fn nodes_are_symmetric_and_increasing() {
        for n in [1usize, 2, 3, 7, 64, 513] {
            let nodes = chebyshev_nodes::<f64>(n).unwrap();
            let t = nodes.thetas();
            for k in 0..n {
                assert!(t[k] > 0.0 && t[k] < PI);
                assert_abs_diff_eq!(t[k] + t[n - 1 - k], PI, epsilon = 1e-13);
                if k > 0 {
                    assert!(t[k] > t[k - 1]);
                }
            }
        }
    }

    #[test]
    fn degree_one_fundamental_is_identically_one() {
        for theta in [-1.0, 0.0, 0.3, PI / 2.0, 2.9, PI, 4.0] {
            assert_abs_diff_eq!(eval_fundamental(1, 1, theta).unwrap(), 1.0, epsilon = 1e-15);
            assert_abs_diff_eq!(eval_kernel(1, 1, theta).unwrap(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn hand_evaluated_values() {
        assert_abs_diff_eq!(eval_fundamental(2, 1, 0.0).unwrap(), (SQRT_2 + 1.0) / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eval_kernel(2, 1, PI / 4.0).unwrap(), (2.0 + SQRT_2) / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eval_kernel(2, 2, PI / 4.0).unwrap(), (2.0 - SQRT_2) / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(
            lebesgue_function(2, PI / 4.0, KernelKind::Grunwald).unwrap(),
            1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn index_errors() {
        assert_eq!(eval_fundamental::<f64>(3, 0, 0.1), Err(Error::IndexOutOfRange { k: 0, n: 3 }));
        assert_eq!(eval_kernel::<f64>(3, 4, 0.1), Err(Error::IndexOutOfRange { k: 4, n: 3 }));
        let nodes = chebyshev_nodes::<f64>(3).unwrap();
        assert!(nodes.kernel(4, 0.2).is_err());
    }

    #[test]
    fn cardinal_property() {
        for n in [1usize, 2, 5, 16, 33, 128] {
            let nodes = chebyshev_nodes::<f64>(n).unwrap();
            let mut row = vec![0.0; n];
            for j in 0..n {
                nodes.fundamental_row(nodes.thetas()[j], &mut row);
                for (k, v) in row.iter().enumerate() {
                    let expected = if k == j { 1.0 } else { 0.0 };
                    assert!((v - expected).abs() <= 1e-10, "n={n} j={j} k={k} v={v}");
                }
            }
        }
    }

    #[test]
    fn guard_is_continuous() {
        // Approach each node from inside and just outside the guard.
        let eps = f64::SINGULAR_GUARD;
        for n in [3usize, 17, 200] {
            let nodes = chebyshev_nodes::<f64>(n).unwrap();
            for k in [1, n / 2 + 1, n] {
                let tk = nodes.theta(k).unwrap();
                let step = 2.0 * eps / tk.sin();
                for sign in [-1.0, 1.0] {
                    let outside = nodes.fundamental(k, tk + sign * step).unwrap();
                    // first-order limit evaluated at the same displacement
                    let diff = (tk + sign * step).cos() - tk.cos();
                    let limit = 1.0 + tk.cos() / (2.0 * tk.sin().powi(2)) * diff;
                    assert!(((outside - limit) / limit).abs() < 1e-6, "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn shifted_arguments_hit_mirror_singularities() {
        // θ = 0 shifts to −θ_1 and θ = π shifts to 2π − θ_n.
        for n in [2usize, 9, 64] {
            let sum_at = |theta: f64| -> f64 {
                (1..=n).map(|k| eval_kernel(n, k, theta).unwrap()).sum()
            };
            assert_abs_diff_eq!(sum_at(0.0), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(sum_at(PI), 1.0, epsilon = 1e-12);
            assert!(eval_kernel(n, 1, 0.0_f64).unwrap().is_finite());
        }
    }

    #[test]
    fn lebesgue_constants_for_degree_one() {
        let grid = Grid::<f64>::uniform(0.0, PI, 257).unwrap();
        for kind in [KernelKind::Lagrange, KernelKind::Grunwald] {
            assert_abs_diff_eq!(lebesgue_constant(1, kind, &grid).unwrap(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn lagrange_lebesgue_constant_near_classical_asymptotic() {
        let grid = Grid::<f64>::uniform(0.0, PI, 8193).unwrap();
        let lam = lebesgue_constant(32, KernelKind::Lagrange, &grid).unwrap();
        let corridor = 2.0 / PI * 32f64.ln() + 0.96;
        assert!((lam / corridor - 1.0).abs() < 0.1, "lambda={lam}");
    }

    #[test]
    fn single_precision_partition_of_unity() {
        let nodes = chebyshev_nodes::<f32>(24).unwrap();
        let mut row = vec![0.0f32; 24];
        for i in 0..=100 {
            let theta = std::f32::consts::PI * i as f32 / 100.0;
            nodes.kernel_row(theta, &mut row);
            let s: f32 = row.iter().sum();
            assert!((s - 1.0).abs() < 1e-4, "theta={theta} sum={s}");
        }
    }
}
