use std::f64::consts::PI;

use gklab::kernels::{eval_fundamental, KernelKind, NodeSet};
use gklab::Grid;
use proptest::prelude::*;

#[test]
fn partition_of_unity_on_default_grid() {
    let grid = Grid::default_full();
    for n in (1..=16).chain([100, 1024]) {
        let nodes = NodeSet::<f64>::new(n).unwrap();
        let ones = vec![1.0; n];
        let worst = grid
            .points()
            .iter()
            .map(|&t| (nodes.combine(KernelKind::Grunwald, &ones, t) - 1.0).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-8, "n={n} worst={worst}");
    }
}

#[test]
fn cardinal_property() {
    for n in [1, 2, 3, 7, 64, 255, 256] {
        let nodes = NodeSet::<f64>::new(n).unwrap();
        for j in 1..=n {
            let tj = nodes.theta(j).unwrap();
            for k in 1..=n {
                let want = if j == k { 1.0 } else { 0.0 };
                let got = eval_fundamental(n, k, tj).unwrap();
                assert!((got - want).abs() <= 1e-10, "n={n} k={k} j={j} got={got}");
            }
        }
    }
}

#[test]
fn lagrange_lebesgue_grows_like_two_over_pi_log() {
    // Λ_n ≈ (2/π) ln n + 0.9625 for Chebyshev nodes
    let grid = Grid::full(8193).unwrap();
    let lam = |n: usize| NodeSet::<f64>::new(n).unwrap().lebesgue_constant(KernelKind::Lagrange, &grid).unwrap();
    let slope = (lam(256) - lam(16)) / (256f64 / 16.0).ln();
    assert!((slope - 2.0 / PI).abs() < 0.02, "slope={slope}");
    let g = |n: usize| NodeSet::<f64>::new(n).unwrap().lebesgue_constant(KernelKind::Grunwald, &grid).unwrap();
    assert!(g(256) < 1.5 && g(16) < 1.5);
}

proptest! {
    #[test]
    fn kernel_symmetry(n in 1usize..80, k_frac in 0.0f64..1.0, theta in 0.0f64..PI) {
        let k = 1 + ((n as f64 - 1.0) * k_frac).round() as usize;
        let nodes = NodeSet::<f64>::new(n).unwrap();
        let a = nodes.kernel(k, theta).unwrap();
        let b = nodes.kernel(n + 1 - k, PI - theta).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "a={} b={}", a, b);
    }

    #[test]
    fn partition_of_unity_random(n in 1usize..400, theta in 0.0f64..PI) {
        let nodes = NodeSet::<f64>::new(n).unwrap();
        let ones = vec![1.0; n];
        prop_assert!((nodes.combine(KernelKind::Grunwald, &ones, theta) - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn guard_is_continuous(n in 2usize..200, k_frac in 0.0f64..1.0) {
        let k = 1 + ((n as f64 - 1.0) * k_frac).round() as usize;
        let nodes = NodeSet::<f64>::new(n).unwrap();
        let tk = nodes.theta(k).unwrap();
        let sk = tk.sin();
        // |cos θ − cos θ_k| ≈ sin θ_k · |θ − θ_k|, so these offsets straddle the guard
        for scale in [0.5, 2.0] {
            let off = scale * 1e-8 / sk;
            for t in [tk - off, tk + off] {
                let v = nodes.fundamental(k, t).unwrap();
                // dP_k/dθ at θ_k is −cot(θ_k)/2 (Chebyshev ODE); the quadratic
                // term is O(n² off²), below the tolerance at these offsets
                let linear = 1.0 - 0.5 * tk.cos() / sk * (t - tk);
                prop_assert!((v - linear).abs() <= 1e-6, "n={} k={} v={} linear={}", n, k, v, linear);
            }
        }
    }
}
