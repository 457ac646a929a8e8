use crate::kernels::NodeSet;
use crate::numerics::{check_exponent, integrate_fn, Features, QuadratureSpec};
use crate::{Result, Scalar};

/// `(∫_0^π |θ − θ_k|^p |S_{k,n}(θ)|^p dθ)^{1/p}`.
pub fn prop_norm_i<T: Scalar>(n: usize, k: usize, p: T, quad: &QuadratureSpec) -> Result<T> {
    kernel_moment(n, k, p, true, quad)
}

/// `(∫_0^π |S_{k,n}(θ)|^p dθ)^{1/p}`.
pub fn prop_norm_ii<T: Scalar>(n: usize, k: usize, p: T, quad: &QuadratureSpec) -> Result<T> {
    kernel_moment(n, k, p, false, quad)
}

fn kernel_moment<T: Scalar>(n: usize, k: usize, p: T, weighted: bool, quad: &QuadratureSpec) -> Result<T> {
    check_exponent(p)?;
    let nodes = NodeSet::<T>::new(n)?;
    let tk = nodes.theta(k)?;
    let h = nodes.half_step();
    // The two shifted copies of P_k peak at θ_k ∓ h; cut there and at
    // geometrically closer points so the panels follow the peaks.
    let mut cuts = vec![tk];
    for centre in [tk - h, tk + h] {
        cuts.push(centre);
        let mut d = h / T::lit(2.0);
        for _ in 0..4 {
            cuts.push(centre - d);
            cuts.push(centre + d);
            d = d / T::lit(4.0);
        }
    }
    cuts.retain(|&c| c > T::zero() && c < T::PI());
    let integrand = |theta: T| {
        let s = nodes.kernel(k, theta).expect("index checked").abs();
        let v = if weighted { (theta - tk).abs() * s } else { s };
        if p == T::one() {
            v
        } else {
            v.powf(p)
        }
    };
    let features = Features { name: "kernel_moment", breakpoints: &cuts, singular: &[], resolution: None };
    let total = integrate_fn(&integrand, features, T::zero(), T::PI(), quad, Some(h / T::lit(2.0)))?;
    Ok(total.powf(p.recip()))
}
