use std::collections::VecDeque;

use crate::corpus::FunctionSpec;
use crate::numerics::{sample, Grid};
use crate::{Error, Result, Scalar};

/// `ω(f, δ)` over grid pairs with `|x − y| <= δ`.
pub fn modulus<T: Scalar>(f: &FunctionSpec<T>, delta: T, grid: &Grid<T>) -> Result<T> {
    if !(delta > T::zero()) {
        return Err(Error::InvalidArgument(format!("modulus needs delta > 0, got {delta}")));
    }
    if delta > grid.b() - grid.a() {
        return Err(Error::InvalidArgument(format!(
            "delta {delta} exceeds the interval length {}",
            grid.b() - grid.a()
        )));
    }
    let values = sample(f, grid)?;
    Ok(modulus_of_samples(&values, grid.step(), delta))
}

/// Sliding-window `max − min` over windows spanning at most `delta`.
pub fn modulus_of_samples<T: Scalar>(values: &[T], step: T, delta: T) -> T {
    let lag = lag_for(step, delta).min(values.len().saturating_sub(1));
    if lag == 0 {
        return T::zero();
    }
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut best = T::zero();
    for (i, &v) in values.iter().enumerate() {
        while maxq.back().is_some_and(|&j| values[j] <= v) {
            maxq.pop_back();
        }
        maxq.push_back(i);
        while minq.back().is_some_and(|&j| values[j] >= v) {
            minq.pop_back();
        }
        minq.push_back(i);
        let start = i.saturating_sub(lag);
        while maxq.front().is_some_and(|&j| j < start) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&j| j < start) {
            minq.pop_front();
        }
        let spread = values[maxq[0]] - values[minq[0]];
        best = best.max(spread);
    }
    best
}

fn lag_for<T: Scalar>(step: T, delta: T) -> usize {
    (delta / step * (T::one() + T::lit(1e-12))).floor().to_usize().unwrap_or(0)
}

/// Moduli of one sampled function at every lag up to a maximum, with linear
/// interpolation between lags.
#[derive(Debug, Clone)]
pub struct ModulusTable<T> {
    step: T,
    // cumulative[l] = ω(l · step); cumulative[0] = 0
    cumulative: Vec<T>,
}

impl<T: Scalar> ModulusTable<T> {
    pub fn new(values: &[T], step: T, max_delta: T) -> Self {
        let max_lag = ((max_delta / step).ceil().to_usize().unwrap_or(1) + 1).min(values.len() - 1).max(1);
        let mut cumulative = Vec::with_capacity(max_lag + 1);
        cumulative.push(T::zero());
        let mut running = T::zero();
        for lag in 1..=max_lag {
            let widest = values
                .iter()
                .zip(&values[lag..])
                .fold(T::zero(), |m, (&a, &b)| m.max((b - a).abs()));
            running = running.max(widest);
            cumulative.push(running);
        }
        Self { step, cumulative }
    }

    /// `ω(δ)`, linear between tabulated lags and constant past the last one.
    pub fn eval(&self, delta: T) -> T {
        if delta <= T::zero() {
            return T::zero();
        }
        let t = delta / self.step;
        let j = t.floor().to_usize().unwrap_or(usize::MAX);
        let last = self.cumulative.len() - 1;
        if j >= last {
            return self.cumulative[last];
        }
        let frac = t - T::from_index(j);
        self.cumulative[j] + frac * (self.cumulative[j + 1] - self.cumulative[j])
    }
}
