use rayon::prelude::*;

use super::modulus::ModulusTable;
use crate::corpus::FunctionSpec;
use crate::kernels::NodeSet;
use crate::numerics::{sample, Grid, QuadratureSpec};
use crate::operators::grunwald_kantorovich;
use crate::{Error, Result, Scalar};

/// Errors at or below this are treated as exact reproduction.
pub const ENVELOPE_ZERO: f64 = 1e-10;

/// Smallest constant `C` with `|GK_n f − f| <= C · envelope` on the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeFit<T> {
    pub constant: T,
    /// Grid angle attaining the constant (0 when the error vanishes).
    pub worst_theta: T,
    pub max_error: T,
}

/// Fits the pointwise envelope
/// `ω(f∘arccos, sin θ / n) + ω(f∘arccos, 1/n²) + ω(f, π/n)`
/// where the first two moduli are measured on a uniform `x = cos θ` grid of
/// the same size as `grid`.
pub fn envelope_check<T: Scalar>(
    n: usize,
    f: &FunctionSpec<T>,
    grid: &Grid<T>,
    quad: &QuadratureSpec,
) -> Result<EnvelopeFit<T>> {
    if !f.is_continuous() {
        return Err(Error::InvalidArgument(format!("envelope needs a continuous function, `{}` is not", f.name())));
    }
    let nodes = NodeSet::new(n)?;
    let gk = grunwald_kantorovich(&nodes, f, quad)?;
    let theta_values = sample(f, grid)?;
    let approx = gk.eval_grid(grid);

    let nf = T::from_index(n);
    let x_modulus = XModulus::new(f, grid.len(), n)?;
    let theta_table = ModulusTable::new(&theta_values, grid.step(), T::PI() / nf + grid.step());
    let fixed = x_modulus.eval(nf.powi(2).recip()) + theta_table.eval(T::PI() / nf);

    let zero = T::lit(ENVELOPE_ZERO);
    let per_point: Vec<Result<(T, T, T)>> = grid
        .points()
        .par_iter()
        .zip(theta_values.par_iter().zip(approx.par_iter()))
        .map(|(&theta, (&fv, &av))| {
            let err = (av - fv).abs();
            if err <= zero {
                return Ok((T::zero(), theta, err));
            }
            let env = x_modulus.eval(theta.sin() / nf) + fixed;
            if env <= T::zero() {
                return Err(Error::EnvelopeDegenerate { theta: theta.as_f64(), error: err.as_f64() });
            }
            Ok((err / env, theta, err))
        })
        .collect();
    let mut fit = EnvelopeFit { constant: T::zero(), worst_theta: T::zero(), max_error: T::zero() };
    for item in per_point {
        let (c, theta, err) = item?;
        fit.max_error = fit.max_error.max(err);
        if c > fit.constant {
            fit.constant = c;
            fit.worst_theta = theta;
        }
    }
    Ok(fit)
}

// Modulus of `f∘arccos` on `[−1, 1]`. A uniform grid with as many points as
// the angle grid resolves lags down to `2/(N − 1)`, which is coarser than
// `1/n²` once `n` is moderate, so lags below one coarse step come from a
// second table on a grid with step at most `1/(4n²)`.
struct XModulus<T> {
    coarse: ModulusTable<T>,
    fine: Option<ModulusTable<T>>,
    coarse_step: T,
}

impl<T: Scalar> XModulus<T> {
    fn new(f: &FunctionSpec<T>, count: usize, n: usize) -> Result<Self> {
        let nf = T::from_index(n);
        let coarse_step = T::lit(2.0) / T::from_index(count - 1);
        let coarse = ModulusTable::new(&x_samples(f, count)?, coarse_step, nf.recip() + coarse_step);
        let fine_count = 8 * n * n + 1;
        let fine = if fine_count > count {
            let fine_step = T::lit(2.0) / T::from_index(fine_count - 1);
            Some(ModulusTable::new(&x_samples(f, fine_count)?, fine_step, coarse_step + fine_step))
        } else {
            None
        };
        Ok(Self { coarse, fine, coarse_step })
    }

    fn eval(&self, delta: T) -> T {
        match &self.fine {
            Some(fine) if delta < self.coarse_step => fine.eval(delta),
            _ => self.coarse.eval(delta),
        }
    }
}

fn x_samples<T: Scalar>(f: &FunctionSpec<T>, count: usize) -> Result<Vec<T>> {
    let step = T::lit(2.0) / T::from_index(count - 1);
    (0..count)
        .into_par_iter()
        .map(|j| {
            let x = (-T::one() + step * T::from_index(j)).max(-T::one()).min(T::one());
            f.eval(x.acos())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::corpus_get;

    #[test]
    fn constant_has_zero_constant() {
        let grid = Grid::<f64>::full(2049).unwrap();
        let one = corpus_get::<f64>("const_one").unwrap();
        let fit = envelope_check(16, &one, &grid, &QuadratureSpec::default()).unwrap();
        assert_eq!(fit.constant, 0.0);
        assert!(fit.max_error <= 1e-10);
    }

    #[test]
    fn discontinuous_input_rejected() {
        let grid = Grid::<f64>::full(257).unwrap();
        let step = corpus_get::<f64>("step").unwrap();
        assert!(envelope_check(8, &step, &grid, &QuadratureSpec::default()).is_err());
    }

    #[test]
    fn sine_constant_is_moderate() {
        let grid = Grid::<f64>::full(2049).unwrap();
        let sine = corpus_get::<f64>("sine").unwrap();
        let fit = envelope_check(16, &sine, &grid, &QuadratureSpec::default()).unwrap();
        assert!(fit.constant > 0.0 && fit.constant < 10.0, "{fit:?}");
    }
}
