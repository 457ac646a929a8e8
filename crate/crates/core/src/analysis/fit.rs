use crate::{Error, Result, Scalar};

/// Least-squares line through `(x, y)` observations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination; 1 when the observations are constant.
    pub r_squared: f64,
    pub points_used: usize,
}

impl RateFit {
    /// Predicted `y` at `x` on the fitted line.
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope * x
    }
}

const MIN_POINTS: usize = 3;

/// Ordinary least squares `y ≈ intercept + slope·x`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<RateFit> {
    assert_eq!(xs.len(), ys.len(), "paired observations");
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|(&x, &y)| (x, y))
        .collect();
    if pts.len() < MIN_POINTS {
        return Err(Error::InsufficientData { needed: MIN_POINTS, got: pts.len() });
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("fit abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let ss_res: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let r_squared = if ss_tot <= f64::EPSILON * m * my.abs().max(1.0) {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(RateFit { slope, intercept, r_squared, points_used: pts.len() })
}

/// Log–log fit of `error ≈ C n^slope` over the records with positive `n` and error.
pub fn rate_fit<T: Scalar>(records: &[(usize, T)]) -> Result<RateFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = records
        .iter()
        .map(|&(n, e)| (n as f64, e.as_f64()))
        .filter(|&(n, e)| n > 0.0 && e > 0.0 && e.is_finite())
        .map(|(n, e)| (n.ln(), e.ln()))
        .unzip();
    if xs.len() < MIN_POINTS {
        return Err(Error::InsufficientData { needed: MIN_POINTS, got: xs.len() });
    }
    linear_fit(&xs, &ys)
}

/// Fit of `value ≈ intercept + slope·ln n`, the natural scale for quantities
/// that grow logarithmically.
pub fn semilog_fit<T: Scalar>(records: &[(usize, T)]) -> Result<RateFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = records
        .iter()
        .filter(|&&(n, _)| n > 0)
        .map(|&(n, v)| ((n as f64).ln(), v.as_f64()))
        .unzip();
    linear_fit(&xs, &ys)
}

/// Rate model `m_n`: `(1 + ln n)/n` for `p = 1`, else `1/n + n^{−1/p}`.
pub fn m_n(p: f64, n: usize) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("m_n needs p >= 1, got {p}")));
    }
    if n == 0 {
        return Err(Error::InvalidDegree(0));
    }
    let nf = n as f64;
    Ok(if p == 1.0 { (1.0 + nf.ln()) / nf } else { 1.0 / nf + nf.powf(-1.0 / p) })
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;

    use super::*;

    #[test]
    fn exact_power_law() {
        let recs: Vec<(usize, f64)> = [4usize, 8, 16, 32, 64].iter().map(|&n| (n, 3.0 / (n * n) as f64)).collect();
        let fit = rate_fit(&recs).unwrap();
        assert_abs_diff_eq!(fit.slope, -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.intercept, 3f64.ln(), epsilon = 1e-12);
        assert_eq!(fit.points_used, 5);
    }

    #[test]
    fn model_ratio_is_flat() {
        let recs: Vec<(usize, f64)> = [8usize, 16, 32, 64, 128]
            .iter()
            .map(|&n| (n, 0.7 * (1.0 + (n as f64).ln()) / n as f64 / m_n(1.0, n).unwrap()))
            .collect();
        let fit = rate_fit(&recs).unwrap();
        assert!(fit.slope.abs() < 1e-12);
        for (_, r) in &recs {
            assert!((r / 0.7 - 1.0).abs() < 0.1);
        }
    }

    #[test]
    fn too_few_records() {
        assert_eq!(rate_fit(&[(4usize, 1.0f64)]), Err(Error::InsufficientData { needed: 3, got: 1 }));
        assert!(rate_fit(&[(4usize, 1.0f64), (8, 0.0), (16, -1.0), (32, 0.5)]).is_err());
    }

    #[test]
    fn m_n_values() {
        assert_abs_diff_eq!(m_n(1.0, 1).unwrap(), 1.0);
        assert_abs_diff_eq!(m_n(2.0, 4).unwrap(), 0.75, epsilon = 1e-15);
        assert!(m_n(0.5, 4).is_err());
        let seq: Vec<f64> = (2..40).map(|n| m_n(1.0, n).unwrap()).collect();
        assert!(seq.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn semilog_recovers_log_growth() {
        let recs: Vec<(usize, f64)> = [16usize, 32, 64, 128].iter().map(|&n| (n, 0.9 + 0.6 * (n as f64).ln())).collect();
        assert_abs_diff_eq!(semilog_fit(&recs).unwrap().slope, 0.6, epsilon = 1e-12);
    }
}
