//! Named test functions and the metadata that drives quadrature and norm choices.

use std::fmt;
use std::sync::Arc;

use crate::{Error, Result, Scalar};

pub type Evaluator<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Regularity class of a corpus member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoothness {
    Analytic,
    C1,
    Lipschitz,
    /// Continuous but not Lipschitz at the scale of interest.
    Continuous,
    BoundedVariationJump,
    /// Member of `L^p` exactly for `p < p_max`.
    LpOnly { p_max: f64 },
}

/// A function on `[0, π]` with the structure quadrature needs to know about.
#[derive(Clone)]
pub struct FunctionSpec<T> {
    name: String,
    evaluator: Evaluator<T>,
    breakpoints: Vec<T>,
    singular_points: Vec<T>,
    smoothness: Smoothness,
    lipschitz_constant: Option<T>,
    antiderivative: Option<Evaluator<T>>,
    resolution: Option<T>,
}

impl<T: Scalar> fmt::Debug for FunctionSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSpec")
            .field("name", &self.name)
            .field("breakpoints", &self.breakpoints)
            .field("singular_points", &self.singular_points)
            .field("smoothness", &self.smoothness)
            .field("lipschitz_constant", &self.lipschitz_constant)
            .field("closed_form_integral", &self.antiderivative.is_some())
            .finish()
    }
}

impl<T: Scalar> FunctionSpec<T> {
    pub fn new(name: impl Into<String>, f: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        Self {
            name: name.into(),
            evaluator: Arc::new(f),
            breakpoints: Vec::new(),
            singular_points: Vec::new(),
            smoothness: Smoothness::Continuous,
            lipschitz_constant: None,
            antiderivative: None,
            resolution: None,
        }
    }

    pub fn with_breakpoints(mut self, breakpoints: Vec<T>) -> Self {
        self.breakpoints = breakpoints;
        self
    }

    /// Points where the function is unbounded; quadrature grades toward them.
    pub fn with_singular_points(mut self, points: Vec<T>) -> Self {
        self.singular_points = points;
        self
    }

    pub fn with_smoothness(mut self, smoothness: Smoothness) -> Self {
        self.smoothness = smoothness;
        self
    }

    pub fn with_lipschitz(mut self, constant: T) -> Self {
        self.lipschitz_constant = Some(constant);
        self
    }

    pub fn with_antiderivative(mut self, f: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        self.antiderivative = Some(Arc::new(f));
        self
    }

    /// Widest quadrature panel that resolves the oscillation of `f`.
    pub fn with_resolution(mut self, width: T) -> Self {
        self.resolution = Some(width);
        self
    }

    pub fn resolution(&self) -> Option<T> {
        self.resolution
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    pub fn singular_points(&self) -> &[T] {
        &self.singular_points
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn lipschitz_constant(&self) -> Option<T> {
        self.lipschitz_constant
    }

    /// Raw evaluation; may be non-finite at singular points.
    #[inline]
    pub fn value(&self, t: T) -> T {
        (self.evaluator)(t)
    }

    /// Evaluation that rejects non-finite values.
    pub fn eval(&self, t: T) -> Result<T> {
        let v = self.value(t);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::FunctionDomain { name: self.name.clone(), at: t.as_f64() })
        }
    }

    /// `∫_a^b f` from the registered antiderivative, if any.
    pub fn closed_form_integral(&self, a: T, b: T) -> Option<T> {
        self.antiderivative.as_ref().map(|g| g(b) - g(a))
    }

    pub fn is_continuous(&self) -> bool {
        matches!(
            self.smoothness,
            Smoothness::Analytic | Smoothness::C1 | Smoothness::Lipschitz | Smoothness::Continuous
        )
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self.smoothness, Smoothness::LpOnly { .. })
    }

    /// Whether `f ∈ L^p[0, π]`.
    pub fn in_lp(&self, p: f64) -> bool {
        match self.smoothness {
            Smoothness::LpOnly { p_max } => p < p_max,
            _ => true,
        }
    }

    /// `self − other`, keeping the structural points of both.
    pub fn minus(&self, other: &FunctionSpec<T>) -> FunctionSpec<T> {
        let (f, g) = (self.evaluator.clone(), other.evaluator.clone());
        let mut breakpoints = self.breakpoints.clone();
        breakpoints.extend_from_slice(&other.breakpoints);
        let mut singular = self.singular_points.clone();
        singular.extend_from_slice(&other.singular_points);
        let smoothness = if self.is_bounded() && other.is_bounded() {
            Smoothness::BoundedVariationJump
        } else {
            Smoothness::LpOnly { p_max: lp_cap(self).min(lp_cap(other)) }
        };
        let mut out = FunctionSpec::new(format!("{}-{}", self.name, other.name), move |t| f(t) - g(t))
            .with_breakpoints(breakpoints)
            .with_singular_points(singular)
            .with_smoothness(smoothness);
        out.resolution = finer(self.resolution, other.resolution);
        out
    }

    /// `|f|` with the same structure.
    pub fn abs(&self) -> FunctionSpec<T> {
        let f = self.evaluator.clone();
        let mut out = self.clone();
        out.name = format!("|{}|", self.name);
        out.evaluator = Arc::new(move |t| f(t).abs());
        out.antiderivative = None;
        out
    }
}

pub(crate) fn finer<T: Scalar>(a: Option<T>, b: Option<T>) -> Option<T> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn lp_cap<T: Scalar>(f: &FunctionSpec<T>) -> f64 {
    match f.smoothness {
        Smoothness::LpOnly { p_max } => p_max,
        _ => f64::INFINITY,
    }
}

/// Names in the registry, in canonical order.
pub const CORPUS: [&str; 10] = [
    "const_one",
    "linear",
    "square",
    "sine",
    "cosine",
    "kink",
    "hat_narrow",
    "step",
    "root_singular",
    "rough",
];

/// Highest octave in the lacunary sum of `rough`.
pub const ROUGH_OCTAVES: i32 = 12;

const HAT_CENTER: f64 = std::f64::consts::FRAC_PI_3;
const HAT_HALF_WIDTH: f64 = 0.05;

/// Looks up a corpus member by name.
pub fn corpus_get<T: Scalar>(name: &str) -> Result<FunctionSpec<T>> {
    let half_pi = T::FRAC_PI_2();
    let spec = match name {
        "const_one" => FunctionSpec::new(name, |_t: T| T::one())
            .with_smoothness(Smoothness::Analytic)
            .with_lipschitz(T::zero())
            .with_antiderivative(|t| t),
        "linear" => FunctionSpec::new(name, |t: T| t)
            .with_smoothness(Smoothness::Analytic)
            .with_lipschitz(T::one())
            .with_antiderivative(|t: T| t * t / T::lit(2.0)),
        "square" => FunctionSpec::new(name, |t: T| t * t)
            .with_smoothness(Smoothness::Analytic)
            .with_lipschitz(T::lit(2.0) * T::PI())
            .with_antiderivative(|t: T| t * t * t / T::lit(3.0)),
        "sine" => FunctionSpec::new(name, |t: T| t.sin())
            .with_smoothness(Smoothness::Analytic)
            .with_lipschitz(T::one())
            .with_antiderivative(|t: T| -t.cos()),
        "cosine" => FunctionSpec::new(name, |t: T| t.cos())
            .with_smoothness(Smoothness::Analytic)
            .with_lipschitz(T::one())
            .with_antiderivative(|t: T| t.sin()),
        "kink" => FunctionSpec::new(name, move |t: T| (t - half_pi).abs())
            .with_breakpoints(vec![half_pi])
            .with_smoothness(Smoothness::Lipschitz)
            .with_lipschitz(T::one())
            .with_antiderivative(move |t: T| {
                let d = t - half_pi;
                d * d.abs() / T::lit(2.0)
            }),
        "hat_narrow" => {
            let (c, w) = (T::lit(HAT_CENTER), T::lit(HAT_HALF_WIDTH));
            FunctionSpec::new(name, move |t: T| (T::one() - (t - c).abs() / w).max(T::zero()))
                .with_breakpoints(vec![c - w, c, c + w])
                .with_smoothness(Smoothness::Lipschitz)
                .with_lipschitz(w.recip())
                .with_antiderivative(move |t: T| {
                    // integral of the unit-height hat from 0 to t
                    let u = ((t - c) / w).max(-T::one()).min(T::one());
                    let half = T::lit(0.5);
                    let area = if u <= T::zero() {
                        half * (T::one() + u) * (T::one() + u)
                    } else {
                        T::one() - half * (T::one() - u) * (T::one() - u)
                    };
                    w * area
                })
        }
        "step" => FunctionSpec::new(name, move |t: T| if t <= half_pi { T::one() } else { T::zero() })
            .with_breakpoints(vec![half_pi])
            .with_smoothness(Smoothness::BoundedVariationJump)
            .with_antiderivative(move |t: T| t.min(half_pi)),
        "root_singular" => FunctionSpec::new(name, |t: T| t.powf(T::lit(-0.25)))
            .with_breakpoints(vec![T::zero()])
            .with_singular_points(vec![T::zero()])
            .with_smoothness(Smoothness::LpOnly { p_max: 4.0 })
            .with_antiderivative(|t: T| T::lit(4.0 / 3.0) * t.powf(T::lit(0.75))),
        "rough" => FunctionSpec::new(name, |t: T| {
            (1..=ROUGH_OCTAVES).fold(T::zero(), |acc, j| {
                let freq = T::lit(2f64.powi(j));
                acc + T::lit(2f64.powf(-f64::from(j) / 2.0)) * (freq * t).cos()
            })
        })
        .with_smoothness(Smoothness::Continuous)
        .with_resolution(T::PI() / T::lit(2f64.powi(ROUGH_OCTAVES)))
        .with_antiderivative(|t: T| {
            (1..=ROUGH_OCTAVES).fold(T::zero(), |acc, j| {
                let freq = T::lit(2f64.powi(j));
                acc + T::lit(2f64.powf(-f64::from(j) / 2.0)) * (freq * t).sin() / freq
            })
        }),
        _ => {
            return Err(Error::UnknownFunction {
                name: name.to_string(),
                known: CORPUS.iter().map(|s| s.to_string()).collect(),
            })
        }
    };
    Ok(spec)
}

/// Every registered member, in canonical order.
pub fn corpus_all<T: Scalar>() -> Vec<FunctionSpec<T>> {
    CORPUS.iter().map(|n| corpus_get(n).expect("registered name")).collect()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use approx::assert_abs_diff_eq;

    use super::*;

    #[test]
    fn registry_lookups() {
        let one = corpus_get::<f64>("const_one").unwrap();
        assert_eq!(one.value(1.3), 1.0);
        assert_eq!(one.smoothness(), Smoothness::Analytic);
        let step = corpus_get::<f64>("step").unwrap();
        assert_eq!(step.breakpoints(), &[PI / 2.0]);
        assert_eq!(step.smoothness(), Smoothness::BoundedVariationJump);
        let root = corpus_get::<f64>("root_singular").unwrap();
        assert_abs_diff_eq!(root.value(PI / 16.0), (PI / 16.0).powf(-0.25), epsilon = 1e-12);
        assert!(root.in_lp(3.0) && !root.in_lp(4.0));
    }

    #[test]
    fn unknown_name_lists_registry() {
        match corpus_get::<f64>("nope") {
            Err(Error::UnknownFunction { name, known }) => {
                assert_eq!(name, "nope");
                assert_eq!(known.len(), CORPUS.len());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn eval_rejects_singularity() {
        let root = corpus_get::<f64>("root_singular").unwrap();
        assert!(root.eval(0.0).is_err());
        assert!(root.eval(0.5).is_ok());
    }

    #[test]
    fn difference_keeps_structure() {
        let d = corpus_get::<f64>("step").unwrap().minus(&corpus_get("root_singular").unwrap());
        assert_eq!(d.singular_points(), &[0.0]);
        assert!(d.breakpoints().contains(&(PI / 2.0)));
        assert!(!d.in_lp(4.0));
    }

    #[test]
    fn single_precision_members() {
        for f in corpus_all::<f32>() {
            assert!(f.value(1.0).is_finite(), "{}", f.name());
        }
    }
}
