//! Experiment configuration: JSON file schema, per-kind defaults and
//! validation.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use gklab::corpus::{corpus_get, CORPUS};
use gklab::numerics::WeightKind;
use gklab::QuadratureSpec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

/// Smallest accepted evaluation grid.
pub const MIN_GRID: usize = 1025;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Lebesgue,
    ConvergeSup,
    ConvergeLp,
    Rates,
    PropIntegrals,
    L1Unbounded,
    Maximal,
    Kfunctional,
    Korovkin,
    Weighted,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 10] = [
        Self::Lebesgue,
        Self::ConvergeSup,
        Self::ConvergeLp,
        Self::Rates,
        Self::PropIntegrals,
        Self::L1Unbounded,
        Self::Maximal,
        Self::Kfunctional,
        Self::Korovkin,
        Self::Weighted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Lebesgue => "lebesgue",
            Self::ConvergeSup => "converge-sup",
            Self::ConvergeLp => "converge-lp",
            Self::Rates => "rates",
            Self::PropIntegrals => "prop-integrals",
            Self::L1Unbounded => "l1-unbounded",
            Self::Maximal => "maximal",
            Self::Kfunctional => "kfunctional",
            Self::Korovkin => "korovkin",
            Self::Weighted => "weighted",
        }
    }

    fn uses_functions(self) -> bool {
        matches!(
            self,
            Self::ConvergeSup | Self::ConvergeLp | Self::Rates | Self::Maximal | Self::Kfunctional | Self::Weighted
        )
    }

    fn uses_p(self) -> bool {
        matches!(self, Self::ConvergeLp | Self::Rates | Self::PropIntegrals | Self::Kfunctional | Self::Weighted)
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown experiment `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    /// `"unweighted"` or `"power"`.
    pub kind: WeightName,
    #[serde(default)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightName {
    Unweighted,
    Power,
}

impl WeightConfig {
    pub fn unweighted() -> Self {
        Self { kind: WeightName::Unweighted, alpha: 0.0 }
    }

    pub fn power(alpha: f64) -> Self {
        Self { kind: WeightName::Power, alpha }
    }

    pub fn spec(&self) -> gklab::WeightSpec {
        match self.kind {
            WeightName::Unweighted => gklab::WeightSpec::unweighted(),
            WeightName::Power => gklab::WeightSpec::power(self.alpha),
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        (self.spec().kind == WeightKind::Power).then_some(self.alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadConfig {
    pub order: usize,
    pub subpanels: usize,
    #[serde(default = "yes")]
    pub split_at_breakpoints: bool,
}

fn yes() -> bool {
    true
}

impl Default for QuadConfig {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self { order: q.order, subpanels: q.subpanels, split_at_breakpoints: q.split_at_breakpoints }
    }
}

impl QuadConfig {
    pub fn spec(&self) -> QuadratureSpec {
        QuadratureSpec { order: self.order, subpanels: self.subpanels, split_at_breakpoints: self.split_at_breakpoints }
    }
}

/// Contents of a config file. Every field is optional; missing fields take
/// the defaults of the experiment kind.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub kind: Option<ExperimentKind>,
    pub n_set: Option<Vec<usize>>,
    pub functions: Option<Vec<String>>,
    pub p_set: Option<Vec<f64>>,
    pub weight: Option<WeightConfig>,
    pub eps: Option<f64>,
    pub grid: Option<usize>,
    pub quad: Option<QuadConfig>,
    pub out: Option<PathBuf>,
    /// Hat heights for `l1-unbounded`.
    pub heights: Option<Vec<f64>>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("config: cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }
}

/// A fully resolved experiment configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n_set: Vec<usize>,
    pub functions: Vec<String>,
    pub p_set: Vec<f64>,
    pub weight: WeightConfig,
    pub eps: f64,
    pub grid: usize,
    pub quad: QuadConfig,
    pub out: PathBuf,
    pub heights: Vec<f64>,
}

fn octaves(lo: usize, hi: usize) -> Vec<usize> {
    std::iter::successors(Some(lo), |&n| Some(n * 2)).take_while(|&n| n <= hi).collect()
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

impl ExperimentConfig {
    /// The configuration the acceptance suite uses for `kind`.
    pub fn defaults(kind: ExperimentKind) -> Self {
        use ExperimentKind::*;
        let (n_set, functions, p_set, weight, grid) = match kind {
            Lebesgue => (octaves(16, 1024), vec![], vec![], WeightConfig::unweighted(), 8193),
            ConvergeSup => (octaves(8, 512), names(&["sine", "square", "kink", "rough"]), vec![], WeightConfig::unweighted(), 8193),
            ConvergeLp => (octaves(8, 512), names(&CORPUS), vec![1.0, 2.0, 3.0], WeightConfig::unweighted(), 8193),
            Rates => (octaves(8, 512), names(&["sine"]), vec![1.0, 2.0], WeightConfig::unweighted(), 8193),
            PropIntegrals => (octaves(16, 1024), vec![], vec![1.0, 2.0, 3.0], WeightConfig::unweighted(), 8193),
            L1Unbounded => (vec![2, 4, 8, 16], vec![], vec![], WeightConfig::unweighted(), 8193),
            Maximal => (
                octaves(4, 256),
                names(&["const_one", "sine", "kink", "step", "root_singular"]),
                vec![],
                WeightConfig::unweighted(),
                2049,
            ),
            Kfunctional => (octaves(8, 512), names(&CORPUS), vec![1.0, 2.0], WeightConfig::unweighted(), 4097),
            Korovkin => (octaves(16, 512), vec![], vec![], WeightConfig::unweighted(), 8193),
            Weighted => (octaves(8, 512), names(&["step"]), vec![2.0], WeightConfig::power(0.5), 8193),
        };
        Self {
            kind,
            n_set,
            functions,
            p_set,
            weight,
            eps: 0.3,
            grid,
            quad: QuadConfig::default(),
            out: PathBuf::from("out"),
            heights: vec![2.0, 10.0, 100.0],
        }
    }

    /// Defaults of `kind`, overridden by the file.
    pub fn resolve(kind: ExperimentKind, file: &ConfigFile) -> Result<Self, CliError> {
        if let Some(k) = file.kind {
            if k != kind {
                return Err(CliError::Validation(format!("kind: config file says `{k}` but `{kind}` was requested")));
            }
        }
        let mut c = Self::defaults(kind);
        if let Some(v) = &file.n_set {
            c.n_set = v.clone();
        }
        if let Some(v) = &file.functions {
            c.functions = v.clone();
        }
        if let Some(v) = &file.p_set {
            c.p_set = v.clone();
        }
        if let Some(v) = file.weight {
            c.weight = v;
        }
        if let Some(v) = file.eps {
            c.eps = v;
        }
        if let Some(v) = file.grid {
            c.grid = v;
        }
        if let Some(v) = file.quad {
            c.quad = v;
        }
        if let Some(v) = &file.out {
            c.out = v.clone();
        }
        if let Some(v) = &file.heights {
            c.heights = v.clone();
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |path: String, msg: String| Err(CliError::Validation(format!("{path}: {msg}")));
        if self.n_set.is_empty() {
            return bad("n_set".into(), "must not be empty".into());
        }
        for (i, &n) in self.n_set.iter().enumerate() {
            if n == 0 {
                return bad(format!("n_set[{i}]"), "degree must be at least 1".into());
            }
            if i > 0 && n <= self.n_set[i - 1] {
                return bad(format!("n_set[{i}]"), format!("must be strictly ascending ({} then {n})", self.n_set[i - 1]));
            }
        }
        if self.grid < MIN_GRID {
            return bad("grid".into(), format!("must be at least {MIN_GRID}, got {}", self.grid));
        }
        if self.kind == ExperimentKind::Maximal && self.grid > gklab::analysis::MAX_MAXIMAL_GRID {
            return bad(
                "grid".into(),
                format!("the maximal experiment supports at most {} points", gklab::analysis::MAX_MAXIMAL_GRID),
            );
        }
        if self.kind.uses_functions() && self.functions.is_empty() {
            return bad("functions".into(), "must not be empty".into());
        }
        for (i, name) in self.functions.iter().enumerate() {
            let f = corpus_get::<f64>(name).map_err(|e| CliError::Validation(format!("functions[{i}]: {e}")))?;
            if self.kind == ExperimentKind::ConvergeSup && !f.is_bounded() {
                return bad(format!("functions[{i}]"), format!("`{name}` is unbounded and has no sup-norm error"));
            }
        }
        if self.kind.uses_p() && self.p_set.is_empty() {
            return bad("p_set".into(), "must not be empty".into());
        }
        for (i, &p) in self.p_set.iter().enumerate() {
            if !(p >= 1.0) || !p.is_finite() {
                return bad(format!("p_set[{i}]"), format!("exponent must be a finite number >= 1, got {p}"));
            }
            self.weight
                .spec()
                .validate(p)
                .map_err(|e| CliError::Validation(format!("weight.alpha: {e} (for p_set[{i}])")))?;
        }
        if !(self.eps > 0.0 && self.eps < FRAC_PI_2) {
            return bad("eps".into(), format!("must lie in (0, pi/2), got {}", self.eps));
        }
        self.quad.spec().validate().map_err(|e| CliError::Validation(format!("quad: {e}")))?;
        for (i, &m) in self.heights.iter().enumerate() {
            if !(m > 0.0) || !m.is_finite() {
                return bad(format!("heights[{i}]"), format!("hat height must be positive, got {m}"));
            }
        }
        if self.kind == ExperimentKind::L1Unbounded && self.heights.is_empty() {
            return bad("heights".into(), "must not be empty".into());
        }
        Ok(())
    }

    /// SHA-256 of the computational part of the configuration (everything
    /// except the output directory), as 16 hex digits.
    pub fn hash(&self) -> String {
        let mut echo = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = echo.as_object_mut() {
            map.remove("out");
        }
        let digest = Sha256::digest(echo.to_string().as_bytes());
        hex::encode(&digest[..8])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for kind in ExperimentKind::ALL {
            ExperimentConfig::defaults(kind).validate().unwrap();
        }
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in ExperimentKind::ALL {
            assert_eq!(kind.name().parse::<ExperimentKind>().unwrap(), kind);
            let json = serde_json::to_string(&kind).unwrap();
            assert_eq!(json, format!("\"{}\"", kind.name()));
        }
        assert!("nope".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn field_paths_in_errors() {
        let mut c = ExperimentConfig::defaults(ExperimentKind::ConvergeLp);
        c.n_set = vec![8, 16, 16];
        assert!(c.validate().unwrap_err().to_string().contains("n_set[2]"));
        let mut c = ExperimentConfig::defaults(ExperimentKind::ConvergeLp);
        c.grid = 1024;
        assert!(c.validate().unwrap_err().to_string().contains("grid"));
        let mut c = ExperimentConfig::defaults(ExperimentKind::ConvergeLp);
        c.functions = vec!["sine".into(), "bogus".into()];
        assert!(c.validate().unwrap_err().to_string().contains("functions[1]"));
        let mut c = ExperimentConfig::defaults(ExperimentKind::Weighted);
        c.weight = WeightConfig::power(1.5);
        assert!(c.validate().unwrap_err().to_string().contains("weight.alpha"));
        let mut c = ExperimentConfig::defaults(ExperimentKind::ConvergeSup);
        c.functions = vec!["root_singular".into()];
        assert!(c.validate().unwrap_err().to_string().contains("functions[0]"));
    }

    #[test]
    fn file_overrides_defaults() {
        let file: ConfigFile = serde_json::from_str(r#"{"n_set":[4,8],"eps":0.2}"#).unwrap();
        let c = ExperimentConfig::resolve(ExperimentKind::Maximal, &file).unwrap();
        assert_eq!(c.n_set, vec![4, 8]);
        assert_eq!(c.eps, 0.2);
        assert_eq!(c.grid, 2049);
        let mismatch: ConfigFile = serde_json::from_str(r#"{"kind":"korovkin"}"#).unwrap();
        assert!(ExperimentConfig::resolve(ExperimentKind::Maximal, &mismatch).is_err());
        assert!(serde_json::from_str::<ConfigFile>(r#"{"unknown":1}"#).is_err());
    }

    #[test]
    fn hash_ignores_output_directory() {
        let a = ExperimentConfig::defaults(ExperimentKind::Korovkin);
        let mut b = a.clone();
        b.out = PathBuf::from("elsewhere");
        assert_eq!(a.hash(), b.hash());
        b.grid += 2;
        assert_ne!(a.hash(), b.hash());
    }
}
