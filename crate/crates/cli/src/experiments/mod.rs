//! One runner per experiment kind. Every runner builds its cells in
//! `(n, function, p)` order, evaluates them in parallel and keeps that order
//! in the output table.

mod convergence;
mod kernels;
mod witness;

use std::time::Instant;

use gklab::analysis::{rate_fit, semilog_fit, RateFit};
use gklab::corpus::corpus_get;
use gklab::kernels::NodeSet;
use gklab::operators::MeansCache;
use gklab::{Approximant, FunctionSpec, Grid, QuadratureSpec};
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::report::Report;
use crate::CliError;

/// Validates `config`, runs it and returns the report without writing it.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report, CliError> {
    config.validate()?;
    let start = Instant::now();
    let ctx = Context::new(config)?;
    let (table, summary) = match config.kind {
        ExperimentKind::Lebesgue => kernels::lebesgue(&ctx),
        ExperimentKind::PropIntegrals => kernels::prop_integrals(&ctx),
        ExperimentKind::Korovkin => kernels::korovkin(&ctx),
        ExperimentKind::ConvergeSup => convergence::converge_sup(&ctx),
        ExperimentKind::ConvergeLp => convergence::converge_lp(&ctx),
        ExperimentKind::Rates => convergence::rates(&ctx),
        ExperimentKind::Weighted => convergence::weighted(&ctx),
        ExperimentKind::Kfunctional => convergence::kfunctional(&ctx),
        ExperimentKind::L1Unbounded => witness::l1_unbounded(&ctx),
        ExperimentKind::Maximal => witness::maximal(&ctx),
    };
    Ok(Report {
        config: config.clone(),
        config_hash: config.hash(),
        table,
        summary,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

pub(crate) struct Context<'a> {
    pub cfg: &'a ExperimentConfig,
    pub quad: QuadratureSpec,
    pub grid: Grid,
    pub functions: Vec<FunctionSpec>,
    cache: MeansCache<f64>,
}

impl<'a> Context<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self, CliError> {
        let grid = Grid::full(cfg.grid).map_err(|e| CliError::Validation(format!("grid: {e}")))?;
        let functions = cfg
            .functions
            .iter()
            .map(|name| corpus_get::<f64>(name))
            .collect::<gklab::Result<Vec<_>>>()
            .map_err(|e| CliError::Validation(format!("functions: {e}")))?;
        Ok(Self { cfg, quad: cfg.quad.spec(), grid, functions, cache: MeansCache::new() })
    }

    /// `GK_n f`, sharing panel means across cells.
    pub fn gk(&self, n: usize, f: &FunctionSpec) -> gklab::Result<Approximant> {
        let nodes = NodeSet::new(n)?;
        let means = self.cache.get_or_compute(&nodes, f, &self.quad)?;
        Ok(Approximant::from_means(&nodes, &means, f.name()))
    }
}

pub(crate) fn fit_json(fit: &gklab::Result<RateFit>) -> Value {
    match fit {
        Ok(f) => json!({
            "slope": f.slope,
            "intercept": f.intercept,
            "r_squared": f.r_squared,
            "points_used": f.points_used,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

/// Log–log slope of a positive series, `None` when it cannot be fitted.
pub(crate) fn loglog(series: &[(usize, f64)]) -> (gklab::Result<RateFit>, Option<f64>) {
    let fit = rate_fit(series);
    let slope = fit.as_ref().ok().map(|f| f.slope);
    (fit, slope)
}

pub(crate) fn semilog(series: &[(usize, f64)]) -> (gklab::Result<RateFit>, Option<f64>) {
    let fit = semilog_fit(series);
    let slope = fit.as_ref().ok().map(|f| f.slope);
    (fit, slope)
}

pub(crate) fn fmt_slope(slope: Option<f64>) -> String {
    slope.map_or_else(|| "unavailable".to_string(), |s| format!("{s:.4}"))
}

/// Each entry at most `slack` times the previous one.
pub(crate) fn nonincreasing(values: &[f64], slack: f64) -> bool {
    values.windows(2).all(|w| w[1] <= slack * w[0])
}

pub(crate) fn p_label(p: f64) -> String {
    format!("{p}")
}
