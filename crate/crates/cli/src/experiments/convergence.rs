use std::f64::consts::PI;

use gklab::analysis::{envelope_check, k_functional_sweep, m_n, KSweep};
use gklab::numerics::lp_norm;
use gklab::FunctionSpec;
use rayon::prelude::*;
use serde_json::json;

use super::{fit_json, fmt_slope, loglog, nonincreasing, p_label, Context};
use crate::report::{Band, Field, Row, Summary, Table};

/// Errors at or below this are treated as exact reproduction.
pub const EXACT: f64 = 1e-10;

fn key_series(table: &Table, col: usize, name: &str, p: Option<f64>) -> Vec<(usize, f64)> {
    table
        .rows
        .iter()
        .filter(|r| r.key[1] == Field::from(name) && p.is_none_or(|p| r.key[2] == Field::Float(p)))
        .filter_map(|r| Some((r.key[0].as_f64()? as usize, r.value(col)?)))
        .collect()
}

fn convergence_band(name: String, series: &[(usize, f64)], factor: f64) -> Band {
    let values: Vec<f64> = series.iter().map(|v| v.1).collect();
    let (first, last) = (values.first().copied(), values.last().copied());
    let exact = !values.is_empty() && values.iter().all(|&v| v <= EXACT);
    let monotone = nonincreasing(&values, 1.1);
    let reduced = matches!((first, last), (Some(a), Some(b)) if b < a / factor);
    Band::new(
        name,
        exact || (monotone && reduced),
        format!(
            "first {:.4e}, last {:.4e}, reduction {:.2}x (need > {factor}x), each octave <= 1.1x previous: {monotone}, exact: {exact}",
            first.unwrap_or(f64::NAN),
            last.unwrap_or(f64::NAN),
            first.zip(last).map_or(f64::NAN, |(a, b)| a / b),
        ),
    )
}

pub(crate) fn converge_sup(ctx: &Context) -> (Table, Summary) {
    let mut table = Table::new(&["n", "function"], &["error_sup", "envelope_c"]);
    let width = table.width();
    let cells: Vec<(usize, &FunctionSpec)> =
        ctx.cfg.n_set.iter().flat_map(|&n| ctx.functions.iter().map(move |f| (n, f))).collect();
    table.rows = cells
        .par_iter()
        .map(|&(n, f)| {
            let key = vec![n.into(), f.name().into()];
            let run = || -> gklab::Result<Vec<Field>> {
                let err = ctx.gk(n, f)?.sup_error(f, &ctx.grid)?;
                let env = if f.is_continuous() {
                    Field::Float(envelope_check(n, f, &ctx.grid, &ctx.quad)?.constant)
                } else {
                    Field::Missing
                };
                Ok(vec![err.into(), env])
            };
            match run() {
                Ok(v) => Row::ok(key, v),
                Err(e) => Row::failed(key, width, e),
            }
        })
        .collect();

    let mut s = Summary::default();
    let mut c1 = 0.0f64;
    for f in &ctx.functions {
        let errs = key_series(&table, 0, f.name(), None);
        s.fits.insert(format!("error_sup[{}]", f.name()), fit_json(&loglog(&errs).0));
        s.bands.push(convergence_band(format!("uniform_convergence[{}]", f.name()), &errs, 10.0));
        if f.is_continuous() {
            let env = key_series(&table, 1, f.name(), None);
            c1 = env.iter().map(|v| v.1).fold(c1, f64::max);
            let (fit, slope) = loglog(&env);
            s.fits.insert(format!("envelope_c[{}]", f.name()), fit_json(&fit));
            s.bands.push(Band::new(
                format!("envelope_flat[{}]", f.name()),
                slope.is_some_and(|v| v.abs() <= 0.1),
                format!("slope of fitted C vs n = {} (band 0 +- 0.1)", fmt_slope(slope)),
            ));
        }
    }
    s.constants.insert("c1_estimate".into(), json!(c1));
    (table, s)
}

struct LpCells<'a> {
    cells: Vec<(usize, &'a FunctionSpec, f64)>,
    skipped: Vec<String>,
}

fn lp_cells<'a>(ctx: &'a Context) -> LpCells<'a> {
    let mut cells = Vec::new();
    let mut skipped = Vec::new();
    for &n in &ctx.cfg.n_set {
        for f in &ctx.functions {
            for &p in &ctx.cfg.p_set {
                if f.in_lp(p) {
                    cells.push((n, f, p));
                } else if n == ctx.cfg.n_set[0] {
                    skipped.push(format!("{} (p={})", f.name(), p_label(p)));
                }
            }
        }
    }
    LpCells { cells, skipped }
}

fn interval(ctx: &Context, interior: bool) -> (f64, f64) {
    if interior {
        (ctx.cfg.eps, PI - ctx.cfg.eps)
    } else {
        (0.0, PI)
    }
}

fn lp_table(ctx: &Context, interior: bool) -> (Table, Vec<String>) {
    let mut table = Table::new(&["n", "function", "p"], &["a", "b", "weight_alpha", "error_lp", "norm_ratio"]);
    let width = table.width();
    let (a, b) = interval(ctx, interior);
    let weight = ctx.cfg.weight.spec();
    let alpha = ctx.cfg.weight.alpha().map_or(Field::Missing, Field::Float);
    let LpCells { cells, skipped } = lp_cells(ctx);
    table.rows = cells
        .par_iter()
        .map(|&(n, f, p)| {
            let key = vec![n.into(), f.name().into(), p.into()];
            let run = || -> gklab::Result<Vec<Field>> {
                let gk = ctx.gk(n, f)?;
                let err = gk.lp_error(f, p, a, b, &weight, &ctx.quad)?;
                let norm = gk.lp_norm(p, a, b, &weight, &ctx.quad)?;
                let fnorm = lp_norm(f, p, a, b, &weight, &ctx.quad)?;
                Ok(vec![a.into(), b.into(), alpha.clone(), err.into(), (norm / fnorm).into()])
            };
            match run() {
                Ok(v) => Row::ok(key, v),
                Err(e) => Row::failed(key, width, e),
            }
        })
        .collect();
    (table, skipped)
}

pub(crate) fn converge_lp(ctx: &Context) -> (Table, Summary) {
    let (table, skipped) = lp_table(ctx, false);
    let err_col = table.column("error_lp");
    let ratio_col = table.column("norm_ratio");
    let mut s = Summary::default();
    s.constants.insert("skipped_not_in_lp".into(), json!(skipped));
    for f in &ctx.functions {
        for &p in &ctx.cfg.p_set {
            if !f.in_lp(p) {
                continue;
            }
            let tag = format!("{},p={}", f.name(), p_label(p));
            let errs = key_series(&table, err_col, f.name(), Some(p));
            s.fits.insert(format!("error_lp[{tag}]"), fit_json(&loglog(&errs).0));
            s.bands.push(convergence_band(format!("lp_convergence[{tag}]"), &errs, 5.0));
        }
    }
    let mut bounds = serde_json::Map::new();
    for &p in &ctx.cfg.p_set {
        let per_n: Vec<(usize, f64)> = ctx
            .cfg
            .n_set
            .iter()
            .filter_map(|&n| {
                table
                    .rows
                    .iter()
                    .filter(|r| r.key[0] == Field::from(n) && r.key[2] == Field::Float(p))
                    .filter_map(|r| r.value(ratio_col))
                    .reduce(f64::max)
                    .map(|m| (n, m))
            })
            .collect();
        let c_p = per_n.iter().map(|v| v.1).fold(0.0, f64::max);
        let (fit, slope) = loglog(&per_n);
        s.fits.insert(format!("max_norm_ratio[p={}]", p_label(p)), fit_json(&fit));
        bounds.insert(p_label(p), json!(c_p));
        s.bands.push(Band::new(
            format!("lp_bounded[p={}]", p_label(p)),
            c_p.is_finite() && c_p > 0.0 && slope.is_some_and(|v| v <= 0.1),
            format!(
                "max ||GK_n f||_p/||f||_p = {c_p:.4}, slope of per-n maximum = {} (no upward trend: slope <= 0.1)",
                fmt_slope(slope)
            ),
        ));
    }
    s.constants.insert("operator_bound_estimate".into(), serde_json::Value::Object(bounds));
    (table, s)
}

pub(crate) fn weighted(ctx: &Context) -> (Table, Summary) {
    let (table, skipped) = lp_table(ctx, true);
    let err_col = table.column("error_lp");
    let mut s = Summary::default();
    s.constants.insert("skipped_not_in_lp".into(), json!(skipped));
    for f in &ctx.functions {
        for &p in &ctx.cfg.p_set {
            if !f.in_lp(p) {
                continue;
            }
            let tag = format!("{},p={}", f.name(), p_label(p));
            let errs = key_series(&table, err_col, f.name(), Some(p));
            s.fits.insert(format!("error_lp[{tag}]"), fit_json(&loglog(&errs).0));
            let values: Vec<f64> = errs.iter().map(|v| v.1).collect();
            let decreasing = values.len() >= 2 && values.windows(2).all(|w| w[1] < w[0]);
            s.bands.push(Band::new(
                format!("weighted_decrease[{tag}]"),
                decreasing && table.failed_rows() == 0,
                format!(
                    "errors [{}] strictly decrease across octaves: {decreasing}",
                    values.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>().join(", ")
                ),
            ));
        }
    }
    (table, s)
}

pub(crate) fn rates(ctx: &Context) -> (Table, Summary) {
    let (lp, _) = lp_table(ctx, false);
    let err_col = lp.column("error_lp");
    let mut table = Table::new(&["n", "function", "p"], &["error_lp", "m_n", "ratio"]);
    table.rows = lp
        .rows
        .iter()
        .map(|r| {
            if r.error.is_some() {
                return Row { key: r.key.clone(), values: vec![Field::Missing; 3], error: r.error.clone() };
            }
            let n = r.key[0].as_f64().expect("degree key") as usize;
            let p = r.key[2].as_f64().expect("exponent key");
            let err = r.value(err_col).expect("error value");
            match m_n(p, n) {
                Ok(m) => Row::ok(r.key.clone(), vec![err.into(), m.into(), (err / m).into()]),
                Err(e) => Row::failed(r.key.clone(), 3, e),
            }
        })
        .collect();
    let mut s = Summary::default();
    for f in &ctx.functions {
        for &p in &ctx.cfg.p_set {
            if !f.in_lp(p) {
                continue;
            }
            let tag = format!("{},p={}", f.name(), p_label(p));
            let ratios = key_series(&table, 2, f.name(), Some(p));
            let (fit, slope) = loglog(&ratios);
            s.fits.insert(format!("error_lp[{tag}]"), fit_json(&loglog(&key_series(&table, 0, f.name(), Some(p))).0));
            s.fits.insert(format!("ratio_to_m_n[{tag}]"), fit_json(&fit));
            s.bands.push(Band::new(
                format!("m_n_rate[{tag}]"),
                slope.is_some_and(|v| v.abs() <= 0.15),
                format!("slope of error/m_n vs n = {} (band 0 +- 0.15)", fmt_slope(slope)),
            ));
        }
    }
    (table, s)
}

pub(crate) fn kfunctional(ctx: &Context) -> (Table, Summary) {
    let pairs: Vec<(&FunctionSpec, f64)> = ctx
        .functions
        .iter()
        .flat_map(|f| ctx.cfg.p_set.iter().map(move |&p| (f, p)))
        .filter(|(f, p)| f.in_lp(*p))
        .collect();
    let sweeps: Vec<gklab::Result<KSweep<f64>>> =
        pairs.par_iter().map(|&(f, p)| k_functional_sweep(f, p, &ctx.quad, &ctx.grid)).collect();
    let find_sweep = |f: &FunctionSpec, p: f64| -> &gklab::Result<KSweep<f64>> {
        let i = pairs.iter().position(|(g, q)| g.name() == f.name() && *q == p).expect("pair listed");
        &sweeps[i]
    };

    let mut table = Table::new(&["n", "function", "p"], &["error_lp", "m_n", "k_upper", "ratio"]);
    let width = table.width();
    let LpCells { cells, skipped } = lp_cells(ctx);
    let weight = gklab::WeightSpec::unweighted();
    table.rows = cells
        .par_iter()
        .map(|&(n, f, p)| {
            let key = vec![n.into(), f.name().into(), p.into()];
            let run = || -> Result<Vec<Field>, String> {
                let sweep = find_sweep(f, p).as_ref().map_err(|e| e.to_string())?;
                let gk = ctx.gk(n, f).map_err(|e| e.to_string())?;
                let err = gk.lp_error(f, p, 0.0, PI, &weight, &ctx.quad).map_err(|e| e.to_string())?;
                let m = m_n(p, n).map_err(|e| e.to_string())?;
                let k = sweep.upper(m);
                let ratio = if err <= EXACT { Field::Missing } else { Field::Float(err / k) };
                Ok(vec![err.into(), m.into(), k.into(), ratio])
            };
            match run() {
                Ok(v) => Row::ok(key, v),
                Err(e) => Row::failed(key, width, e),
            }
        })
        .collect();

    let mut s = Summary::default();
    s.constants.insert("skipped_not_in_lp".into(), json!(skipped));
    let mut r_json = serde_json::Map::new();
    for &p in &ctx.cfg.p_set {
        let mut running = 0.0f64;
        let mut history = Vec::new();
        for &n in &ctx.cfg.n_set {
            let here = table
                .rows
                .iter()
                .filter(|r| r.key[0] == Field::from(n) && r.key[2] == Field::Float(p))
                .filter_map(|r| r.value(3))
                .fold(0.0, f64::max);
            running = running.max(here);
            history.push((n, running));
        }
        let worst_change = history
            .windows(2)
            .map(|w| if w[0].1 > 0.0 { (w[1].1 / w[0].1 - 1.0).abs() } else { f64::INFINITY })
            .fold(0.0, f64::max);
        r_json.insert(p_label(p), json!(running));
        s.fits.insert(
            format!("r_history[p={}]", p_label(p)),
            json!(history.iter().map(|(n, r)| json!({"n": n, "r": r})).collect::<Vec<_>>()),
        );
        s.bands.push(Band::new(
            format!("k_functional_bound[p={}]", p_label(p)),
            running.is_finite() && running > 0.0 && worst_change <= 0.25 && table.failed_rows() == 0,
            format!(
                "R = {running:.4} (max error/K_upper over n and corpus), largest change under doubling {:.1}% (limit 25%)",
                100.0 * worst_change
            ),
        ));
    }
    s.constants.insert("r_p_estimate".into(), serde_json::Value::Object(r_json));
    (table, s)
}
