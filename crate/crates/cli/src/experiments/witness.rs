use gklab::adversarial::{build_hat_with, c_n_constant, gk_contrast, gk_l1_operator_norm};
use gklab::analysis::maximal_ratio;
use gklab::kernels::NodeSet;
use gklab::operators::grunwald;
use gklab::FunctionSpec;
use rayon::prelude::*;
use serde_json::json;

use super::{fit_json, fmt_slope, loglog, Context};
use crate::report::{Band, Field, Row, Summary, Table};

pub(crate) fn l1_unbounded(ctx: &Context) -> (Table, Summary) {
    let mut table = Table::new(
        &["n", "m"],
        &["big_n", "c_n", "gnorm", "predicted_gnorm", "fnorm", "ratio", "gk_ratio", "gk_l1_operator_norm"],
    );
    let width = table.width();
    let per_degree: Vec<gklab::Result<(f64, f64)>> = ctx
        .cfg
        .n_set
        .par_iter()
        .map(|&n| Ok((c_n_constant::<f64>(n, &ctx.quad)?, gk_l1_operator_norm::<f64>(n, &ctx.quad)?)))
        .collect();
    let cells: Vec<(usize, usize, f64)> = ctx
        .cfg
        .n_set
        .iter()
        .enumerate()
        .flat_map(|(i, &n)| ctx.cfg.heights.iter().map(move |&m| (i, n, m)))
        .collect();
    table.rows = cells
        .par_iter()
        .map(|&(i, n, m)| {
            let key = vec![n.into(), m.into()];
            let run = || -> gklab::Result<Vec<Field>> {
                let (c_n, opnorm) = per_degree[i].clone()?;
                let hat = build_hat_with(n, m, c_n)?;
                let nodes = NodeSet::new(n)?;
                let g = grunwald(&nodes, &hat.to_function())?;
                let gnorm = g.lp_norm(1.0, 0.0, std::f64::consts::PI, &gklab::WeightSpec::unweighted(), &ctx.quad)?;
                let fnorm = hat.l1_norm();
                let gk = gk_contrast(&hat, &ctx.quad)?;
                Ok(vec![
                    (hat.big_n as usize).into(),
                    c_n.into(),
                    gnorm.into(),
                    (m * c_n / 2.0).into(),
                    fnorm.into(),
                    (gnorm / fnorm).into(),
                    gk.into(),
                    opnorm.into(),
                ])
            };
            match run() {
                Ok(v) => Row::ok(key, v),
                Err(e) => Row::failed(key, width, e),
            }
        })
        .collect();

    let col = |name| table.column(name);
    let (ratio, gnorm, pred, gk, opn) = (col("ratio"), col("gnorm"), col("predicted_gnorm"), col("gk_ratio"), col("gk_l1_operator_norm"));
    let ok = table.failed_rows() == 0;
    let mut blowup = ok;
    let mut identity = ok;
    let mut contrast = ok;
    let mut worst_identity = 0.0f64;
    let mut gk_max = 0.0f64;
    let mut min_excess = f64::INFINITY;
    for r in table.rows.iter().filter(|r| r.error.is_none()) {
        let m = r.key[1].as_f64().unwrap_or(f64::NAN);
        let rv = r.value(ratio).unwrap_or(f64::NAN);
        blowup &= rv > m;
        min_excess = min_excess.min(rv / m);
        let rel = (r.value(gnorm).unwrap_or(f64::NAN) / r.value(pred).unwrap_or(f64::NAN) - 1.0).abs();
        worst_identity = worst_identity.max(rel);
        identity &= rel <= 5e-3;
        let g = r.value(gk).unwrap_or(f64::NAN);
        gk_max = gk_max.max(g);
        contrast &= g <= r.value(opn).unwrap_or(f64::NAN) * (1.0 + 1e-9);
    }
    let mut monotone = ok;
    for &n in &ctx.cfg.n_set {
        let series: Vec<f64> = table
            .rows
            .iter()
            .filter(|r| r.key[0] == Field::from(n))
            .filter_map(|r| r.value(ratio))
            .collect();
        monotone &= series.windows(2).all(|w| w[1] >= w[0]);
    }
    let mut s = Summary::default();
    s.constants.insert("gk_ratio_max".into(), json!(gk_max));
    s.constants.insert("gnorm_identity_worst_relative".into(), json!(worst_identity));
    s.bands.push(Band::new("ratio_exceeds_height", blowup, format!("min ratio/m = {min_excess:.3} (must exceed 1)")));
    s.bands.push(Band::new(
        "gnorm_identity",
        identity,
        format!("max | gnorm / (m C_n / 2) - 1 | = {worst_identity:.2e} (tolerance 5e-3)"),
    ));
    s.bands.push(Band::new(
        "gk_contrast",
        contrast,
        format!("max ||GK_n f||_1/||f||_1 = {gk_max:.4}, never above the exact L1 operator norm of GK_n"),
    ));
    s.bands.push(Band::new("monotone_in_height", monotone, "ratio nondecreasing in m for each n (heights ascending)"));
    (table, s)
}

pub(crate) fn maximal(ctx: &Context) -> (Table, Summary) {
    let mut table = Table::new(&["n", "function"], &["eps", "c_eps"]);
    let width = table.width();
    let cells: Vec<(usize, &FunctionSpec)> =
        ctx.cfg.n_set.iter().flat_map(|&n| ctx.functions.iter().map(move |f| (n, f))).collect();
    table.rows = cells
        .par_iter()
        .map(|&(n, f)| {
            let key = vec![n.into(), f.name().into()];
            match maximal_ratio(n, f, ctx.cfg.eps, &ctx.grid, &ctx.quad) {
                Ok(c) => Row::ok(key, vec![ctx.cfg.eps.into(), c.into()]),
                Err(e) => Row::failed(key, width, e),
            }
        })
        .collect();

    let per_n: Vec<(usize, f64)> = ctx
        .cfg
        .n_set
        .iter()
        .filter_map(|&n| {
            table
                .rows
                .iter()
                .filter(|r| r.key[0] == Field::from(n))
                .filter_map(|r| r.value(1))
                .reduce(f64::max)
                .map(|c| (n, c))
        })
        .collect();
    let c_eps = per_n.iter().map(|v| v.1).fold(0.0, f64::max);
    let (fit, slope) = loglog(&per_n);
    let mut s = Summary::default();
    s.fits.insert("c_eps_vs_n".into(), fit_json(&fit));
    s.constants.insert("c_eps_estimate".into(), json!(c_eps));
    s.bands.push(Band::new(
        "c_eps_finite_flat",
        table.failed_rows() == 0 && c_eps.is_finite() && slope.is_some_and(|v| v.abs() <= 0.1),
        format!("C_eps = {c_eps:.4}, slope of per-n maximum vs n = {} (band 0 +- 0.1)", fmt_slope(slope)),
    ));
    if ctx.functions.iter().any(|f| f.name() == "const_one") {
        let worst = table
            .rows
            .iter()
            .filter(|r| r.key[1] == Field::from("const_one"))
            .map(|r| r.value(1).map_or(f64::INFINITY, |c| (c - 1.0).abs()))
            .fold(0.0, f64::max);
        s.bands.push(Band::new("constant_ratio_one", worst <= 1e-8, format!("max |ratio - 1| for f = 1: {worst:.2e} (tolerance 1e-8)")));
    }
    (table, s)
}
