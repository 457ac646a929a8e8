use std::f64::consts::PI;

use gklab::analysis::{prop_norm_i, prop_norm_ii};
use gklab::kernels::{KernelKind, NodeSet};
use gklab::operators::korovkin_probe;
use rayon::prelude::*;
use serde_json::json;

use super::{fit_json, fmt_slope, loglog, p_label, semilog, Context};
use crate::report::{Band, Field, Row, Summary, Table};

/// Largest degree for which the cardinal defect is tabulated.
pub const CARDINAL_MAX_N: usize = 256;

pub(crate) fn lebesgue(ctx: &Context) -> (Table, Summary) {
    let mut table = Table::new(
        &["n"],
        &["lambda_grunwald", "lambda_lagrange", "unity_defect", "cardinal_defect"],
    );
    let width = table.width();
    table.rows = ctx
        .cfg
        .n_set
        .par_iter()
        .map(|&n| {
            let run = || -> gklab::Result<Vec<Field>> {
                let nodes = NodeSet::<f64>::new(n)?;
                let g = nodes.lebesgue_constant(KernelKind::Grunwald, &ctx.grid)?;
                let l = nodes.lebesgue_constant(KernelKind::Lagrange, &ctx.grid)?;
                let ones = vec![1.0; n];
                let unity = ctx
                    .grid
                    .points()
                    .par_iter()
                    .map(|&t| (nodes.combine(KernelKind::Grunwald, &ones, t) - 1.0).abs())
                    .reduce(|| 0.0, f64::max);
                let cardinal = if n <= CARDINAL_MAX_N {
                    let mut row = vec![0.0; n];
                    let mut worst = 0.0f64;
                    for j in 1..=n {
                        nodes.fundamental_row(nodes.theta(j)?, &mut row);
                        for (k, v) in row.iter().enumerate() {
                            let want = if k + 1 == j { 1.0 } else { 0.0 };
                            worst = worst.max((v - want).abs());
                        }
                    }
                    Field::Float(worst)
                } else {
                    Field::Missing
                };
                Ok(vec![g.into(), l.into(), unity.into(), cardinal])
            };
            match run() {
                Ok(values) => Row::ok(vec![n.into()], values),
                Err(e) => Row::failed(vec![n.into()], width, e),
            }
        })
        .collect();

    let series = |col: usize| -> Vec<(usize, f64)> {
        table
            .rows
            .iter()
            .filter_map(|r| Some((r.key[0].as_f64()? as usize, r.value(col)?)))
            .collect()
    };
    let (gfit, gslope) = semilog(&series(0));
    let (lfit, lslope) = semilog(&series(1));
    let unity = series(2).iter().map(|p| p.1).fold(0.0, f64::max);
    let cardinal = series(3).iter().map(|p| p.1).fold(0.0, f64::max);
    let glambda = series(0).iter().map(|p| p.1).fold(0.0, f64::max);

    let mut s = Summary::default();
    s.fits.insert("grunwald_vs_ln_n".into(), fit_json(&gfit));
    s.fits.insert("lagrange_vs_ln_n".into(), fit_json(&lfit));
    s.constants.insert("grunwald_lebesgue_max".into(), json!(glambda));
    s.constants.insert("unity_defect_max".into(), json!(unity));
    s.constants.insert("cardinal_defect_max".into(), json!(cardinal));
    s.bands.push(Band::new(
        "grunwald_bounded",
        gslope.is_some_and(|v| v.abs() <= 0.05),
        format!("slope of grunwald constant vs ln n = {} (band 0 +- 0.05)", fmt_slope(gslope)),
    ));
    s.bands.push(Band::new(
        "lagrange_log_growth",
        lslope.is_some_and(|v| (v - 2.0 / PI).abs() <= 0.05),
        format!("slope of lagrange constant vs ln n = {} (band 2/pi +- 0.05)", fmt_slope(lslope)),
    ));
    s.bands.push(Band::new(
        "partition_of_unity",
        table.failed_rows() == 0 && unity <= 1e-8,
        format!("max |sum S_k - 1| = {unity:.3e} (tolerance 1e-8)"),
    ));
    s.bands.push(Band::new(
        "cardinal",
        table.failed_rows() == 0 && cardinal <= 1e-10,
        format!("max |P_k(theta_j) - delta_kj| = {cardinal:.3e} for n <= {CARDINAL_MAX_N} (tolerance 1e-10)"),
    ));
    (table, s)
}

pub(crate) fn prop_integrals(ctx: &Context) -> (Table, Summary) {
    let mut table = Table::new(&["n", "k_choice", "k", "p"], &["norm_i", "norm_ii", "ratio_i_log"]);
    let width = table.width();
    let mut cells = Vec::new();
    for &n in &ctx.cfg.n_set {
        for (choice, k) in [("first", 1), ("middle", n.div_ceil(2))] {
            for &p in &ctx.cfg.p_set {
                cells.push((n, choice, k, p));
            }
        }
    }
    table.rows = cells
        .par_iter()
        .map(|&(n, choice, k, p)| {
            let key = vec![n.into(), choice.into(), k.into(), p.into()];
            let run = || -> gklab::Result<Vec<Field>> {
                let i = prop_norm_i(n, k, p, &ctx.quad)?;
                let ii = prop_norm_ii(n, k, p, &ctx.quad)?;
                let nf = n as f64;
                let ratio = if p == 1.0 { Field::Float(i / ((1.0 + nf.ln()) / (nf * nf))) } else { Field::Missing };
                Ok(vec![i.into(), ii.into(), ratio])
            };
            match run() {
                Ok(v) => Row::ok(key, v),
                Err(e) => Row::failed(key, width, e),
            }
        })
        .collect();

    let mut s = Summary::default();
    for choice in ["first", "middle"] {
        for &p in &ctx.cfg.p_set {
            let pick = |col: usize| -> Vec<(usize, f64)> {
                table
                    .rows
                    .iter()
                    .filter(|r| r.key[1] == Field::from(choice) && r.key[3] == Field::Float(p))
                    .filter_map(|r| Some((r.key[0].as_f64()? as usize, r.value(col)?)))
                    .collect()
            };
            let tag = format!("k={choice},p={}", p_label(p));
            let (ifit, islope) = loglog(&pick(0));
            let (iifit, iislope) = loglog(&pick(1));
            s.fits.insert(format!("norm_i[{tag}]"), fit_json(&ifit));
            s.fits.insert(format!("norm_ii[{tag}]"), fit_json(&iifit));
            s.bands.push(Band::new(
                format!("norm_ii_slope[{tag}]"),
                iislope.is_some_and(|v| (v + 1.0 / p).abs() <= 0.1),
                format!("slope {} (band -1/p +- 0.1)", fmt_slope(iislope)),
            ));
            if p == 2.0 {
                s.bands.push(Band::new(
                    format!("norm_i_slope[{tag}]"),
                    islope.is_some_and(|v| (v + 1.5).abs() <= 0.15),
                    format!("slope {} (band -1.5 +- 0.15)", fmt_slope(islope)),
                ));
            }
            if p == 1.0 {
                let ratios: Vec<(usize, f64)> = pick(2);
                let hi = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
                let lo = ratios.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
                let (rfit, rslope) = loglog(&ratios);
                s.fits.insert(format!("ratio_i_log[{tag}]"), fit_json(&rfit));
                let mut pass = !ratios.is_empty() && lo > 0.0 && hi / lo <= 4.0;
                let mut detail = format!("ratio to (1+ln n)/n^2 in [{lo:.4}, {hi:.4}] (corridor: max/min <= 4)");
                if choice == "middle" {
                    pass &= rslope.is_some_and(|v| v.abs() <= 0.15);
                    detail.push_str(&format!(", slope {} (band 0 +- 0.15)", fmt_slope(rslope)));
                }
                s.bands.push(Band::new(format!("norm_i_corridor[{tag}]"), pass, detail));
            }
        }
    }
    (table, s)
}

pub(crate) fn korovkin(ctx: &Context) -> (Table, Summary) {
    let mut table = Table::new(&["n"], &["e0", "e1", "e2"]);
    let width = table.width();
    table.rows = ctx
        .cfg
        .n_set
        .par_iter()
        .map(|&n| match korovkin_probe::<f64>(n, &ctx.grid, &ctx.quad) {
            Ok(pr) => Row::ok(vec![n.into()], vec![pr.e0.into(), pr.e1.into(), pr.e2.into()]),
            Err(e) => Row::failed(vec![n.into()], width, e),
        })
        .collect();
    let col = |i: usize| -> Vec<(usize, f64)> {
        table.rows.iter().filter_map(|r| Some((r.key[0].as_f64()? as usize, r.value(i)?))).collect()
    };
    let mut s = Summary::default();
    let e0_max = col(0).iter().map(|v| v.1).fold(0.0, f64::max);
    s.constants.insert("e0_max".into(), json!(e0_max));
    s.bands.push(Band::new(
        "e0_exact",
        table.failed_rows() == 0 && e0_max <= 1e-10,
        format!("max e0 = {e0_max:.3e} (tolerance 1e-10)"),
    ));
    for (i, name) in [(1, "e1"), (2, "e2")] {
        let series = col(i);
        let (fit, _) = loglog(&series);
        s.fits.insert(name.into(), fit_json(&fit));
        let (first, last) = (series.first().map(|v| v.1), series.last().map(|v| v.1));
        let pass = matches!((first, last), (Some(a), Some(b)) if b < 0.1 * a) && table.failed_rows() == 0;
        s.bands.push(Band::new(
            format!("{name}_decay"),
            pass,
            format!("first {:.4e}, last {:.4e} (last must be below 10% of first)", first.unwrap_or(f64::NAN), last.unwrap_or(f64::NAN)),
        ));
    }
    (table, s)
}
