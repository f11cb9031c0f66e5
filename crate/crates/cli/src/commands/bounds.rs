//! `spinsync bounds`: the full bound report for one (u, W) query.

use std::collections::BTreeMap;
use std::io::Write;

use anyhow::anyhow;
use serde_json::json;

use spinsync_core::bounds::{compute_bound_report, BoundReport, ConnValue, McPolicy};
use spinsync_core::conn::{conn_mc_hits, mc_estimate_from_hits};
use spinsync_core::model::SyncModel;
use spinsync_core::rational::{ratio_to_f64, Rational};

use crate::args::{BoundsArgs, OutputFormat};
use crate::commands::map_bounds_err;
use crate::error::CliError;
use crate::modelfile::load_model;
use crate::output::{exact_and_decimal, f64_str, ratio_pair, CsvOut, Sink};

pub fn run(a: BoundsArgs) -> Result<(), CliError> {
    let model = load_model(&a.model).map_err(CliError::Input)?;
    let budgets = a.budgets.to_budgets();
    let w: Vec<String> = match (&a.v, &a.w) {
        (Some(v), None) => vec![v.clone()],
        (None, Some(ws)) if !ws.is_empty() => ws.clone(),
        _ => {
            return Err(CliError::input(anyhow!(
                "give exactly one of --v VERTEX or --W v1,v2,..."
            )))
        }
    };
    let wrefs: Vec<&str> = w.iter().map(|s| s.as_str()).collect();
    let mc = match (a.seed, a.trials) {
        (Some(seed), Some(trials)) => Some(McPolicy { trials, seed }),
        (Some(seed), None) => Some(McPolicy {
            trials: 1_000_000,
            seed,
        }),
        (None, _) => None,
    };

    let mut report = compute_bound_report(&model, &a.u, &wrefs, &budgets, mc)
        .map_err(map_bounds_err)?;

    // With several workers, redo any Monte Carlo value by partitioned trial
    // ranges; counter addressing makes the merged count identical.
    if a.jobs > 1 {
        if let Some(policy) = mc {
            parallelize_mc(&model, &a.u, &wrefs, policy, a.jobs, &mut report)?;
        }
    }

    emit(&a, &w, &report)
}

fn parallelize_mc(
    model: &SyncModel,
    u: &str,
    w: &[&str],
    policy: McPolicy,
    jobs: u64,
    report: &mut BoundReport,
) -> Result<(), CliError> {
    use spinsync_core::info::{edge_gamma, sdpi_chi2};

    let g = model.graph();
    let rebuild = |gamma: &BTreeMap<String, f64>| -> Result<ConnValue, CliError> {
        let chunk = policy.trials.div_ceil(jobs);
        let hits: u64 = std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for j in 0..jobs {
                let lo = (j * chunk).min(policy.trials);
                let hi = ((j + 1) * chunk).min(policy.trials);
                let gamma = &*gamma;
                handles.push(scope.spawn(move || {
                    conn_mc_hits(g, gamma, u, w, policy.seed, lo, hi).unwrap_or(0)
                }));
            }
            handles.into_iter().map(|h| h.join().unwrap_or(0)).sum()
        });
        Ok(ConnValue::MonteCarlo(mc_estimate_from_hits(
            hits,
            policy.trials,
            policy.seed,
        )))
    };

    if matches!(report.symmetric_perc, Some(ConnValue::MonteCarlo(_))) {
        let mut gamma = BTreeMap::new();
        for (i, e) in g.edges().iter().enumerate() {
            gamma.insert(
                e.id.clone(),
                ratio_to_f64(&edge_gamma(model.channel(i)).map_err(crate::commands::map_info_err)?),
            );
        }
        report.symmetric_perc = Some(rebuild(&gamma)?);
    }
    if matches!(report.sdpi_perc, Some(ConnValue::MonteCarlo(_))) {
        let mut gamma = BTreeMap::new();
        for (i, e) in g.edges().iter().enumerate() {
            gamma.insert(
                e.id.clone(),
                sdpi_chi2(model.channel(i))
                    .map_err(crate::commands::map_info_err)?
                    .eta,
            );
        }
        report.sdpi_perc = Some(rebuild(&gamma)?);
    }
    Ok(())
}

fn conn_text(v: &ConnValue) -> String {
    match v {
        ConnValue::ExactSubsets(r) => format!("{} [exact-subsets]", ratio_pair(r)),
        ConnValue::SpReliability(r) => format!("{} [sp-reliability]", ratio_pair(r)),
        ConnValue::MonteCarlo(mc) => format!(
            "{} +- {} [monte-carlo seed={} trials={} generator={}]",
            mc.estimate, mc.half_width, mc.seed, mc.trials, mc.generator
        ),
    }
}

fn conn_cells(v: &ConnValue) -> (String, String, String) {
    match v {
        ConnValue::ExactSubsets(r) | ConnValue::SpReliability(r) => {
            let (e, d) = exact_and_decimal(r);
            (e, d, String::from(v.method()))
        }
        ConnValue::MonteCarlo(mc) => (
            String::new(),
            f64_str(mc.estimate),
            format!(
                "monte-carlo seed={} trials={} half_width={} generator={}",
                mc.seed, mc.trials, mc.half_width, mc.generator
            ),
        ),
    }
}

fn conn_json(v: &ConnValue) -> serde_json::Value {
    match v {
        ConnValue::ExactSubsets(r) | ConnValue::SpReliability(r) => {
            let (e, d) = exact_and_decimal(r);
            json!({"exact": e, "decimal": d, "method": v.method()})
        }
        ConnValue::MonteCarlo(mc) => json!({
            "estimate": mc.estimate,
            "half_width": mc.half_width,
            "seed": mc.seed,
            "trials": mc.trials,
            "generator": mc.generator,
            "method": "monte-carlo",
        }),
    }
}

fn opt_rational_cells(v: &Option<Rational>, note: &Option<String>) -> (String, String, String) {
    match v {
        Some(r) => {
            let (e, d) = exact_and_decimal(r);
            (e, d, String::new())
        }
        None => (
            String::new(),
            String::new(),
            note.clone().unwrap_or_default(),
        ),
    }
}

fn emit(a: &BoundsArgs, w: &[String], rep: &BoundReport) -> Result<(), CliError> {
    let mut sink = Sink::create(a.out.out.as_deref()).map_err(CliError::Internal)?;
    match a.out.format {
        OutputFormat::Text => {
            writeln!(sink, "query: u={} W={}", rep.u, w.join(",")).map_err(CliError::internal)?;
            match (&rep.exact_i2, &rep.exact_i2_note) {
                (Some(r), _) => {
                    writeln!(sink, "exact_i2 = {}", ratio_pair(r)).map_err(CliError::internal)?
                }
                (None, note) => writeln!(sink, "exact_i2: {}", note.as_deref().unwrap_or("n/a"))
                    .map_err(CliError::internal)?,
            }
            if let Some(kl) = rep.ikl_bits {
                writeln!(sink, "ikl_bits = {kl}").map_err(CliError::internal)?;
            }
            match (&rep.path_sum, &rep.path_sum_note) {
                (Some(r), _) => {
                    writeln!(sink, "path_sum_bound = {}", ratio_pair(r))
                        .map_err(CliError::internal)?
                }
                (None, note) =>

                    writeln!(sink, "path_sum_bound: {}", note.as_deref().unwrap_or("n/a"))
                        .map_err(CliError::internal)?,
            }
            match (&rep.symmetric_perc, &rep.symmetric_perc_note) {
                (Some(v), _) => writeln!(sink, "symmetric_percolation_bound = {}", conn_text(v))
                    .map_err(CliError::internal)?,
                (None, note) => writeln!(
                    sink,
                    "symmetric_percolation_bound: {}",
                    note.as_deref().unwrap_or("n/a")
                )
                .map_err(CliError::internal)?,
            }
            match (&rep.sdpi_perc, &rep.sdpi_perc_note) {
                (Some(v), _) => writeln!(sink, "sdpi_percolation_bound = {}", conn_text(v))
                    .map_err(CliError::internal)?,
                (None, note) => writeln!(
                    sink,
                    "sdpi_percolation_bound: {}",
                    note.as_deref().unwrap_or("n/a")
                )
                .map_err(CliError::internal)?,
            }
            for row in &rep.edges {
                writeln!(
                    sink,
                    "edge {}: gamma_i2 = {}, eta = {}, symmetric = {}",
                    row.edge,
                    ratio_pair(&row.gamma_i2),
                    row.eta,
                    row.symmetric
                )
                .map_err(CliError::internal)?;
            }
            let verdict = |x: Option<bool>| match x {
                Some(true) => "holds",
                Some(false) => "VIOLATED",
                None => "n/a",
            };
            writeln!(
                sink,
                "theorem1 {} / theorem2 {} / theorem3 {}",
                verdict(rep.theorem1_ok),
                verdict(rep.theorem2_ok),
                verdict(rep.theorem3_ok)
            )
            .map_err(CliError::internal)?;
        }
        OutputFormat::Csv => {
            let mut csv = CsvOut::new(&mut sink).map_err(CliError::Internal)?;
            csv.record(&["section", "name", "exact", "decimal", "note"])
                .map_err(CliError::Internal)?;
            csv.record(&["meta", "u", &rep.u, "", ""])
                .map_err(CliError::Internal)?;
            csv.record(&["meta", "w", &w.join(";"), "", ""])
                .map_err(CliError::Internal)?;
            let (e, d, n) = opt_rational_cells(&rep.exact_i2, &rep.exact_i2_note);
            csv.record(&["value", "exact_i2", &e, &d, &n])
                .map_err(CliError::Internal)?;
            let kl = rep.ikl_bits.map(f64_str).unwrap_or_default();
            csv.record(&["value", "ikl_bits", "", &kl, ""])
                .map_err(CliError::Internal)?;
            let (e, d, n) = opt_rational_cells(&rep.path_sum, &rep.path_sum_note);
            csv.record(&["bound", "path_sum", &e, &d, &n])
                .map_err(CliError::Internal)?;
            let (e, d, n) = match (&rep.symmetric_perc, &rep.symmetric_perc_note) {
                (Some(v), _) => conn_cells(v),
                (None, note) => (String::new(), String::new(), note.clone().unwrap_or_default()),
            };
            csv.record(&["bound", "symmetric_perc", &e, &d, &n])
                .map_err(CliError::Internal)?;
            let (e, d, n) = match (&rep.sdpi_perc, &rep.sdpi_perc_note) {
                (Some(v), _) => conn_cells(v),
                (None, note) => (String::new(), String::new(), note.clone().unwrap_or_default()),
            };
            csv.record(&["bound", "sdpi_perc", &e, &d, &n])
                .map_err(CliError::Internal)?;
            for row in &rep.edges {
                let (e, d) = exact_and_decimal(&row.gamma_i2);
                csv.record(&[
                    "edge",
                    &row.edge,
                    &e,
                    &d,
                    &format!("eta={} symmetric={}", f64_str(row.eta), row.symmetric),
                ])
                .map_err(CliError::Internal)?;
            }
            let flag = |x: Option<bool>| match x {
                Some(true) => "true",
                Some(false) => "false",
                None => "",
            };
            csv.record(&["flag", "theorem1_ok", flag(rep.theorem1_ok), "", ""])
                .map_err(CliError::Internal)?;
            csv.record(&["flag", "theorem2_ok", flag(rep.theorem2_ok), "", ""])
                .map_err(CliError::Internal)?;
            csv.record(&["flag", "theorem3_ok", flag(rep.theorem3_ok), "", ""])
                .map_err(CliError::Internal)?;
        }
        OutputFormat::Json => {
            let opt_ratio = |v: &Option<Rational>, note: &Option<String>| match v {
                Some(r) => {
                    let (e, d) = exact_and_decimal(r);
                    json!({"exact": e, "decimal": d})
                }
                None => json!({"note": note.clone().unwrap_or_default()}),
            };
            let doc = json!({
                "u": rep.u,
                "w": w,
                "exact_i2": opt_ratio(&rep.exact_i2, &rep.exact_i2_note),
                "ikl_bits": rep.ikl_bits,
                "path_sum": opt_ratio(&rep.path_sum, &rep.path_sum_note),
                "symmetric_perc": match (&rep.symmetric_perc, &rep.symmetric_perc_note) {
                    (Some(v), _) => conn_json(v),
                    (None, note) => json!({"note": note.clone().unwrap_or_default()}),
                },
                "sdpi_perc": match (&rep.sdpi_perc, &rep.sdpi_perc_note) {
                    (Some(v), _) => conn_json(v),
                    (None, note) => json!({"note": note.clone().unwrap_or_default()}),
                },
                "edges": rep.edges.iter().map(|row| {
                    let (e, d) = exact_and_decimal(&row.gamma_i2);
                    json!({
                        "edge": row.edge,
                        "gamma_i2": {"exact": e, "decimal": d},
                        "eta": row.eta,
                        "symmetric": row.symmetric,
                    })
                }).collect::<Vec<_>>(),
                "theorem1_ok": rep.theorem1_ok,
                "theorem2_ok": rep.theorem2_ok,
                "theorem3_ok": rep.theorem3_ok,
            });
            serde_json::to_writer_pretty(&mut sink, &doc).map_err(CliError::internal)?;
            writeln!(sink).map_err(CliError::internal)?;
        }
    }
    sink.flush().map_err(CliError::internal)?;
    Ok(())
}
