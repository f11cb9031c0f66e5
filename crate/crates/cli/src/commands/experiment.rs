//! `spinsync experiment`: tied-tree table, broadcast checks,
//! counterexamples, interpolation profile.

use std::io::Write;

use anyhow::anyhow;
use serde_json::json;

use spinsync_core::bot::{bot_equivalence_check, evans_subadditivity_check};
use spinsync_core::experiments::{
    counterexample_group_spoon, counterexample_nonuniform, interpolation_profile,
    tied_tree_experiment, TiedTreeMode, TiedTreeTable,
};
use spinsync_core::graph::MultiGraph;
use spinsync_core::rational::{is_probability, parse_ratio, ratio_to_f64, Rational};
use spinsync_core::sp::tree_leaves;

use crate::args::{
    parse_depth_list, BotArgs, CounterexampleArgs, ExperimentCmd, InterpolationArgs, OutputFormat,
    TiedTreeArgs, TiedTreeModeArg,
};
use crate::commands::map_experiment_err;
use crate::error::CliError;
use crate::modelfile::load_model;
use crate::output::{exact_and_decimal, f64_str, ratio_pair, CsvOut, Sink};

pub fn run(cmd: ExperimentCmd) -> Result<(), CliError> {
    match cmd {
        ExperimentCmd::TiedTree(a) => tied_tree(a),
        ExperimentCmd::Bot(a) => bot(a),
        ExperimentCmd::Counterexamples(a) => counterexamples(a),
        ExperimentCmd::Interpolation(a) => interpolation(a),
    }
}

fn parse_rational_arg(name: &str, s: &str) -> Result<Rational, CliError> {
    parse_ratio(s).map_err(|e| CliError::input(anyhow!("--{name}: {e}")))
}

fn parse_probability_arg(name: &str, s: &str) -> Result<Rational, CliError> {
    let r = parse_rational_arg(name, s)?;
    if !is_probability(&r) {
        return Err(CliError::input(anyhow!("--{name} must lie in [0,1]")));
    }
    Ok(r)
}

fn tied_tree(a: TiedTreeArgs) -> Result<(), CliError> {
    let ra = parse_rational_arg("a", &a.a)?;
    let rb = parse_rational_arg("b", &a.b)?;
    let depths = parse_depth_list(&a.depth).map_err(|e| CliError::input(anyhow!(e)))?;
    if a.n.is_empty() {
        return Err(CliError::input(anyhow!("--n needs at least one value")));
    }
    let mode = match a.mode {
        TiedTreeModeArg::Analytic => TiedTreeMode::Analytic,
        TiedTreeModeArg::Collapsed => TiedTreeMode::Collapsed,
        TiedTreeModeArg::Exact => TiedTreeMode::Exact,
    };
    let budgets = a.budgets.to_budgets();
    let table = tied_tree_experiment(&ra, &rb, &a.n, &depths, a.d, mode, &budgets)
        .map_err(map_experiment_err)?;

    let mut sink = Sink::create(a.out.out.as_deref()).map_err(CliError::Internal)?;
    emit_tied_tree(&mut sink, a.out.format, &table)?;
    sink.flush().map_err(CliError::internal)?;
    Ok(())
}

fn emit_tied_tree(
    sink: &mut Sink,
    format: OutputFormat,
    table: &TiedTreeTable,
) -> Result<(), CliError> {
    match format {
        OutputFormat::Text => {
            writeln!(
                sink,
                "tied-tree experiment: a={} b={} mode={}",
                table.a, table.b, table.mode_name
            )
            .map_err(CliError::internal)?;
            for r in &table.rows {
                let i2 = r
                    .i2_value
                    .as_ref()
                    .map(ratio_pair)
                    .unwrap_or_else(|| String::from("-"));
                writeln!(
                    sink,
                    "n={} t={} d={}: per_edge_i2={} eta={} i2={} chi2_path={} sdpi_union={}{} incl_excl_lower={}",
                    r.n,
                    r.depth,
                    r.d,
                    ratio_pair(&r.per_edge_i2),
                    r.eta,
                    i2,
                    ratio_pair(&r.chi2_path_bound),
                    r.sdpi_union_capped,
                    if r.sdpi_union_was_capped { " (capped)" } else { "" },
                    r.sdpi_incl_excl_lower,
                )
                .map_err(CliError::internal)?;
            }
        }
        OutputFormat::Csv => {
            let mut csv = CsvOut::new(&mut *sink).map_err(CliError::Internal)?;
            csv.record(&[
                "n",
                "depth",
                "d",
                "per_edge_i2",
                "per_edge_i2_decimal",
                "per_edge_i2_leading",
                "eta",
                "eta_leading",
                "i2_exact",
                "i2_decimal",
                "chi2_path_bound",
                "chi2_path_bound_decimal",
                "sdpi_union_raw",
                "sdpi_union_capped",
                "was_capped",
                "sdpi_incl_excl_lower",
            ])
            .map_err(CliError::Internal)?;
            for r in &table.rows {
                let (pe, pd) = exact_and_decimal(&r.per_edge_i2);
                let (i2e, i2d) = match &r.i2_value {
                    Some(v) => exact_and_decimal(v),
                    None => (String::new(), String::new()),
                };
                let (cpe, cpd) = exact_and_decimal(&r.chi2_path_bound);
                csv.record(&[
                    r.n.to_string(),
                    r.depth.to_string(),
                    r.d.to_string(),
                    pe,
                    pd,
                    exact_and_decimal(&r.per_edge_i2_leading).0,
                    f64_str(r.eta),
                    f64_str(r.eta_leading),
                    i2e,
                    i2d,
                    cpe,
                    cpd,
                    f64_str(r.sdpi_union_raw),
                    f64_str(r.sdpi_union_capped),
                    r.sdpi_union_was_capped.to_string(),
                    f64_str(r.sdpi_incl_excl_lower),
                ])
                .map_err(CliError::Internal)?;
            }
        }
        OutputFormat::Json => {
            let rows: Vec<_> = table
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "n": r.n,
                        "depth": r.depth,
                        "d": r.d,
                        "per_edge_i2": exact_and_decimal(&r.per_edge_i2).0,
                        "per_edge_i2_leading": exact_and_decimal(&r.per_edge_i2_leading).0,
                        "eta": r.eta,
                        "eta_leading": r.eta_leading,
                        "i2": r.i2_value.as_ref().map(|v| exact_and_decimal(v).0),
                        "chi2_path_bound": exact_and_decimal(&r.chi2_path_bound).0,
                        "sdpi_union_raw": r.sdpi_union_raw,
                        "sdpi_union_capped": r.sdpi_union_capped,
                        "was_capped": r.sdpi_union_was_capped,
                        "sdpi_incl_excl_lower": r.sdpi_incl_excl_lower,
                    })
                })
                .collect();
            let doc = json!({
                "a": exact_and_decimal(&table.a).0,
                "b": exact_and_decimal(&table.b).0,
                "mode": table.mode_name,
                "rows": rows,
            });
            serde_json::to_writer_pretty(&mut *sink, &doc).map_err(CliError::internal)?;
            writeln!(sink).map_err(CliError::internal)?;
        }
    }
    Ok(())
}

fn bot(a: BotArgs) -> Result<(), CliError> {
    let eps = parse_probability_arg("epsilon", &a.epsilon)?;
    let tree = MultiGraph::regular_tree(a.depth, a.branching);
    let budgets = a.budgets.to_budgets();
    let leaves = tree_leaves(&tree, "r").map_err(crate::commands::map_sp_err)?;
    let leaf_refs: Vec<&str> = leaves.iter().map(|s| s.as_str()).collect();
    let equiv = bot_equivalence_check(&tree, "r", &eps, &leaf_refs, &budgets)
        .map_err(|e| CliError::input(anyhow!("{e}")))?;
    let evans = evans_subadditivity_check(&tree, "r", &eps, &leaf_refs, &budgets)
        .map_err(|e| CliError::input(anyhow!("{e}")))?;

    let mut sink = Sink::create(a.out.out.as_deref()).map_err(CliError::Internal)?;
    match a.out.format {
        OutputFormat::Text => {
            writeln!(
                sink,
                "broadcast equivalence: I2 {} = {} ({}), KL {} ~ {} ({})",
                ratio_pair(&equiv.i2_broadcast),
                ratio_pair(&equiv.i2_sync),
                if equiv.i2_equal { "equal" } else { "DIFFER" },
                ratio_to_f64(&equiv.kl_broadcast_hp),
                ratio_to_f64(&equiv.kl_sync_hp),
                if equiv.kl_close { "close" } else { "DIFFER" },
            )
            .map_err(CliError::internal)?;
            writeln!(
                sink,
                "leaf subadditivity: I2 joint {} <= sum {} ({}); KL joint {} <= sum {} ({})",
                ratio_pair(&evans.i2_joint),
                ratio_pair(&evans.i2_sum),
                if evans.i2_holds { "holds" } else { "VIOLATED" },
                ratio_to_f64(&evans.kl_joint_hp),
                ratio_to_f64(&evans.kl_sum_hp),
                if evans.kl_holds { "holds" } else { "VIOLATED" },
            )
            .map_err(CliError::internal)?;
            for step in &evans.chain {
                writeln!(
                    sink,
                    "chain {}: {} vs {} [{}]",
                    step.name,
                    ratio_to_f64(&step.lhs),
                    ratio_to_f64(&step.rhs),
                    if step.holds { "ok" } else { "FAILED" }
                )
                .map_err(CliError::internal)?;
            }
        }
        OutputFormat::Csv => {
            let mut csv = CsvOut::new(&mut sink).map_err(CliError::Internal)?;
            csv.record(&["name", "lhs", "rhs", "holds"])
                .map_err(CliError::Internal)?;
            csv.record(&[
                "equivalence_i2",
                &exact_and_decimal(&equiv.i2_broadcast).0,
                &exact_and_decimal(&equiv.i2_sync).0,
                &equiv.i2_equal.to_string(),
            ])
            .map_err(CliError::Internal)?;
            csv.record(&[
                "subadditivity_i2",
                &exact_and_decimal(&evans.i2_joint).0,
                &exact_and_decimal(&evans.i2_sum).0,
                &evans.i2_holds.to_string(),
            ])
            .map_err(CliError::Internal)?;
            for step in &evans.chain {
                csv.record(&[
                    step.name.as_str(),
                    &exact_and_decimal(&step.lhs).0,
                    &exact_and_decimal(&step.rhs).0,
                    &step.holds.to_string(),
                ])
                .map_err(CliError::Internal)?;
            }
        }
        OutputFormat::Json => {
            let doc = json!({
                "equivalence": {
                    "i2_broadcast": exact_and_decimal(&equiv.i2_broadcast).0,
                    "i2_sync": exact_and_decimal(&equiv.i2_sync).0,
                    "i2_equal": equiv.i2_equal,
                    "kl_broadcast_bits": ratio_to_f64(&equiv.kl_broadcast_hp),
                    "kl_sync_bits": ratio_to_f64(&equiv.kl_sync_hp),
                    "kl_close": equiv.kl_close,
                },
                "subadditivity": {
                    "i2_joint": exact_and_decimal(&evans.i2_joint).0,
                    "i2_sum": exact_and_decimal(&evans.i2_sum).0,
                    "i2_holds": evans.i2_holds,
                    "kl_holds": evans.kl_holds,
                },
                "chain": evans.chain.iter().map(|s| json!({
                    "name": s.name,
                    "lhs": exact_and_decimal(&s.lhs).0,
                    "rhs": exact_and_decimal(&s.rhs).0,
                    "holds": s.holds,
                })).collect::<Vec<_>>(),
            });
            serde_json::to_writer_pretty(&mut sink, &doc).map_err(CliError::internal)?;
            writeln!(sink).map_err(CliError::internal)?;
        }
    }
    sink.flush().map_err(CliError::internal)?;

    if !(equiv.i2_equal && equiv.kl_close && evans.i2_holds && evans.kl_holds && evans.chain_ok) {
        return Err(CliError::internal(anyhow!(
            "broadcast checks failed; this signals a numerics bug"
        )));
    }
    Ok(())
}

fn counterexamples(a: CounterexampleArgs) -> Result<(), CliError> {
    let delta = parse_probability_arg("delta", &a.delta)?;
    let eps = parse_probability_arg("epsilon", &a.epsilon)?;
    let budgets = a.budgets.to_budgets();
    let nonuni =
        counterexample_nonuniform(&delta, &eps, &budgets).map_err(map_experiment_err)?;
    let spoon = counterexample_group_spoon(&budgets).map_err(map_experiment_err)?;

    let mut sink = Sink::create(a.out.out.as_deref()).map_err(CliError::Internal)?;
    match a.out.format {
        OutputFormat::Text => {
            writeln!(
                sink,
                "non-uniform (delta={} eps={}): joint={} single={} formulas_match={} violated={}",
                nonuni.delta,
                nonuni.epsilon,
                ratio_pair(&nonuni.enum_joint),
                ratio_pair(&nonuni.enum_single),
                nonuni.formulas_match,
                nonuni.subadditivity_violated,
            )
            .map_err(CliError::internal)?;
            writeln!(
                sink,
                "spoon (Z4): I2(all)={} I2(e,f1)={} I2(e,f2)={} expected (1, 1/2, 0) match={} subadditive={}",
                ratio_pair(&spoon.i2_all),
                ratio_pair(&spoon.i2_e_f1),
                ratio_pair(&spoon.i2_e_f2),
                spoon.matches_expected,
                spoon.path_subadditivity_holds,
            )
            .map_err(CliError::internal)?;
        }
        OutputFormat::Csv => {
            let mut csv = CsvOut::new(&mut sink).map_err(CliError::Internal)?;
            csv.record(&["instance", "name", "exact", "decimal"])
                .map_err(CliError::Internal)?;
            for (name, v) in [
                ("formula_joint", &nonuni.formula_joint),
                ("formula_single", &nonuni.formula_single),
                ("enum_joint", &nonuni.enum_joint),
                ("enum_single", &nonuni.enum_single),
            ] {
                let (e, d) = exact_and_decimal(v);
                csv.record(&["nonuniform", name, &e, &d])
                    .map_err(CliError::Internal)?;
            }
            csv.record(&[
                "nonuniform",
                "subadditivity_violated",
                &nonuni.subadditivity_violated.to_string(),
                "",
            ])
            .map_err(CliError::Internal)?;
            for (name, v) in [
                ("i2_all", &spoon.i2_all),
                ("i2_e_f1", &spoon.i2_e_f1),
                ("i2_e_f2", &spoon.i2_e_f2),
            ] {
                let (e, d) = exact_and_decimal(v);
                csv.record(&["spoon", name, &e, &d])
                    .map_err(CliError::Internal)?;
            }
            csv.record(&[
                "spoon",
                "path_subadditivity_holds",
                &spoon.path_subadditivity_holds.to_string(),
                "",
            ])
            .map_err(CliError::Internal)?;
        }
        OutputFormat::Json => {
            let doc = json!({
                "nonuniform": {
                    "delta": exact_and_decimal(&nonuni.delta).0,
                    "epsilon": exact_and_decimal(&nonuni.epsilon).0,
                    "formula_joint": exact_and_decimal(&nonuni.formula_joint).0,
                    "formula_single": exact_and_decimal(&nonuni.formula_single).0,
                    "enum_joint": exact_and_decimal(&nonuni.enum_joint).0,
                    "enum_single": exact_and_decimal(&nonuni.enum_single).0,
                    "formulas_match": nonuni.formulas_match,
                    "subadditivity_violated": nonuni.subadditivity_violated,
                },
                "spoon": {
                    "i2_all": exact_and_decimal(&spoon.i2_all).0,
                    "i2_e_f1": exact_and_decimal(&spoon.i2_e_f1).0,
                    "i2_e_f2": exact_and_decimal(&spoon.i2_e_f2).0,
                    "matches_expected": spoon.matches_expected,
                    "path_subadditivity_holds": spoon.path_subadditivity_holds,
                },
            });
            serde_json::to_writer_pretty(&mut sink, &doc).map_err(CliError::internal)?;
            writeln!(sink).map_err(CliError::internal)?;
        }
    }
    sink.flush().map_err(CliError::internal)?;

    if !nonuni.formulas_match || !spoon.matches_expected {
        return Err(CliError::internal(anyhow!(
            "a counterexample value failed to reproduce"
        )));
    }
    Ok(())
}

fn interpolation(a: InterpolationArgs) -> Result<(), CliError> {
    let model = load_model(&a.model).map_err(CliError::Input)?;
    let budgets = a.budgets.to_budgets();
    let rep = interpolation_profile(&model, &a.edge, a.grid, &budgets)
        .map_err(map_experiment_err)?;

    let mut sink = Sink::create(a.out.out.as_deref()).map_err(CliError::Internal)?;
    match a.out.format {
        OutputFormat::Text => {
            writeln!(
                sink,
                "interpolation of edge {} ({} grid points): degenerate={} h_nondecreasing={} h(1)=1 {} per_outcome_closed_form={}",
                rep.edge,
                rep.grid.len(),
                rep.degenerate,
                rep.h_nondecreasing,
                rep.h_at_one_is_one,
                rep.per_outcome_closed_form_ok,
            )
            .map_err(CliError::internal)?;
            for p in &rep.grid {
                let h = p
                    .h
                    .as_ref()
                    .map(ratio_pair)
                    .unwrap_or_else(|| String::from("-"));
                writeln!(sink, "t={}: I={} h={}", p.t, ratio_pair(&p.i_of_t), h)
                    .map_err(CliError::internal)?;
            }
        }
        OutputFormat::Csv => {
            let mut csv = CsvOut::new(&mut sink).map_err(CliError::Internal)?;
            csv.record(&["t", "i_exact", "i_decimal", "h_exact", "h_decimal"])
                .map_err(CliError::Internal)?;
            for p in &rep.grid {
                let (ie, id) = exact_and_decimal(&p.i_of_t);
                let (he, hd) = match &p.h {
                    Some(h) => exact_and_decimal(h),
                    None => (String::new(), String::new()),
                };
                csv.record(&[exact_and_decimal(&p.t).0, ie, id, he, hd])
                    .map_err(CliError::Internal)?;
            }
        }
        OutputFormat::Json => {
            let doc = json!({
                "edge": rep.edge,
                "degenerate": rep.degenerate,
                "h_nondecreasing": rep.h_nondecreasing,
                "h_at_one_is_one": rep.h_at_one_is_one,
                "per_outcome_closed_form_ok": rep.per_outcome_closed_form_ok,
                "grid": rep.grid.iter().map(|p| json!({
                    "t": exact_and_decimal(&p.t).0,
                    "i": exact_and_decimal(&p.i_of_t).0,
                    "h": p.h.as_ref().map(|h| exact_and_decimal(h).0),
                })).collect::<Vec<_>>(),
            });
            serde_json::to_writer_pretty(&mut sink, &doc).map_err(CliError::internal)?;
            writeln!(sink).map_err(CliError::internal)?;
        }
    }
    sink.flush().map_err(CliError::internal)?;
    Ok(())
}
