//! `spinsync info`: exact informations of a vertex pair.

use std::io::Write;

use anyhow::anyhow;
use serde_json::json;

use spinsync_core::info::{
    binary_input_joint, chi2_mi_binary, exact_i2_conditional, exact_ikl_conditional, InfoError,
    InfoValue,
};
use spinsync_core::rational::{rat, ratio_to_f64, Rational};
use spinsync_core::sp::{sp_collapse_to_channel, sp_recognize, SpRecognition};

use crate::args::{InfoArgs, InfoMode, OutputFormat};
use crate::commands::{map_info_err, map_sp_err};
use crate::error::CliError;
use crate::modelfile::load_model;
use crate::output::{exact_and_decimal, f64_str, ratio_pair, CsvOut, Sink};

pub fn run(a: InfoArgs) -> Result<(), CliError> {
    let model = load_model(&a.model).map_err(CliError::Input)?;
    let budgets = a.budgets.to_budgets();
    let observed: Option<Vec<&str>> = a
        .observed
        .as_ref()
        .map(|v| v.iter().map(|s| s.as_str()).collect());

    let (i2, ikl_hp) = match a.mode {
        InfoMode::Exact => {
            let i2 = exact_i2_conditional(&model, &a.u, &a.v, observed.as_deref(), &budgets)
                .map_err(|e| match e {
                    InfoError::Budget(b) => CliError::Budget(format!(
                        "{b}; raise --budget-states or try --mode collapsed"
                    )),
                    other => map_info_err(other),
                })?;
            let ikl =
                match exact_ikl_conditional(&model, &a.u, &a.v, observed.as_deref(), &budgets)
                    .map_err(map_info_err)?
                {
                    InfoValue::KlBits(r) => r,
                    InfoValue::Chi2(_) => unreachable!(),
                };
            (i2, ikl)
        }
        InfoMode::Collapsed => {
            if observed.is_some() {
                return Err(CliError::input(anyhow!(
                    "--mode collapsed always observes every edge; drop --observed"
                )));
            }
            let rec = sp_recognize(model.graph(), &a.u, &a.v).map_err(map_sp_err)?;
            let tree = match rec {
                SpRecognition::SeriesParallel(t) => t,
                SpRecognition::NotSeriesParallel => {
                    return Err(CliError::input(anyhow!(
                        "graph is not series-parallel for ({}, {}); collapsed mode needs it",
                        a.u,
                        a.v
                    )))
                }
            };
            let q = sp_collapse_to_channel(&model, &tree).map_err(map_sp_err)?;
            let half = rat(1, 2);
            let i2 = chi2_mi_binary(&half, &q).map_err(map_info_err)?;
            let ikl = binary_input_joint(&half, &q)
                .map_err(map_info_err)?
                .kl_mi_bits_hp();
            (i2, ikl)
        }
    };

    let half_i2 = &i2 / rat(2, 1);
    let sandwich_ok = half_i2 <= ikl_hp && ikl_hp <= i2;
    emit(&a, &i2, &half_i2, &ikl_hp, sandwich_ok)
}

fn emit(
    a: &InfoArgs,
    i2: &Rational,
    half_i2: &Rational,
    ikl_hp: &Rational,
    sandwich_ok: bool,
) -> Result<(), CliError> {
    let mut sink = Sink::create(a.out.out.as_deref()).map_err(CliError::Internal)?;
    let ikl_bits = ratio_to_f64(ikl_hp);
    match a.out.format {
        OutputFormat::Text => {
            writeln!(sink, "I2 = {}", ratio_pair(i2)).map_err(CliError::internal)?;
            writeln!(sink, "IKL_bits = {ikl_bits}").map_err(CliError::internal)?;
            writeln!(
                sink,
                "sandwich: {} <= {} <= {} {}",
                ratio_to_f64(half_i2),
                ikl_bits,
                ratio_to_f64(i2),
                if sandwich_ok { "OK" } else { "VIOLATED" }
            )
            .map_err(CliError::internal)?;
        }
        OutputFormat::Csv => {
            let mut csv = CsvOut::new(&mut sink).map_err(CliError::Internal)?;
            csv.record(&["name", "exact", "decimal"])
                .map_err(CliError::Internal)?;
            let (e, d) = exact_and_decimal(i2);
            csv.record(&["i2", &e, &d]).map_err(CliError::Internal)?;
            csv.record(&["ikl_bits", "", &f64_str(ikl_bits)])
                .map_err(CliError::Internal)?;
            csv.record(&[
                "sandwich_ok",
                if sandwich_ok { "true" } else { "false" },
                "",
            ])
            .map_err(CliError::Internal)?;
        }
        OutputFormat::Json => {
            let (e, d) = exact_and_decimal(i2);
            let doc = json!({
                "u": a.u,
                "v": a.v,
                "i2": {"exact": e, "decimal": d},
                "ikl_bits": ikl_bits,
                "sandwich_ok": sandwich_ok,
            });
            serde_json::to_writer_pretty(&mut sink, &doc).map_err(CliError::internal)?;
            writeln!(sink).map_err(CliError::internal)?;
        }
    }
    sink.flush().map_err(CliError::internal)?;
    Ok(())
}
