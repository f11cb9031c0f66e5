//! `spinsync sp`: recognition, decomposition tree, optional path listing.

use std::io::Write;

use anyhow::anyhow;
use serde_json::json;

use spinsync_core::sp::{enumerate_paths, sp_recognize, SpRecognition};

use crate::args::{OutputFormat, SpArgs};
use crate::commands::map_sp_err;
use crate::error::CliError;
use crate::modelfile::load_model;
use crate::output::{CsvOut, Sink};

pub fn run(a: SpArgs) -> Result<(), CliError> {
    let model = load_model(&a.model).map_err(CliError::Input)?;
    let (u, v) = match (&a.u, &a.v) {
        (Some(u), Some(v)) => (u.clone(), v.clone()),
        (None, None) => match model.graph().terminal_names() {
            Some((u, v)) => (String::from(u), String::from(v)),
            None => {
                return Err(CliError::input(anyhow!(
                    "model has no terminals; pass --u and --v"
                )))
            }
        },
        _ => return Err(CliError::input(anyhow!("--u and --v go together"))),
    };
    let budgets = a.budgets.to_budgets();
    let rec = sp_recognize(model.graph(), &u, &v).map_err(map_sp_err)?;
    let paths = if a.paths {
        Some(enumerate_paths(model.graph(), &u, &v, &budgets).map_err(map_sp_err)?)
    } else {
        None
    };

    let mut sink = Sink::create(a.out.out.as_deref()).map_err(CliError::Internal)?;
    match a.out.format {
        OutputFormat::Text => {
            match &rec {
                SpRecognition::SeriesParallel(t) => {
                    writeln!(sink, "{}", t.to_text()).map_err(CliError::internal)?
                }
                SpRecognition::NotSeriesParallel => {
                    writeln!(sink, "not series-parallel").map_err(CliError::internal)?
                }
            }
            if let Some(paths) = &paths {
                writeln!(sink, "paths: {}", paths.len()).map_err(CliError::internal)?;
                for p in paths {
                    writeln!(sink, "  {}", p.join(",")).map_err(CliError::internal)?;
                }
            }
        }
        OutputFormat::Csv => {
            let mut csv = CsvOut::new(&mut sink).map_err(CliError::Internal)?;
            csv.record(&["name", "value"]).map_err(CliError::Internal)?;
            match &rec {
                SpRecognition::SeriesParallel(t) => csv
                    .record(&["sp_tree", &t.to_text()])
                    .map_err(CliError::Internal)?,
                SpRecognition::NotSeriesParallel => csv
                    .record(&["sp_tree", "not series-parallel"])
                    .map_err(CliError::Internal)?,
            }
            if let Some(paths) = &paths {
                for p in paths {
                    csv.record(&["path", &p.join(";")]).map_err(CliError::Internal)?;
                }
            }
        }
        OutputFormat::Json => {
            let doc = json!({
                "u": u,
                "v": v,
                "series_parallel": rec.tree().is_some(),
                "sp_tree": rec.tree().map(|t| t.to_text()),
                "paths": paths,
            });
            serde_json::to_writer_pretty(&mut sink, &doc).map_err(CliError::internal)?;
            writeln!(sink).map_err(CliError::internal)?;
        }
    }
    sink.flush().map_err(CliError::internal)?;
    Ok(())
}
