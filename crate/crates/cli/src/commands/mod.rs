//! Subcommand implementations.

pub mod bounds;
pub mod experiment;
pub mod fuzz;
pub mod info;
pub mod make;
pub mod sp;

use anyhow::anyhow;

use spinsync_core::bounds::BoundsError;
use spinsync_core::experiments::ExperimentError;
use spinsync_core::info::InfoError;
use spinsync_core::sp::SpError;

use crate::error::CliError;

pub(crate) fn map_info_err(e: InfoError) -> CliError {
    match e {
        InfoError::Budget(b) => CliError::Budget(b.to_string()),
        other => CliError::input(anyhow!("{other}")),
    }
}

pub(crate) fn map_sp_err(e: SpError) -> CliError {
    match e {
        SpError::Budget(b) => CliError::Budget(b.to_string()),
        other => CliError::input(anyhow!("{other}")),
    }
}

pub(crate) fn map_bounds_err(e: BoundsError) -> CliError {
    match e {
        BoundsError::Info(InfoError::Budget(b)) => CliError::Budget(b.to_string()),
        BoundsError::Sp(SpError::Budget(b)) => CliError::Budget(b.to_string()),
        BoundsError::Conn(spinsync_core::conn::ConnError::Budget(b)) => {
            CliError::Budget(b.to_string())
        }
        other => CliError::input(anyhow!("{other}")),
    }
}

pub(crate) fn map_experiment_err(e: ExperimentError) -> CliError {
    match e {
        ExperimentError::Info(InfoError::Budget(b)) => CliError::Budget(b.to_string()),
        ExperimentError::Sp(SpError::Budget(b)) => CliError::Budget(b.to_string()),
        other => CliError::input(anyhow!("{other}")),
    }
}
