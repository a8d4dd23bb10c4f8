//! Experiment drivers behind the `etdms` binary: the constants report, the
//! manufactured-solution convergence sweep and the coarsening run.

pub mod coarsen;
pub mod config;
pub mod constants;
pub mod convergence;
mod meta;

pub use coarsen::{cmd_coarsen, CoarsenSummary, MonitorSummary};
pub use config::{parse_schedule, AValue, CommandKind, ModelKind, PValue, RunConfig};
pub use constants::constants_report;
pub use convergence::{cmd_convergence, convergence_csv, convergence_table, run_convergence, ConvergenceRow};
pub use meta::write_run_meta;

use std::sync::Arc;

use anyhow::Result;
use etdms::{GradientFlowModel, LinearModel, NssModel, SpectralGrid};

/// The grid and model named by a config.
pub fn build_problem(cfg: &RunConfig) -> Result<(Arc<SpectralGrid>, Arc<dyn GradientFlowModel>)> {
    let grid = SpectralGrid::shared(cfg.n, cfg.length, cfg.dealias)?;
    let model: Arc<dyn GradientFlowModel> = match cfg.model {
        ModelKind::Nss => Arc::new(NssModel::with_convention(cfg.epsilon, cfg.convention)?),
        ModelKind::Linear => Arc::new(LinearModel::new(cfg.nu())?),
    };
    Ok((grid, model))
}
