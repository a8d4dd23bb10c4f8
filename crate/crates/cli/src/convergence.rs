//! Temporal convergence against the manufactured solution
//! `u = e^{-t} cos 2x cos 2y` (NSS with forcing) or the exact decay of the
//! same mode under the linear model.

use std::fmt::Write as _;
use std::sync::Arc;

use anyhow::{Context, Result};
use etdms::{
    build_stepper, manufactured_exact, run_schedule, Error, Field, GradientFlowModel, LinearModel, NssModel,
    Schedule, SpectralGrid, StepperConfig,
};
use log::{info, warn};
use rayon::prelude::*;

use crate::config::{AValue, ModelKind, PValue, RunConfig};
use crate::meta::write_run_meta;

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub a_label: AValue,
    /// Coefficient actually used.
    pub a: f64,
    pub p: f64,
    pub tau: f64,
    /// `None` when the run blew up.
    pub error: Option<f64>,
    /// `log2(previous error / error)`, from the second row of a group on.
    pub order: Option<f64>,
}

struct RunOutcome {
    a: f64,
    p: f64,
    error: Option<f64>,
}

fn exact_solution(cfg: &RunConfig, grid: &Arc<SpectralGrid>, t: f64) -> Result<Field> {
    let base = manufactured_exact(0.0, grid.clone())?;
    Ok(match cfg.model {
        ModelKind::Nss => manufactured_exact(t, grid.clone())?,
        ModelKind::Linear => {
            // cos 2x cos 2y has |k|^4 = 64
            let decay = (-64.0 * cfg.nu() * t).exp();
            let values = base.values().iter().map(|v| v * decay).collect();
            Field::new(grid.clone(), values)?
        }
    })
}

fn single_run(cfg: &RunConfig, a: AValue, p: PValue, tau: f64) -> Result<RunOutcome> {
    let grid = SpectralGrid::shared(cfg.n, cfg.length, cfg.dealias)?;
    let model: Arc<dyn GradientFlowModel> = match cfg.model {
        ModelKind::Nss => Arc::new(
            NssModel::with_convention(cfg.epsilon, cfg.convention)?.with_manufactured_forcing(grid.clone())?,
        ),
        ModelKind::Linear => Arc::new(LinearModel::new(cfg.nu())?),
    };
    let config = StepperConfig::new(cfg.order, tau)
        .with_a(a.choice())
        .with_p(p.choice())
        .with_weighting(cfg.weighting);
    let mut state = build_stepper(grid.clone(), model, &config)?;
    state.set_initial(&exact_solution(cfg, &grid, 0.0)?, 0.0)?;
    let schedule = Schedule::uniform(cfg.t_end, tau)?;
    let (a_used, p_used) = (state.a(), state.p());
    match run_schedule(&mut state, &schedule, |_| Ok(())) {
        Ok(()) => {}
        Err(Error::BlowUp { t, .. }) => {
            warn!("A = {a}, p = {p}, tau = {tau}: blow-up at t = {t}");
            return Ok(RunOutcome { a: a_used, p: p_used, error: None });
        }
        Err(e) => return Err(e.into()),
    }
    let diff = state.field().sub(&exact_solution(cfg, &grid, state.t())?)?;
    let error = diff.sobolev_norm(0.0)?;
    if !error.is_finite() {
        return Ok(RunOutcome { a: a_used, p: p_used, error: None });
    }
    Ok(RunOutcome { a: a_used, p: p_used, error: Some(error) })
}

/// Runs every `(A, p, tau)` combination, in parallel, and returns rows
/// grouped by `(A, p)` in config order with `tau` in sweep order.
pub fn run_convergence(cfg: &RunConfig) -> Result<Vec<ConvergenceRow>> {
    let mut jobs = Vec::new();
    for &a in &cfg.a {
        for &p in &cfg.p {
            for &tau in &cfg.tau {
                jobs.push((a, p, tau));
            }
        }
    }
    let outcomes: Vec<Result<RunOutcome>> = jobs
        .par_iter()
        .map(|&(a, p, tau)| {
            single_run(cfg, a, p, tau).with_context(|| format!("A = {a}, p = {p}, tau = {tau}"))
        })
        .collect();

    let mut rows = Vec::with_capacity(jobs.len());
    let mut prev: Option<f64> = None;
    for (i, (&(a_label, _, tau), outcome)) in jobs.iter().zip(outcomes).enumerate() {
        if i % cfg.tau.len() == 0 {
            prev = None;
        }
        let outcome = outcome?;
        let order = match (prev, outcome.error) {
            (Some(e0), Some(e1)) => Some((e0 / e1).log2()),
            _ => None,
        };
        prev = outcome.error;
        rows.push(ConvergenceRow { a_label, a: outcome.a, p: outcome.p, tau, error: outcome.error, order });
    }
    Ok(rows)
}

/// `A,p,tau,error,order`; errors at 17 significant digits, `blowup` for
/// failed runs and an empty order where none is defined.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut s = String::from("A,p,tau,error,order\n");
    for r in rows {
        let error = r.error.map_or("blowup".to_string(), |e| format!("{e:.16e}"));
        let order = r.order.map_or(String::new(), |o| format!("{o:.16e}"));
        let _ = writeln!(s, "{},{},{},{error},{order}", r.a, r.p, r.tau);
    }
    s
}

/// Aligned text table of the rows, one block per `(A, p)`.
pub fn convergence_table(rows: &[ConvergenceRow]) -> String {
    let mut s = String::new();
    let mut last: Option<(f64, f64)> = None;
    for r in rows {
        if last != Some((r.a, r.p)) {
            let _ = writeln!(s, "\nA = {} ({:.6}), p = {}", r.a_label, r.a, r.p);
            let _ = writeln!(s, "{:>12} {:>14} {:>8}", "tau", "error", "order");
            last = Some((r.a, r.p));
        }
        let error = r.error.map_or("blow-up".to_string(), |e| format!("{e:.4e}"));
        let order = r.order.map_or("-".to_string(), |o| format!("{o:.3}"));
        let _ = writeln!(s, "{:>12.4e} {:>14} {:>8}", r.tau, error, order);
    }
    s
}

/// Runs the sweep, writes `convergence.csv` and `run_meta` under `cfg.out`
/// and returns the rows.
pub fn cmd_convergence(cfg: &RunConfig) -> Result<Vec<ConvergenceRow>> {
    std::fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    write_run_meta(&cfg.out, "convergence", cfg)?;
    info!("{} runs", cfg.a.len() * cfg.p.len() * cfg.tau.len());
    let rows = run_convergence(cfg)?;
    let path = cfg.out.join("convergence.csv");
    std::fs::write(&path, convergence_csv(&rows)).with_context(|| format!("writing {}", path.display()))?;
    Ok(rows)
}
