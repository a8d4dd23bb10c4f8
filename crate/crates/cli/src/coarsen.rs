//! Coarsening run from random initial data: time series, snapshots, scaling
//! fits and the optional modified-energy monitor.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use etdms::diagnostics::{fit_loglog, fit_semilog, modified_energy_terms, record, FitResult};
use etdms::{build_stepper, random_field, run_schedule, write_snapshot, Error, Field, StepperConfig, StepperState};
use log::{error, info};

use crate::build_problem;
use crate::config::RunConfig;
use crate::meta::write_run_meta;

/// Relative slack allowed between consecutive monitored modified energies.
pub const MONITOR_SLACK: f64 = 1e-8;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MonitorSummary {
    pub samples: usize,
    /// Monitored steps where the modified energy rose by more than the slack.
    pub violations: usize,
    /// Largest relative increase between consecutive samples (negative if it only fell).
    pub max_relative_increase: f64,
}

#[derive(Clone, Debug)]
pub struct CoarsenSummary {
    pub t_final: f64,
    pub steps: u64,
    pub rows: usize,
    pub snapshots: Vec<PathBuf>,
    /// Series rows after the bootstrap where `E` increased.
    pub energy_increases: usize,
    pub monitor: Option<MonitorSummary>,
    pub energy_fit: Option<FitResult>,
    pub roughness_fit: Option<FitResult>,
    pub slope_fit: Option<FitResult>,
    pub blow_up: Option<String>,
    /// Contents of `fits.txt`.
    pub report: String,
}

fn format_time(t: f64) -> String {
    let s = format!("{t:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

fn save_snapshot(dir: &Path, field: &Field, t: f64, label: f64) -> Result<PathBuf> {
    let path = dir.join(format!("snap_t{}.etds", format_time(label)));
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    write_snapshot(BufWriter::new(file), field, t)?;
    Ok(path)
}

struct Recorder {
    series: BufWriter<File>,
    order: usize,
    series_every: u64,
    snapshot_every: Option<u64>,
    snapshot_times: Vec<f64>,
    next_snapshot: usize,
    monitor_every: Option<u64>,
    quad_points: usize,
    dir: PathBuf,
    steps: u64,
    t: Vec<f64>,
    e: Vec<f64>,
    h: Vec<f64>,
    m: Vec<f64>,
    energy_increases: usize,
    monitor: MonitorSummary,
    last_modified: Option<f64>,
    snapshots: Vec<PathBuf>,
}

impl Recorder {
    fn observe(&mut self, state: &StepperState, t_end: f64) -> Result<()> {
        let n = state.steps_taken();
        self.steps = n;
        let last = state.t() >= t_end - 0.5 * state.tau();

        let mut e_mod = None;
        if let Some(stride) = self.monitor_every {
            if n.is_multiple_of(stride) {
                match modified_energy_terms(state, self.quad_points) {
                    Ok(m) => e_mod = Some(m.value),
                    Err(Error::InsufficientIntervals { .. }) => {}
                    Err(e) => return Err(e.into()),
                }
            }
        }
        if let Some(v) = e_mod {
            if let Some(prev) = self.last_modified {
                let rel = (v - prev) / prev.abs().max(f64::MIN_POSITIVE);
                if self.monitor.samples == 1 || rel > self.monitor.max_relative_increase {
                    self.monitor.max_relative_increase = rel;
                }
                if v > prev + MONITOR_SLACK * prev.abs() {
                    self.monitor.violations += 1;
                }
            }
            self.monitor.samples += 1;
            self.last_modified = Some(v);
        }

        if n.is_multiple_of(self.series_every) || last {
            let r = record(state);
            if n >= self.order as u64 {
                if let Some(&prev) = self.e.last() {
                    if r.energy > prev {
                        self.energy_increases += 1;
                    }
                }
            }
            let e_mod_cell = e_mod.map_or(String::new(), |v| format!("{v:.16e}"));
            writeln!(
                self.series,
                "{:.16e},{:.16e},{:.16e},{:.16e},{e_mod_cell}",
                r.t, r.energy, r.roughness, r.slope
            )?;
            self.t.push(r.t);
            self.e.push(r.energy);
            self.h.push(r.roughness);
            self.m.push(r.slope);
        }

        let mut snap_label = None;
        if let Some(stride) = self.snapshot_every {
            if n.is_multiple_of(stride) {
                snap_label = Some(state.t());
            }
        }
        while self.next_snapshot < self.snapshot_times.len() {
            let ts = self.snapshot_times[self.next_snapshot];
            if state.t() + 0.5 * state.tau() < ts {
                break;
            }
            if (state.t() - ts).abs() <= 0.5 * state.tau() {
                snap_label = Some(ts);
            }
            self.next_snapshot += 1;
        }
        if let Some(label) = snap_label {
            let path = save_snapshot(&self.dir, &state.field(), state.t(), label)?;
            self.snapshots.push(path);
        }
        Ok(())
    }
}

fn describe_fit(s: &mut String, name: &str, form: &str, fit: &Result<FitResult, Error>) {
    match fit {
        Ok(f) => {
            let _ = writeln!(
                s,
                "{name}: {form}, a = {:.10e}, b = {:.10e}, residual = {:.3e}, samples = {}, window = [{}, {}]",
                f.a, f.b, f.residual, f.samples, f.window.0, f.window.1
            );
        }
        Err(e) => {
            let _ = writeln!(s, "{name}: unavailable ({e})");
        }
    }
}

/// Runs the coarsening experiment and writes `series.csv`, snapshots,
/// `fits.txt` and `run_meta` under `cfg.out`.
pub fn cmd_coarsen(cfg: &RunConfig) -> Result<CoarsenSummary> {
    if cfg.a.len() != 1 || cfg.p.len() != 1 {
        bail!("coarsen takes a single A and p");
    }
    let schedule = cfg.run_schedule()?;
    std::fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;
    write_run_meta(&cfg.out, "coarsen", cfg)?;

    let (grid, model) = build_problem(cfg)?;
    let config = StepperConfig::new(cfg.order, schedule.segments()[0].tau)
        .with_a(cfg.a[0].choice())
        .with_p(cfg.p[0].choice())
        .with_weighting(cfg.weighting)
        .retaining_intervals(cfg.monitor_every.is_some());
    let mut state = build_stepper(grid.clone(), model, &config)?;
    state.set_initial(&random_field(grid, cfg.seed, cfg.amplitude), 0.0)?;
    info!("A = {}, p = {}, T = {}", state.a(), state.p(), schedule.t_end());

    let series_path = cfg.out.join("series.csv");
    let mut series = BufWriter::new(
        File::create(&series_path).with_context(|| format!("creating {}", series_path.display()))?,
    );
    writeln!(series, "t,E,h,m,E_mod")?;
    let mut rec = Recorder {
        series,
        order: cfg.order,
        series_every: cfg.series_every,
        snapshot_every: cfg.snapshot_every,
        snapshot_times: {
            let mut v = cfg.snapshot_times.clone();
            v.sort_by(f64::total_cmp);
            v
        },
        next_snapshot: 0,
        monitor_every: cfg.monitor_every,
        quad_points: cfg.quad_points,
        dir: cfg.out.clone(),
        steps: 0,
        t: Vec::new(),
        e: Vec::new(),
        h: Vec::new(),
        m: Vec::new(),
        energy_increases: 0,
        monitor: MonitorSummary::default(),
        last_modified: None,
        snapshots: Vec::new(),
    };

    let t_end = schedule.t_end();
    let outcome = run_schedule(&mut state, &schedule, |s| rec.observe(s, t_end).map_err(into_core));
    let blow_up = match outcome {
        Ok(()) => None,
        Err(Error::BlowUp { t, steps }) => {
            // A failed step leaves the state at the last good value.
            let path = save_snapshot(&cfg.out, &state.field(), state.t(), state.t())?;
            error!("blow-up at t = {t} (step {steps}); last good state saved to {}", path.display());
            rec.snapshots.push(path);
            Some(format!("blow-up at t = {t} after {steps} steps; last good t = {}", state.t()))
        }
        Err(e) => return Err(e.into()),
    };
    rec.series.flush()?;

    let window = cfg.fit_window;
    let energy_fit = fit_semilog(&rec.t, &rec.e, window);
    let roughness_fit = fit_loglog(&rec.t, &rec.h, window);
    let slope_fit = fit_loglog(&rec.t, &rec.m, window);

    let mut report = String::new();
    let _ = writeln!(report, "# fits over t in [{}, {}]", window.0, window.1);
    describe_fit(&mut report, "E", "a ln(t) + b", &energy_fit);
    describe_fit(&mut report, "h", "a t^b", &roughness_fit);
    describe_fit(&mut report, "m", "a t^b", &slope_fit);
    let _ = writeln!(report, "E increases after bootstrap: {}", rec.energy_increases);
    if cfg.monitor_every.is_some() {
        let m = &rec.monitor;
        let _ = writeln!(
            report,
            "modified energy: {} samples, {} increases beyond {MONITOR_SLACK:e} relative, max relative change {:.3e}",
            m.samples, m.violations, m.max_relative_increase
        );
    } else {
        let _ = writeln!(report, "modified energy: not monitored");
    }
    if let Some(msg) = &blow_up {
        let _ = writeln!(report, "{msg}");
    }
    let fits_path = cfg.out.join("fits.txt");
    std::fs::write(&fits_path, &report).with_context(|| format!("writing {}", fits_path.display()))?;

    let summary = CoarsenSummary {
        t_final: state.t(),
        steps: rec.steps,
        rows: rec.t.len(),
        snapshots: rec.snapshots,
        energy_increases: rec.energy_increases,
        monitor: cfg.monitor_every.map(|_| rec.monitor),
        energy_fit: energy_fit.ok(),
        roughness_fit: roughness_fit.ok(),
        slope_fit: slope_fit.ok(),
        blow_up,
        report,
    };
    if let Some(msg) = &summary.blow_up {
        bail!("{msg}");
    }
    Ok(summary)
}

fn into_core(e: anyhow::Error) -> Error {
    match e.downcast::<Error>() {
        Ok(core) => core,
        Err(other) => Error::Io(std::io::Error::other(format!("{other:#}"))),
    }
}
