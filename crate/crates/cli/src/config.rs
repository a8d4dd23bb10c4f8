//! Run configuration: defaults per subcommand, `key = value` files and flag
//! overrides, all funnelled through [`RunConfig::set`].

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use etdms::integrator::reference_order_four_a;
use etdms::{EpsilonConvention, NonlinearWeighting, ParamChoice, Schedule, Segment};

pub const FULL_HORIZON: f64 = 30_000.0;
pub const FULL_HORIZON_SNAPSHOTS: [f64; 6] = [1.0, 5000.0, 10000.0, 15000.0, 20000.0, 30000.0];
pub const CONVERGENCE_TAUS: [f64; 5] = [2.5e-3, 1.25e-3, 6.25e-4, 3.125e-4, 1.5625e-4];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Convergence,
    Coarsen,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Nss,
    Linear,
}

/// Stabilization coefficient as written in a config: derived, the fourth-order
/// reference value, or a number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AValue {
    Auto,
    Reference,
    Value(f64),
}

impl AValue {
    pub fn choice(self) -> ParamChoice {
        match self {
            AValue::Auto => ParamChoice::Auto,
            AValue::Reference => ParamChoice::Fixed(reference_order_four_a()),
            AValue::Value(a) => ParamChoice::Fixed(a),
        }
    }
}

impl FromStr for AValue {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(AValue::Auto),
            "reference" | "formula" => Ok(AValue::Reference),
            _ => {
                let a: f64 = s.parse().map_err(|_| anyhow!("expected auto, reference or a number, got `{s}`"))?;
                if !(a >= 0.0) || !a.is_finite() {
                    bail!("A must be a non-negative number, got {s}");
                }
                Ok(AValue::Value(a))
            }
        }
    }
}

impl fmt::Display for AValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AValue::Auto => f.write_str("auto"),
            AValue::Reference => f.write_str("reference"),
            AValue::Value(a) => write!(f, "{a}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PValue {
    Auto,
    Value(f64),
}

impl PValue {
    pub fn choice(self) -> ParamChoice {
        match self {
            PValue::Auto => ParamChoice::Auto,
            PValue::Value(p) => ParamChoice::Fixed(p),
        }
    }
}

impl FromStr for PValue {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(PValue::Auto);
        }
        let p: f64 = s.parse().map_err(|_| anyhow!("expected auto or a number, got `{s}`"))?;
        if !(p >= 0.0) || !p.is_finite() {
            bail!("p must be a non-negative number, got {s}");
        }
        Ok(PValue::Value(p))
    }
}

impl fmt::Display for PValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PValue::Auto => f.write_str("auto"),
            PValue::Value(p) => write!(f, "{p}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: ModelKind,
    pub epsilon: f64,
    pub convention: EpsilonConvention,
    pub n: usize,
    pub length: f64,
    pub dealias: bool,
    pub order: usize,
    pub weighting: NonlinearWeighting,
    /// One entry for `coarsen`; a sweep list for `convergence`.
    pub a: Vec<AValue>,
    pub p: Vec<PValue>,
    pub tau: Vec<f64>,
    pub schedule: Option<PathBuf>,
    pub t_end: f64,
    pub seed: u64,
    pub amplitude: f64,
    pub out: PathBuf,
    pub series_every: u64,
    pub snapshot_every: Option<u64>,
    pub snapshot_times: Vec<f64>,
    pub monitor_every: Option<u64>,
    pub quad_points: usize,
    pub fit_window: (f64, f64),
    pub full_horizon: bool,
}

pub const KEYS: [&str; 23] = [
    "model",
    "eps",
    "eps_convention",
    "N",
    "L",
    "dealias",
    "order",
    "weighting",
    "A",
    "p",
    "tau",
    "schedule",
    "T",
    "seed",
    "amplitude",
    "out",
    "series_every",
    "snapshot_every",
    "snapshot_times",
    "monitor_etilde",
    "quad_points",
    "fit_window",
    "full_horizon",
];

fn parse_list<T: FromStr>(value: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    let items: Result<Vec<T>> = value
        .split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| anyhow!("`{s}`: {e}")))
        .collect();
    let items = items?;
    if items.is_empty() {
        bail!("empty list");
    }
    Ok(items)
}

fn parse_bool(value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => bail!("expected true or false, got `{value}`"),
    }
}

fn parse_stride(value: &str) -> Result<Option<u64>> {
    if value == "off" || value == "none" {
        return Ok(None);
    }
    let n: u64 = value.parse().map_err(|_| anyhow!("expected a positive integer, got `{value}`"))?;
    if n == 0 {
        bail!("stride must be at least 1");
    }
    Ok(Some(n))
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    pub fn defaults(cmd: CommandKind) -> Self {
        match cmd {
            CommandKind::Convergence => Self {
                model: ModelKind::Nss,
                epsilon: 0.01,
                convention: EpsilonConvention::Linear,
                n: 128,
                length: 2.0 * std::f64::consts::PI,
                dealias: false,
                order: 4,
                weighting: NonlinearWeighting::Differential,
                a: vec![AValue::Value(1.0), AValue::Value(5.0), AValue::Value(10.0), AValue::Reference],
                p: vec![PValue::Auto],
                tau: CONVERGENCE_TAUS.to_vec(),
                schedule: None,
                t_end: 1.0,
                seed: 0,
                amplitude: 0.05,
                out: PathBuf::from("out/convergence"),
                series_every: 1,
                snapshot_every: None,
                snapshot_times: Vec::new(),
                monitor_every: None,
                quad_points: 6,
                fit_window: etdms::diagnostics::DEFAULT_FIT_WINDOW,
                full_horizon: false,
            },
            CommandKind::Coarsen => Self {
                model: ModelKind::Nss,
                epsilon: 0.005,
                convention: EpsilonConvention::Squared,
                n: 128,
                length: 12.8,
                dealias: false,
                order: 4,
                weighting: NonlinearWeighting::Differential,
                a: vec![AValue::Auto],
                p: vec![PValue::Auto],
                tau: vec![1e-3],
                schedule: None,
                t_end: 50.0,
                seed: 1,
                amplitude: 0.05,
                out: PathBuf::from("out/coarsen"),
                series_every: 100,
                snapshot_every: None,
                snapshot_times: Vec::new(),
                monitor_every: None,
                quad_points: 6,
                fit_window: etdms::diagnostics::DEFAULT_FIT_WINDOW,
                full_horizon: false,
            },
        }
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "model" => {
                self.model = match value {
                    "nss" => ModelKind::Nss,
                    "linear" => ModelKind::Linear,
                    _ => bail!("unknown model `{value}` (expected nss or linear)"),
                }
            }
            "eps" => {
                let e: f64 = value.parse().map_err(|_| anyhow!("eps must be a number, got `{value}`"))?;
                if !(e > 0.0) {
                    bail!("eps must be positive");
                }
                self.epsilon = e;
            }
            "eps_convention" => {
                self.convention = match value {
                    "squared" => EpsilonConvention::Squared,
                    "linear" => EpsilonConvention::Linear,
                    _ => bail!("eps_convention must be squared or linear, got `{value}`"),
                }
            }
            "N" => {
                let n: usize = value.parse().map_err(|_| anyhow!("N must be an integer, got `{value}`"))?;
                self.n = n;
            }
            "L" => {
                self.length = match value {
                    "2pi" => 2.0 * std::f64::consts::PI,
                    _ => value.parse().map_err(|_| anyhow!("L must be a number or 2pi, got `{value}`"))?,
                }
            }
            "dealias" => self.dealias = parse_bool(value)?,
            "order" => {
                self.order = value.parse().map_err(|_| anyhow!("order must be an integer, got `{value}`"))?;
            }
            "weighting" => {
                self.weighting = match value {
                    "differential" => NonlinearWeighting::Differential,
                    "integrated" => NonlinearWeighting::Integrated,
                    _ => bail!("weighting must be differential or integrated, got `{value}`"),
                }
            }
            "A" => self.a = parse_list(value)?,
            "p" => self.p = parse_list(value)?,
            "tau" => {
                let taus: Vec<f64> = parse_list(value)?;
                if taus.iter().any(|t| !(*t > 0.0)) {
                    bail!("tau must be positive");
                }
                self.tau = taus;
            }
            "schedule" => {
                self.schedule = if value.is_empty() || value == "none" { None } else { Some(PathBuf::from(value)) }
            }
            "T" => {
                let t: f64 = value.parse().map_err(|_| anyhow!("T must be a number, got `{value}`"))?;
                if !(t > 0.0) {
                    bail!("T must be positive");
                }
                self.t_end = t;
            }
            "seed" => self.seed = value.parse().map_err(|_| anyhow!("seed must be an unsigned integer, got `{value}`"))?,
            "amplitude" => {
                self.amplitude = value.parse().map_err(|_| anyhow!("amplitude must be a number, got `{value}`"))?
            }
            "out" => self.out = PathBuf::from(value),
            "series_every" => {
                self.series_every = parse_stride(value)?.ok_or_else(|| anyhow!("series_every cannot be off"))?
            }
            "snapshot_every" => self.snapshot_every = parse_stride(value)?,
            "snapshot_times" => {
                self.snapshot_times = if value.is_empty() || value == "none" { Vec::new() } else { parse_list(value)? }
            }
            "monitor_etilde" => self.monitor_every = parse_stride(value)?,
            "quad_points" => {
                self.quad_points = value.parse().map_err(|_| anyhow!("quad_points must be an integer"))?;
                if self.quad_points == 0 {
                    bail!("quad_points must be at least 1");
                }
            }
            "fit_window" => {
                let w: Vec<f64> = parse_list(value)?;
                if w.len() != 2 || !(w[0] > 0.0 && w[0] < w[1]) {
                    bail!("fit_window must be `t0,t1` with 0 < t0 < t1");
                }
                self.fit_window = (w[0], w[1]);
            }
            "full_horizon" => {
                self.full_horizon = parse_bool(value)?;
                if self.full_horizon {
                    self.t_end = FULL_HORIZON;
                    if self.snapshot_times.is_empty() {
                        self.snapshot_times = FULL_HORIZON_SNAPSHOTS.to_vec();
                    }
                }
            }
            _ => bail!("unknown key `{key}`"),
        }
        Ok(())
    }

    /// Applies a `key = value` file; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`, got `{}`", lineno + 1, raw.trim()))?;
            self.set(key.trim(), value)
                .with_context(|| format!("line {}", lineno + 1))?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        self.apply_text(&text).with_context(|| format!("in {}", path.display()))
    }

    /// The configuration as a file that [`RunConfig::apply_text`] reads back.
    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            s.push_str(k);
            s.push_str(" = ");
            s.push_str(&v);
            s.push('\n');
        };
        put("model", match self.model { ModelKind::Nss => "nss", ModelKind::Linear => "linear" }.into());
        put("eps", self.epsilon.to_string());
        put(
            "eps_convention",
            match self.convention { EpsilonConvention::Squared => "squared", EpsilonConvention::Linear => "linear" }.into(),
        );
        put("N", self.n.to_string());
        put("L", self.length.to_string());
        put("dealias", self.dealias.to_string());
        put("order", self.order.to_string());
        put(
            "weighting",
            match self.weighting {
                NonlinearWeighting::Differential => "differential",
                NonlinearWeighting::Integrated => "integrated",
            }
            .into(),
        );
        put("A", join(&self.a));
        put("p", join(&self.p));
        put("tau", join(&self.tau));
        put("schedule", self.schedule.as_ref().map_or("none".into(), |p| p.display().to_string()));
        put("full_horizon", self.full_horizon.to_string());
        put("T", self.t_end.to_string());
        put("seed", self.seed.to_string());
        put("amplitude", self.amplitude.to_string());
        put("out", self.out.display().to_string());
        put("series_every", self.series_every.to_string());
        put("snapshot_every", self.snapshot_every.map_or("off".into(), |n| n.to_string()));
        put(
            "snapshot_times",
            if self.snapshot_times.is_empty() { "none".into() } else { join(&self.snapshot_times) },
        );
        put("monitor_etilde", self.monitor_every.map_or("off".into(), |n| n.to_string()));
        put("quad_points", self.quad_points.to_string());
        put("fit_window", format!("{},{}", self.fit_window.0, self.fit_window.1));
        s
    }

    pub fn nu(&self) -> f64 {
        self.convention.nu(self.epsilon)
    }

    /// The step-size schedule of a single run, cut at `T`.
    pub fn run_schedule(&self) -> Result<Schedule> {
        let full = match &self.schedule {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                parse_schedule(&text).with_context(|| format!("in {}", path.display()))?
            }
            None => {
                if self.tau.len() != 1 {
                    bail!("a single run needs exactly one tau, got {}", self.tau.len());
                }
                Schedule::uniform(self.t_end, self.tau[0])?
            }
        };
        if full.t_end() < self.t_end * (1.0 - 1e-12) {
            bail!("schedule ends at {} before T = {}", full.t_end(), self.t_end);
        }
        Ok(full.truncated(self.t_end)?)
    }
}

/// Lines of `t_end tau`; blank lines and `#` comments are skipped.
pub fn parse_schedule(text: &str) -> Result<Schedule> {
    let mut segments = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            bail!("line {}: expected `t_end tau`, got `{}`", lineno + 1, raw.trim());
        }
        let t_end: f64 = fields[0].parse().map_err(|_| anyhow!("line {}: bad t_end `{}`", lineno + 1, fields[0]))?;
        let tau: f64 = fields[1].parse().map_err(|_| anyhow!("line {}: bad tau `{}`", lineno + 1, fields[1]))?;
        segments.push(Segment { t_end, tau });
    }
    Ok(Schedule::new(segments)?)
}
