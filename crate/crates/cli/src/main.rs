use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use etdms::LipschitzIndices;
use etdms_cli::{cmd_coarsen, cmd_convergence, constants_report, convergence_table, CommandKind, RunConfig};

#[derive(Parser)]
#[command(name = "etdms", version, about = "Stabilized ETD multistep solver for gradient flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the stability constants and the stabilization coefficient.
    Constants {
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[arg(long = "c-l", default_value_t = 1.0)]
        c_l: f64,
    },
    /// Temporal convergence sweep on the manufactured solution.
    Convergence(RunArgs),
    /// Coarsening run from random initial data.
    Coarsen(RunArgs),
}

/// Flags shared by the run commands; each overrides the matching key of `--config`.
#[derive(Args, Debug, Default)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// nss or linear
    #[arg(long)]
    model: Option<String>,
    #[arg(long = "N")]
    n: Option<String>,
    /// Box length (number or 2pi)
    #[arg(long = "L")]
    length: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    /// squared (nu = eps^2) or linear (nu = eps)
    #[arg(long = "eps-convention")]
    eps_convention: Option<String>,
    #[arg(long)]
    order: Option<String>,
    /// differential or integrated
    #[arg(long)]
    weighting: Option<String>,
    /// Step size, or a comma list for a convergence sweep
    #[arg(long)]
    tau: Option<String>,
    /// File of `t_end tau` lines
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long = "T")]
    t_end: Option<String>,
    /// auto, reference or a number; comma list for a convergence sweep
    #[arg(long = "A")]
    a: Option<String>,
    /// auto or a number; comma list for a convergence sweep
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    amplitude: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    dealias: bool,
    /// Monitor the modified energy every STRIDE steps
    #[arg(long = "monitor-etilde", value_name = "STRIDE")]
    monitor_etilde: Option<String>,
    #[arg(long = "quad-points")]
    quad_points: Option<String>,
    #[arg(long = "series-every")]
    series_every: Option<String>,
    #[arg(long = "snapshot-every")]
    snapshot_every: Option<String>,
    /// Comma list of snapshot times
    #[arg(long = "snapshot-times")]
    snapshot_times: Option<String>,
    /// Fit window `t0,t1`
    #[arg(long = "fit-window")]
    fit_window: Option<String>,
    /// Run to the published horizon T = 30000 with the published snapshot times
    #[arg(long = "full-horizon")]
    full_horizon: bool,
}

impl RunArgs {
    fn resolve(&self, kind: CommandKind) -> Result<RunConfig> {
        let mut cfg = RunConfig::defaults(kind);
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        if self.full_horizon {
            cfg.set("full_horizon", "true")?;
        }
        let flags: [(&str, &Option<String>); 20] = [
            ("model", &self.model),
            ("N", &self.n),
            ("L", &self.length),
            ("eps", &self.eps),
            ("eps_convention", &self.eps_convention),
            ("order", &self.order),
            ("weighting", &self.weighting),
            ("tau", &self.tau),
            ("schedule", &self.schedule),
            ("T", &self.t_end),
            ("A", &self.a),
            ("p", &self.p),
            ("seed", &self.seed),
            ("amplitude", &self.amplitude),
            ("out", &self.out),
            ("monitor_etilde", &self.monitor_etilde),
            ("quad_points", &self.quad_points),
            ("series_every", &self.series_every),
            ("snapshot_every", &self.snapshot_every),
            ("snapshot_times", &self.snapshot_times),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v).map_err(|e| e.context(format!("--{key}")))?;
            }
        }
        if let Some(v) = &self.fit_window {
            cfg.set("fit_window", v)?;
        }
        if self.dealias {
            cfg.set("dealias", "true")?;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Constants { order, beta, gamma, c_l } => {
            print!("{}", constants_report(order, LipschitzIndices { beta, gamma, c_l })?);
        }
        Command::Convergence(args) => {
            let cfg = args.resolve(CommandKind::Convergence)?;
            print!("{}", convergence_table(&cmd_convergence(&cfg)?));
        }
        Command::Coarsen(args) => {
            let cfg = args.resolve(CommandKind::Coarsen)?;
            print!("{}", cmd_coarsen(&cfg)?.report);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
