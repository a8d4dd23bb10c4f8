use std::path::Path;

use anyhow::{Context, Result};

use crate::config::RunConfig;

/// Writes `run_meta`: the resolved configuration in config-file syntax, so
/// `etdms <command> --config run_meta` repeats the run.
pub fn write_run_meta(dir: &Path, command: &str, cfg: &RunConfig) -> Result<()> {
    let text = format!(
        "# etdms {command}\n# version {}\n# seed {}\n{}",
        env!("CARGO_PKG_VERSION"),
        cfg.seed,
        cfg.to_config_text()
    );
    let path = dir.join("run_meta");
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}
