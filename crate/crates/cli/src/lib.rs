//! Batch experiment runner for the ncmv simulator.
//!
//! A run reads one TOML config (a file or an embedded `preset:NAME`), executes
//! the experiment fully in memory, and only then writes its CSV tables, a JSON
//! manifest, and a plain-text summary.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod presets;

use std::path::{Path, PathBuf};

use ncmv::exec::Exec;

pub use config::{ExperimentConfig, Plan};
pub use error::{CliError, Result};

/// Prefix selecting an embedded preset instead of a file.
pub const PRESET_PREFIX: &str = "preset:";

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "NCMV_OUT_DIR";

/// Output directory used when neither the flag, the config, nor the
/// environment names one.
pub const DEFAULT_OUT_DIR: &str = "ncmv-out";

/// Reads and parses a config file or preset.
pub fn load(source: &str) -> Result<ExperimentConfig> {
    if let Some(name) = source.strip_prefix(PRESET_PREFIX) {
        let text = presets::get(name).ok_or_else(|| CliError::UnknownPreset(name.to_string()))?;
        return config::parse(text, source);
    }
    let path = Path::new(source);
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Read {
        path: path.to_path_buf(),
        source: e,
    })?;
    config::parse(&text, source)
}

/// Command-line overrides applied on top of a config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(o) = &self.out {
            cfg.output_dir = Some(o.clone());
        }
    }
}

/// Loads, overrides, and resolves a config without running it.
pub fn prepare(source: &str, overrides: &Overrides) -> Result<(ExperimentConfig, Plan)> {
    let mut cfg = load(source)?;
    overrides.apply(&mut cfg);
    let plan = cfg.resolve()?;
    if let Plan::Training(t) = &plan {
        // Building the trainer checks data placement and link feasibility.
        ncmv::trainer::Trainer::new((**t).clone(), Exec::Sequential)?;
    }
    Ok((cfg, plan))
}

/// Output directory: config (or `--out`), then the environment, then the
/// built-in default.
pub fn output_dir(cfg: &ExperimentConfig, env: Option<PathBuf>) -> PathBuf {
    cfg.output_dir
        .clone()
        .or(env)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Runs a config end to end and returns the written files.
pub fn run(source: &str, overrides: &Overrides, env_out: Option<PathBuf>, exec: Exec) -> Result<Vec<PathBuf>> {
    let (cfg, plan) = prepare(source, overrides)?;
    let outcome = experiments::run(&plan, cfg.seed, cfg.trials, exec)?;
    let files = output::render(&cfg, source, &outcome);
    output::write_all(&output_dir(&cfg, env_out), &files)
}
