use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ncmv::exec::Exec;
use ncmv_cli::{presets, CliError, Overrides, OUT_DIR_ENV};

/// Experiment runner for non-coherent over-the-air majority vote.
#[derive(Debug, Parser)]
#[command(name = "ncmv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// Config file, or `preset:NAME`.
    config: String,
    /// Override the master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an experiment and write its artifacts.
    Run(RunArgs),
    /// Check a config without running it.
    Validate(RunArgs),
    /// List the embedded presets.
    ListPresets,
}

fn exec_for(threads: Option<usize>) -> Result<Exec, CliError> {
    match threads {
        Some(0) => Err(CliError::Invalid("--threads must be at least 1".into())),
        Some(1) => Ok(Exec::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Pool(e.to_string()))?;
            Ok(Exec::Parallel)
        }
        _ => Ok(Exec::Parallel),
    }
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::ListPresets => {
            for (name, text) in presets::PRESETS {
                println!("{name:<22} {}", presets::description(text));
            }
        }
        Command::Validate(a) => {
            let overrides = Overrides {
                seed: a.seed,
                trials: a.trials,
                out: a.out,
            };
            exec_for(a.threads)?;
            let (cfg, _) = ncmv_cli::prepare(&a.config, &overrides)?;
            println!("{}: ok ({})", a.config, cfg.experiment.name());
        }
        Command::Run(a) => {
            let exec = exec_for(a.threads)?;
            let overrides = Overrides {
                seed: a.seed,
                trials: a.trials,
                out: a.out,
            };
            let env_out = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
            for p in ncmv_cli::run(&a.config, &overrides, env_out, exec)? {
                println!("{}", p.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
