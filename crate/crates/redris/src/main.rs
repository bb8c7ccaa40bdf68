use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use redris::{
    aggregate, preset, run_experiment_with, write_aggregate, write_records, Format, RunOptions,
    ScenarioConfig, PRESETS,
};

#[derive(Parser)]
#[command(name = "redris", version, about = "RedRIS sum-rate Monte Carlo experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset or a config file and write per-trial results.
    Run {
        #[arg(long, conflicts_with = "config", required_unless_present = "config")]
        preset: Option<String>,
        /// TOML scenario file.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: Format,
        /// Emit per-(scheme, P) mean and standard error instead of raw rows.
        #[arg(long)]
        aggregate: bool,
        /// Record wall-clock times (makes output differ between runs).
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List the built-in presets.
    ListPresets,
    /// Check a config file (or print a preset as TOML with --preset).
    Validate {
        config: Option<PathBuf>,
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn load(preset_name: Option<&str>, config: Option<&PathBuf>) -> anyhow::Result<ScenarioConfig> {
    match (preset_name, config) {
        (Some(name), _) => Ok(preset(name)?),
        (None, Some(path)) => Ok(ScenarioConfig::load(path)?),
        (None, None) => anyhow::bail!("pass --preset or a config file"),
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::ListPresets => {
            let mut out = std::io::stdout().lock();
            for p in PRESETS {
                writeln!(out, "{:<14} {}", p.name, p.summary)?;
            }
        }
        Command::Validate { config, preset } => {
            let cfg = load(preset.as_deref(), config.as_ref())?;
            cfg.validate()?;
            if preset.is_some() {
                print!("{}", cfg.to_toml());
            } else {
                println!("ok");
            }
        }
        Command::Run {
            preset,
            config,
            seed,
            trials,
            out,
            format,
            aggregate: agg,
            timing,
            threads,
        } => {
            let mut cfg = load(preset.as_deref(), config.as_ref())?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            let records = run_experiment_with(&cfg, &RunOptions { timing, threads })?;
            let sink: Box<dyn Write> = match &out {
                Some(path) => Box::new(
                    std::fs::File::create(path)
                        .with_context(|| format!("cannot write {}", path.display()))?,
                ),
                None => Box::new(std::io::stdout().lock()),
            };
            if agg {
                write_aggregate(&aggregate(&records), format, sink)?;
            } else {
                write_records(&records, format, sink)?;
            }
        }
    }
    Ok(())
}
