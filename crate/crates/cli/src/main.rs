//! `patchkit`: run patch-dynamics experiments described by JSON documents.

mod config;
mod error;
mod output;
mod plot;
mod presets;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::Experiment;
use error::CliError;
use output::OutputDir;
use run::RunOptions;

#[derive(Parser)]
#[command(name = "patchkit", version, about = "Controlled periodic patch experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment in a JSON configuration file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        opts: RunFlags,
    },
    /// Check a configuration without running it.
    Validate { config: PathBuf },
    /// Run a named preset, or print it with --print.
    Preset {
        /// One of fig2, fig5, fig8, fig10.
        name: String,
        /// Print the preset document instead of running it.
        #[arg(long)]
        print: bool,
        #[command(flatten)]
        opts: RunFlags,
    },
}

#[derive(Args, Clone)]
struct RunFlags {
    /// Output directory (overrides the configuration).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for MD experiments (overrides the configuration).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for multi-seed runs.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Abort MD integration after this many seconds of wall time.
    #[arg(long, value_name = "SECONDS")]
    max_wall: Option<f64>,
}

fn read_config(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn validate(text: &str) -> Result<(), CliError> {
    let exp = Experiment::parse(text)?;
    let v = exp.violations();
    if v.is_empty() {
        Ok(())
    } else {
        Err(CliError::Schema(v.join("; ")))
    }
}

fn run_document(text: &str, default_dir: &str, flags: &RunFlags) -> Result<(), CliError> {
    let mut exp = Experiment::parse(text)?;
    if let Some(seed) = flags.seed {
        exp.override_seed(seed);
    }
    let violations = exp.violations();
    if !violations.is_empty() {
        return Err(CliError::Schema(violations.join("; ")));
    }
    if let Some(w) = flags.max_wall {
        if !(w > 0.0) {
            return Err(CliError::Schema(format!("--max-wall must be positive, got {w}")));
        }
    }
    let dir = flags.out.clone().or_else(|| exp.output().dir.clone()).unwrap_or_else(|| PathBuf::from(default_dir));
    let mut out = OutputDir::create(&dir)?;
    let opts = RunOptions { jobs: flags.jobs.max(1), max_wall: flags.max_wall.map(Duration::from_secs_f64) };
    log::info!("running {} into {}", exp.kind(), dir.display());
    let start = Instant::now();
    let outcome = run::execute(&exp, &mut out, opts)?;
    let manifest = json!({
        "tool": "patchkit",
        "versions": { "patchkit-cli": env!("CARGO_PKG_VERSION"), "patchkit": patchkit::VERSION },
        "kind": exp.kind(),
        "config": exp,
        "wall_time_s": start.elapsed().as_secs_f64(),
        "results": outcome.results,
        "files": out.files(),
    });
    out.write_manifest(&manifest)?;
    print!("{}", outcome.summary);
    println!("wrote {} files and manifest.json to {}", out.files().len(), dir.display());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, opts } => {
            let text = read_config(&config)?;
            let stem = config.file_stem().and_then(|s| s.to_str()).unwrap_or("run").to_string();
            run_document(&text, &format!("{stem}_out"), &opts)
        }
        Command::Validate { config } => {
            validate(&read_config(&config)?)?;
            println!("ok");
            Ok(())
        }
        Command::Preset { name, print, opts } => {
            let text = presets::lookup(&name).ok_or_else(|| {
                CliError::Schema(format!("unknown preset {name:?}; available: {}", presets::names().join(", ")))
            })?;
            if print {
                print!("{text}");
                Ok(())
            } else {
                run_document(text, &name, &opts)
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
