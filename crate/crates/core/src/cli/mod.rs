//! Command-line experiment runner.
//!
//! `condent run <config>` executes one experiment and writes its CSV files,
//! a `summary.txt` and a `manifest.toml` into the output directory.
//! `condent validate <config>` lists every violated constraint. Exit codes:
//! 0 on success, 1 on a runtime failure, 2 on an invalid config.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::entropy::Units;

pub mod config;
pub mod output;
pub mod plan;
pub mod run;

pub use config::{load, ExperimentConfig, ExperimentKind, LoadedConfig};
pub use output::{fmt_num, OutputEntry, RunManifest};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "CONDENT_OUTPUT_DIR";

/// Output directory used when neither flag, config nor environment set one.
pub const DEFAULT_OUTPUT_DIR: &str = "condent-out";

pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("invalid config:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
    #[error(transparent)]
    Runtime(#[from] crate::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Runtime(_) | CliError::Output { .. } => 1,
            CliError::Io { .. } | CliError::Parse(_) | CliError::Invalid(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "condent", version, about = "Conditional entropy and martingale experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Override the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output directory.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Report entropies in bits instead of nats.
        #[arg(long)]
        bits: bool,
    },
    /// Check a config file without running it.
    Validate { config: PathBuf },
}

/// Options for [`run`] beyond the config itself.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub units: Units,
}

/// Result of a successful run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub output_dir: PathBuf,
    pub manifest: RunManifest,
}

/// Lists every violated constraint of the config at `path`; an empty list
/// means the config is runnable.
pub fn validate(path: &Path) -> Result<Vec<String>, CliError> {
    let loaded = load(path)?;
    let seed = loaded.config.seed.unwrap_or(0);
    Ok(match plan::build(&loaded, seed) {
        Ok(_) => Vec::new(),
        Err(violations) => violations,
    })
}

/// Validates, runs and writes all outputs followed by the manifest.
pub fn run(path: &Path, options: &RunOptions) -> Result<RunOutcome, CliError> {
    let loaded = load(path)?;
    let seed = options.seed.or(loaded.config.seed).unwrap_or(0);
    let plan = plan::build(&loaded, seed).map_err(CliError::Invalid)?;
    let files = run::execute(&plan, options.units)?;

    let output_dir = resolve_output_dir(&loaded, options);
    std::fs::create_dir_all(&output_dir).map_err(|source| CliError::Output {
        path: output_dir.clone(),
        source,
    })?;
    let mut outputs = Vec::with_capacity(files.len());
    for file in &files {
        output::write_atomic(&output_dir, &file.name, file.contents.as_bytes())?;
        outputs.push(OutputEntry {
            file: file.name.clone(),
            sha256: output::sha256_hex(file.contents.as_bytes()),
        });
    }
    let manifest = RunManifest {
        tool: "condent".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        experiment: loaded.config.experiment.name().into(),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        seed,
        outputs,
        config: loaded.text.clone(),
    };
    let text = toml::to_string(&manifest).map_err(|e| CliError::Output {
        path: output_dir.join(MANIFEST_FILE),
        source: std::io::Error::other(e),
    })?;
    output::write_atomic(&output_dir, MANIFEST_FILE, text.as_bytes())?;
    Ok(RunOutcome {
        output_dir,
        manifest,
    })
}

/// Flag, then config (relative to the config file), then environment, then
/// the default.
fn resolve_output_dir(loaded: &LoadedConfig, options: &RunOptions) -> PathBuf {
    if let Some(dir) = &options.output_dir {
        return dir.clone();
    }
    if let Some(dir) = &loaded.config.output_dir {
        return loaded.resolve(dir);
    }
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => PathBuf::from(DEFAULT_OUTPUT_DIR),
    }
}

/// Entry point of the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Run {
            config,
            seed,
            output_dir,
            bits,
        } => {
            let options = RunOptions {
                seed,
                output_dir,
                units: if bits { Units::Bits } else { Units::Nats },
            };
            match run(&config, &options) {
                Ok(outcome) => {
                    println!(
                        "wrote {} files to {}",
                        outcome.manifest.outputs.len() + 1,
                        outcome.output_dir.display()
                    );
                    0
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
        Command::Validate { config } => match validate(&config) {
            Ok(violations) if violations.is_empty() => {
                println!("ok");
                0
            }
            Ok(violations) => {
                for v in &violations {
                    println!("{v}");
                }
                2
            }
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
    }
}
