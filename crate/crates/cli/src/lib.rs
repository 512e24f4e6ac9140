//! Experiment runner: one subcommand per experiment, one output directory
//! per config, CSV tables plus a manifest with checksums.

pub mod commands;
pub mod config;
pub mod output;

use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Parser, ValueEnum};
use parametrix_core::Error;

use crate::config::Config;
use crate::output::Run;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("output directory {0} exists (use --force)")]
    Exists(PathBuf),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn config(line: usize, msg: String) -> Self {
        CliError::Config(format!("line {line}: {msg}"))
    }

    /// Process exit code.
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Exists(_) => 2,
            CliError::Core(e) => match e {
                Error::Divergence { .. } => 3,
                Error::Capability(_) => 4,
                Error::Config(_)
                | Error::Parse(_)
                | Error::InvalidArgument(_)
                | Error::Dimension(_)
                | Error::Resolution(_)
                | Error::InvalidYoung(_)
                | Error::NotElliptic(_) => 2,
                _ => 1,
            },
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Young,
    Norms,
    Solve,
    Contraction,
    Mollify,
    Shift,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Young => "young",
            Command::Norms => "norms",
            Command::Solve => "solve",
            Command::Contraction => "contraction",
            Command::Mollify => "mollify",
            Command::Shift => "shift",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "parametrix", version, about = "Orlicz-space and parametrix experiments")]
pub struct Cli {
    pub command: Command,
    /// Config file; repeat to run several.
    #[arg(long = "config", required = true)]
    pub configs: Vec<PathBuf>,
    /// Parent of the run directories.
    #[arg(long, default_value = "runs")]
    pub out: PathBuf,
    /// Overrides the `seed` key.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replace an existing run directory.
    #[arg(long)]
    pub force: bool,
    /// Configs processed in parallel.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

/// Runs one config; returns the run directory and the command's exit code.
pub fn run_config(cli: &Cli, path: &Path) -> Result<(PathBuf, i32), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut cfg = Config::parse(cli.command.name(), &text, base)?;
    if let Some(s) = cli.seed {
        cfg.set("seed", &s.to_string());
    }
    let seed = cfg.u64("seed")?;
    let mut run = Run::create(&cli.out, &cfg.command, &cfg.resolved(), seed, cli.force)?;
    match commands::dispatch(&cfg, &mut run) {
        Ok(code) => Ok((run.finish()?, code)),
        Err(e) => {
            // a run directory exists only for completed runs
            let _ = std::fs::remove_dir_all(&run.dir);
            Err(e)
        }
    }
}

/// Runs every config and returns the largest exit code.
pub fn run(cli: &Cli) -> i32 {
    let next = AtomicUsize::new(0);
    let worst = Mutex::new(0);
    let jobs = cli.jobs.clamp(1, cli.configs.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(path) = cli.configs.get(i) else { break };
                let code = match run_config(cli, path) {
                    Ok((dir, code)) => {
                        println!("{}: {} (exit {code})", path.display(), dir.display());
                        code
                    }
                    Err(e) => {
                        eprintln!("{}: {e}", path.display());
                        e.code()
                    }
                };
                let mut w = worst.lock().unwrap();
                *w = (*w).max(code);
            });
        }
    });
    worst.into_inner().unwrap()
}
