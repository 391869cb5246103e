//! Command-line front end: ingest, measures, score, regress, compare, synth
//! and the full pipeline.

pub mod compare;
pub mod config;
pub mod ingest;
pub mod measures;
pub mod regress;
pub mod score;
pub mod synth;
pub mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use log::error;
use socrisk::procurement::MissingMode;
use socrisk::Exec;

use crate::config::RunConfig;

#[derive(Debug, Parser)]
#[command(
    name = "socrisk",
    version,
    about = "Social capital and procurement risk at settlement level"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration; flags below override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub missing_mode: Option<MissingArg>,
    /// Standardize the dependent variables before fitting.
    #[arg(long, global = true)]
    pub standardize_dv: bool,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MissingArg {
    Impute0,
    Strict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Clean the network and write it with a cleaning report.
    Ingest,
    /// Fragmentation and diversity per eligible settlement.
    Measures,
    /// Contract red flags and settlement risk averages.
    Score,
    /// Model suite, VIF, ANOVA and marginal effects.
    Regress,
    /// Mann-Whitney comparison of two settlement groups.
    Compare,
    /// Generate a synthetic country and a run config for it.
    Synth,
    /// Ingest, measures, score, regress and, with a group file, compare.
    Pipeline,
}

impl Cli {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.threads {
            cfg.threads = t;
        }
        if let Some(m) = self.missing_mode {
            cfg.missing_mode = match m {
                MissingArg::Impute0 => MissingMode::Impute0,
                MissingArg::Strict => MissingMode::Strict,
            };
        }
        if self.standardize_dv {
            cfg.standardize_dv = true;
        }
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn exec_for(cfg: &RunConfig) -> Exec {
    if cfg.threads == 1 || !cfg!(feature = "parallel") {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

#[cfg(feature = "parallel")]
fn init_threads(cfg: &RunConfig) {
    if cfg.threads > 1 {
        // a pool may already exist when called more than once in a process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn init_threads(_: &RunConfig) {}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<()> {
    init_threads(cfg);
    let exec = exec_for(cfg);
    std::fs::create_dir_all(&cfg.out)?;
    match command {
        Command::Ingest => {
            ingest::run(cfg)?;
        }
        Command::Measures => {
            let ing = ingest::load(cfg)?;
            measures::run(cfg, &ing.graph, exec)?;
        }
        Command::Score => {
            score::run(cfg, exec)?;
        }
        Command::Regress => {
            print!("{}", regress::run(cfg)?.text);
        }
        Command::Compare => {
            compare::run(cfg)?;
        }
        Command::Synth => {
            synth::run(cfg, exec)?;
        }
        Command::Pipeline => {
            let ing = ingest::run(cfg)?;
            measures::run(cfg, &ing.graph, exec)?;
            score::run(cfg, exec)?;
            print!("{}", regress::run(cfg)?.text);
            if cfg.groups.is_some() {
                compare::run(cfg)?;
            }
        }
    }
    Ok(())
}

/// Parses arguments, runs the command and maps failure to a nonzero exit.
pub fn main_entry() -> ExitCode {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .try_init();
    let cli = Cli::parse();
    match cli.resolve().and_then(|cfg| execute(cli.command, &cfg)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("reason=FATAL {e:#}");
            ExitCode::FAILURE
        }
    }
}
