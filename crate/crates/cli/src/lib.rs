//! Configuration-driven verification campaigns for the degenerate wave
//! laboratory. The binary is a thin wrapper around [`run`].

pub mod args;
pub mod campaigns;
pub mod config;
pub mod output;

use campaigns::CampaignOutcome;
use config::ExperimentConfig;
use output::Output;
use serde::Serialize;

pub use args::{Cli, Command};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] degwave::Error),
}

impl CliError {
    /// 2 for anything the user can fix in the configuration, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(
                degwave::Error::Config(_) | degwave::Error::Domain(_) | degwave::Error::Argument(_),
            ) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub version: &'static str,
    pub command: &'a str,
    pub config_hash: String,
    pub passed: bool,
    pub config: &'a ExperimentConfig,
    pub campaigns: Vec<CampaignOutcome>,
}

/// Runs one command with a fully resolved configuration and writes
/// `report.json`. Returns the report's overall verdict.
pub fn execute(command: &Command, config: &ExperimentConfig) -> Result<bool, CliError> {
    config.validate()?;
    let out = Output::create(&config.output_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| CliError::Config(format!("threads: {e}")))?;
    log::info!("config hash {} (version {VERSION})", config.hash());
    log::info!(
        "seeds: sweep {}, embedding {}, multiplier {}, duality {}",
        config.sweep.seed,
        config.embedding.seed,
        config.multiplier.seed,
        config.duality.seed
    );
    let campaigns = pool.install(|| -> Result<Vec<CampaignOutcome>, CliError> {
        Ok(match command {
            Command::Solve(_) => vec![campaigns::solve(config, &out)?],
            Command::Convergence(_) => vec![campaigns::convergence(config, &out)?],
            Command::VerifyEmbedding(_) => vec![campaigns::verify_embedding(config, &out)?],
            Command::VerifyEnergy(_) => vec![campaigns::verify_energy(config, &out)?],
            Command::VerifyMultiplier(_) => vec![campaigns::verify_multiplier(config, &out)?],
            Command::SweepTheorems(_) => vec![campaigns::sweep_theorems(config, &out)?],
            Command::VerifyDuality(_) => vec![campaigns::verify_duality(config, &out)?],
            Command::VerifyLiminf(_) => vec![campaigns::verify_liminf(config, &out)?],
            Command::ReportAll(_) => campaigns::report_all(config, &out)?,
        })
    })?;
    let passed = campaigns.iter().all(|c| c.passed);
    let report = Report {
        version: VERSION,
        command: command.name(),
        config_hash: config.hash(),
        passed,
        config,
        campaigns,
    };
    out.write_json(&out.path("report.json"), &report)?;
    for c in &report.campaigns {
        println!(
            "{:<18} {}",
            c.name,
            if c.passed { "ok" } else { "VIOLATED" }
        );
    }
    println!("report: {}", out.path("report.json").display());
    Ok(passed)
}

/// Parses the configuration, applies the flag overrides and executes.
/// Returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let resolved = cli.resolve_config().and_then(|c| execute(&cli.command, &c));
    match resolved {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("degwave: {e}");
            e.exit_code()
        }
    }
}
