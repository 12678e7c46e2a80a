//! Command-line flags. Every flag overrides the matching configuration key.

use crate::config::{ExperimentConfig, SnapshotKind};
use crate::CliError;
use clap::{Args, Parser, Subcommand, ValueEnum};
use degwave::transposition::LiminfEstimator;
use degwave::wave::{MmsEntry, Scheme};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "degwave",
    version,
    about = "Verification campaigns for the degenerate wave equation"
)]
pub struct Cli {
    /// TOML configuration; missing keys take their documented defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (`output_dir`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads, 0 for all cores (`threads`).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub scheme: Option<SchemeArg>,
    /// Degeneracy exponent(s), comma separated. Multi-alpha campaigns take the
    /// list; single-alpha campaigns take exactly one value.
    #[arg(long, global = true, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemeArg {
    Newmark,
    Leapfrog,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EstimatorArg {
    Extrapolated,
    TailMin,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SnapshotArg {
    None,
    Csv,
    Binary,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one manufactured problem and write its traces.
    Solve(SolveArgs),
    /// Refinement study over the manufactured catalog.
    Convergence(ConvergenceArgs),
    /// Explicit-constant embedding inequalities on random fields.
    VerifyEmbedding(EmbeddingArgs),
    /// Energy conservation and the energy-neighbourhood bound.
    VerifyEnergy(EnergyArgs),
    /// Multiplier profile properties and the multiplier identity.
    VerifyMultiplier(MultiplierArgs),
    /// Boundary-neighbourhood ratio sweeps over random suites.
    SweepTheorems(SweepArgs),
    /// Transposition duality residuals and very weak well-posedness.
    VerifyDuality(DualityArgs),
    /// Liminf experiment on a convergent family.
    VerifyLiminf(LiminfArgs),
    /// Every campaign above.
    ReportAll(ReportAllArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub entry: Option<MmsEntry>,
    #[arg(long)]
    pub n_cells: Option<usize>,
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long, value_enum)]
    pub snapshots: Option<SnapshotArg>,
    #[arg(long)]
    pub stride: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<usize>>,
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub courant: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EmbeddingArgs {
    #[arg(long, value_delimiter = ',')]
    pub a: Option<Vec<f64>>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub n_cells: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    #[arg(long)]
    pub n_cells: Option<usize>,
    #[arg(long)]
    pub nt: Option<usize>,
    #[arg(long)]
    pub t_final: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MultiplierArgs {
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    #[arg(long)]
    pub eps0: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<usize>>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub size: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DualityArgs {
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct LiminfArgs {
    /// zero, constant-mms or oscillating.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorArg>,
    #[arg(long)]
    pub n_cells: Option<usize>,
    #[arg(long)]
    pub nt: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ReportAllArgs {
    /// Seed of the random sweep suite.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve(_) => "solve",
            Command::Convergence(_) => "convergence",
            Command::VerifyEmbedding(_) => "verify-embedding",
            Command::VerifyEnergy(_) => "verify-energy",
            Command::VerifyMultiplier(_) => "verify-multiplier",
            Command::SweepTheorems(_) => "sweep-theorems",
            Command::VerifyDuality(_) => "verify-duality",
            Command::VerifyLiminf(_) => "verify-liminf",
            Command::ReportAll(_) => "report-all",
        }
    }
}

fn set<T: Clone>(slot: &mut T, value: &Option<T>) {
    if let Some(v) = value {
        *slot = v.clone();
    }
}

fn single_alpha(alpha: &Option<Vec<f64>>, command: &str) -> Result<Option<f64>, CliError> {
    match alpha.as_deref() {
        None => Ok(None),
        Some([a]) => Ok(Some(*a)),
        Some(list) => Err(CliError::Config(format!(
            "--alpha: `{command}` takes one value, got {list:?}"
        ))),
    }
}

impl Cli {
    pub fn resolve_config(&self) -> Result<ExperimentConfig, CliError> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        self.apply(&mut c)?;
        Ok(c)
    }

    /// Writes the flag values into `c`.
    pub fn apply(&self, c: &mut ExperimentConfig) -> Result<(), CliError> {
        set(&mut c.output_dir, &self.out);
        set(&mut c.threads, &self.threads);
        if let Some(s) = self.scheme {
            c.scheme = match s {
                SchemeArg::Newmark => Scheme::NewmarkAvgAccel,
                SchemeArg::Leapfrog => Scheme::Leapfrog,
            };
        }
        let name = self.command.name();
        let one = single_alpha(&self.alpha, name);
        match &self.command {
            Command::Solve(a) => {
                set(&mut c.solve.alpha, &one?);
                set(&mut c.solve.entry, &a.entry);
                set(&mut c.solve.n_cells, &a.n_cells);
                set(&mut c.solve.t_final, &a.t_final);
                set(&mut c.solve.snapshot_stride, &a.stride);
                if let Some(s) = a.snapshots {
                    c.solve.snapshots = match s {
                        SnapshotArg::None => SnapshotKind::None,
                        SnapshotArg::Csv => SnapshotKind::Csv,
                        SnapshotArg::Binary => SnapshotKind::Binary,
                    };
                }
            }
            Command::Convergence(a) => {
                set(&mut c.alphas, &self.alpha);
                set(&mut c.convergence.levels, &a.levels);
                set(&mut c.convergence.t_final, &a.t_final);
                set(&mut c.convergence.courant, &a.courant);
            }
            Command::VerifyEmbedding(a) => {
                set(&mut c.alphas, &self.alpha);
                set(&mut c.embedding.a, &a.a);
                set(&mut c.embedding.samples, &a.samples);
                set(&mut c.embedding.n_cells, &a.n_cells);
                set(&mut c.embedding.seed, &a.seed);
            }
            Command::VerifyEnergy(a) => {
                set(&mut c.energy.alpha, &one?);
                set(&mut c.energy.n_cells, &a.n_cells);
                set(&mut c.energy.nt, &a.nt);
                set(&mut c.energy.t_final, &a.t_final);
            }
            Command::VerifyMultiplier(a) => {
                set(&mut c.multiplier.alpha, &one?);
                set(&mut c.multiplier.delta, &a.delta);
                set(&mut c.multiplier.gamma, &a.gamma);
                set(&mut c.multiplier.levels, &a.levels);
            }
            Command::SweepTheorems(a) => {
                set(&mut c.alphas, &self.alpha);
                set(&mut c.sweep.epsilons, &a.eps);
                set(&mut c.sweep.epsilon0, &a.eps0);
                set(&mut c.sweep.levels, &a.levels);
                set(&mut c.sweep.seed, &a.seed);
                set(&mut c.sweep.size, &a.size);
            }
            Command::VerifyDuality(a) => {
                set(&mut c.duality.alpha, &one?);
                set(&mut c.duality.levels, &a.levels);
            }
            Command::VerifyLiminf(a) => {
                set(&mut c.liminf.alpha, &one?);
                set(&mut c.liminf.family, &a.family);
                set(&mut c.liminf.epsilons, &a.eps);
                set(&mut c.liminf.amplitude, &a.amplitude);
                set(&mut c.liminf.n_cells, &a.n_cells);
                set(&mut c.liminf.nt, &a.nt);
                if let Some(e) = a.estimator {
                    c.liminf.estimator = match e {
                        EstimatorArg::Extrapolated => LiminfEstimator::Extrapolated,
                        EstimatorArg::TailMin => LiminfEstimator::TailMin,
                    };
                }
            }
            Command::ReportAll(a) => {
                set(&mut c.alphas, &self.alpha);
                set(&mut c.sweep.seed, &a.seed);
            }
        }
        Ok(())
    }
}
