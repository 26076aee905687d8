use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qmachine", version, about = "Sphere-model hidden-measurement machine")]
pub struct Cli {
    /// Read every angle flag in degrees instead of radians.
    #[arg(long, global = true)]
    pub degrees: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Outcome probabilities of one experiment on a pure state.
    Prob(ProbArgs),
    /// Seeded Monte Carlo run of the machine.
    Simulate(SimulateArgs),
    /// Conditional probability P(u, w, μ) with uniform prior.
    Conditional(ConditionalArgs),
    /// Grid of conditional probabilities written as CSV.
    Sweep(SweepArgs),
    /// Embeddability verdicts.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Fit a poll to the ε-model, predict, census and classify.
    Survey(SurveyArgs),
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub d: f64,
    #[command(flatten)]
    pub state: StateArgs,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = true)]
pub struct StateArgs {
    /// Angle between the state and the experiment axis.
    #[arg(long, conflicts_with_all = ["x", "state"], allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// Projection of the state on the axis, in [−1, 1].
    #[arg(long, conflicts_with = "state", allow_hyphen_values = true)]
    pub x: Option<f64>,
    /// State vector `x,y,z`; used with `--axis`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub state: Option<Vec<f64>>,
    /// Experiment axis `x,y,z` (default: the z axis).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, requires = "state")]
    pub axis: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct SeedArgs {
    #[arg(long, env = "QMACHINE_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ProbArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[command(flatten)]
    pub seed: SeedArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Quad,
    Mc,
    Formula,
}

#[derive(Debug, Args)]
pub struct ConditionalArgs {
    #[arg(long)]
    pub epsilon: f64,
    /// Angle between the two experiment axes.
    #[arg(long)]
    pub alpha: f64,
    /// Offset of the target experiment.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub d: f64,
    /// Offset of the conditioning experiment.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub c: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Quad)]
    pub method: MethodArg,
    #[arg(long, default_value_t = qmachine_core::conditional::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[command(flatten)]
    pub seed: SeedArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub epsilons: Vec<f64>,
    /// Number of α points on [0, π], endpoints included.
    #[arg(long, default_value_t = 181)]
    pub alpha_steps: usize,
    #[arg(long, default_value_t = qmachine_core::conditional::DEFAULT_TOL)]
    pub tol: f64,
    /// Monte Carlo trials per row; 0 leaves the MC columns empty.
    #[arg(long, default_value_t = 0)]
    pub mc_trials: u64,
    #[command(flatten)]
    pub seed: SeedArgs,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Joint-distribution (Kolmogorov) model for a triad file.
    Kolmogorov {
        /// Triad JSON file, or `-` for stdin.
        #[arg(long)]
        triad: PathBuf,
    },
    /// Two-dimensional Hilbert model for the symmetric triad.
    Hilbert {
        /// Adjacent transition probability, as a decimal or `p/q`.
        #[arg(long)]
        gamma2: String,
    },
    /// Both checks combined.
    Classify {
        #[arg(long)]
        triad: PathBuf,
        #[arg(long)]
        gamma2: String,
    },
}

#[derive(Debug, Args)]
pub struct SurveyArgs {
    /// Survey JSON file, or `-` for stdin.
    #[arg(long)]
    pub input: PathBuf,
    /// Use this ε for every question instead of the fitted value.
    #[arg(long)]
    pub force_epsilon: Option<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub census_samples: u64,
    #[arg(long, default_value_t = qmachine_core::conditional::DEFAULT_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub seed: SeedArgs,
}
