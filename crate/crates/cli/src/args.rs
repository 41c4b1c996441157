use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "fiberqm",
    version,
    about = "Bipartite states in the tensor and fiber pictures"
)]
pub struct Cli {
    /// Relative cutoff for numerical Schmidt ranks.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,

    /// Output path for the primary artifact (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a state file.
    Make(MakeArgs),
    /// Map a state file between the tensor and fiber representations.
    Convert(ConvertArgs),
    /// Expectation of a one-factor observable.
    Expect(ExpectArgs),
    /// Schmidt coefficients, rank and decomposability.
    Schmidt(StateArg),
    /// Outcome probabilities and sampled shots of a projective measurement.
    Measure(MeasureArgs),
    /// Free harmonic evolution.
    Evolve(EvolveArgs),
    /// Compare an entangled pointer state with its decomposable surrogate.
    PointerDemo(PointerDemoArgs),
}

#[derive(Debug, Clone, Args)]
pub struct BasisArgs {
    /// Basis functions per axis of the first factor.
    #[arg(long, default_value_t = 8)]
    pub nv: usize,

    /// Basis functions per axis of the second factor.
    #[arg(long, default_value_t = 8)]
    pub nw: usize,

    /// Spatial dimension of each factor.
    #[arg(long, default_value_t = 1)]
    pub dim: usize,

    /// Quadrature nodes per axis (twice the order when absent).
    #[arg(long)]
    pub quad: Option<usize>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct MakeArgs {
    #[command(flatten)]
    pub basis: BasisArgs,

    /// First-factor coefficients, comma separated, each `re` or `re:im`.
    #[arg(long, allow_hyphen_values = true)]
    pub psi: Option<String>,

    /// Second-factor coefficients.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<String>,

    /// First-factor coefficients of a second branch.
    #[arg(long, allow_hyphen_values = true)]
    pub psi2: Option<String>,

    /// Second-factor coefficients of a second branch.
    #[arg(long, allow_hyphen_values = true)]
    pub phi2: Option<String>,

    /// Amplitude of the first branch.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub a: String,

    /// Amplitude of the second branch.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub b: String,

    /// (e0⊗e0 + e1⊗e1)/√2.
    #[arg(long)]
    pub bell: bool,

    /// Random normalized state drawn from --seed.
    #[arg(long)]
    pub random: bool,

    /// Schmidt rank of the random state (full rank when absent).
    #[arg(long, requires = "random")]
    pub rank: Option<usize>,

    /// Rescale the result to unit norm.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Representation {
    Tensor,
    Fiber,
}

#[derive(Debug, Args)]
pub struct StateArg {
    /// State file.
    #[arg(long)]
    pub state: PathBuf,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long)]
    pub state: PathBuf,

    /// Target representation (the other one when absent).
    #[arg(long, value_enum)]
    pub to: Option<Representation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FactorArg {
    First,
    Second,
}

impl From<FactorArg> for fiberqm::Factor {
    fn from(f: FactorArg) -> Self {
        match f {
            FactorArg::First => fiberqm::Factor::First,
            FactorArg::Second => fiberqm::Factor::Second,
        }
    }
}

#[derive(Debug, Args)]
pub struct ExpectArgs {
    #[arg(long)]
    pub state: PathBuf,

    /// Observable file.
    #[arg(long)]
    pub observable: PathBuf,

    /// Factor the observable acts on.
    #[arg(long, value_enum, default_value_t = FactorArg::Second)]
    pub factor: FactorArg,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    #[arg(long)]
    pub state: PathBuf,

    #[arg(long)]
    pub observable: PathBuf,

    #[arg(long, value_enum, default_value_t = FactorArg::Second)]
    pub factor: FactorArg,

    /// Number of sampled shots.
    #[arg(long, default_value_t = 1000)]
    pub shots: u64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct EvolveArgs {
    #[arg(long)]
    pub state: PathBuf,

    /// Evolution time in oscillator units.
    #[arg(long)]
    pub time: f64,
}

#[derive(Debug, Args)]
pub struct PointerDemoArgs {
    #[command(flatten)]
    pub basis: BasisArgs,

    /// Weight |α|² of the first branch.
    #[arg(long, default_value_t = 0.5)]
    pub alpha2: f64,

    /// Pointer classes of the second factor, e.g. "0,1|2,3"; unlisted
    /// indices form one extra class.
    #[arg(long, default_value = "0,1|2,3")]
    pub classes: String,

    /// Random macroscopic observables to compare.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,

    /// Per-trial table.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}
