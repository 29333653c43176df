use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Schmidt-number diagnostics for bipartite quantum states.
#[derive(Debug, Parser)]
#[command(name = "schmidt", version)]
pub struct Cli {
    /// Omit the `generated_at` timestamp so identical inputs give identical output.
    #[arg(long, global = true)]
    pub deterministic: bool,

    /// Run data-parallel loops on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Schmidt decomposition of a pure state.
    #[command(subcommand)]
    Schmidt(SchmidtCmd),
    /// Schmidt witnesses.
    #[command(subcommand)]
    Witness(WitnessCmd),
    /// Robustness values and bounds for pure states.
    #[command(subcommand)]
    Robustness(RobustnessCmd),
    /// Schmidt number of the isotropic state 1 + beta P+.
    Isotropic {
        #[arg(long)]
        d: usize,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
    },
    /// Explicit Schmidt-number constructions.
    #[command(subcommand)]
    Construct(ConstructCmd),
    /// Partial-transpose distillability screen.
    #[command(subcommand)]
    Distill(DistillCmd),
    /// Conjectured Schmidt-ball radius around the identity.
    BallRadius {
        #[arg(long)]
        k: usize,
        /// Largest embedding dimension scanned (default 4k).
        #[arg(long)]
        dmax: Option<usize>,
    },
    /// Witness-based lower bounds on the random Schmidt robustness.
    #[command(subcommand)]
    Optimize(OptimizeCmd),
    /// Parameter sweeps.
    #[command(subcommand)]
    Sweep(SweepCmd),
}

#[derive(Debug, Subcommand)]
pub enum SchmidtCmd {
    Decompose {
        /// JSON file holding `[[re, im], ...]` of length d².
        #[arg(long, conflicts_with = "coeffs", required_unless_present = "coeffs")]
        vec: Option<PathBuf>,
        /// Comma-separated amplitudes of Σ c_i |ii⟩.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        coeffs: Option<Vec<f64>>,
        #[arg(long, default_value_t = schmidt_core::states::SCHMIDT_RANK_TOL)]
        tol: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum WitnessCmd {
    /// The class-k witness 1 − (d/k) P+.
    Canonical {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        /// Density-matrix file to evaluate the witness on.
        #[arg(long)]
        state: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct CoeffArgs {
    /// Comma-separated Schmidt coefficients (normalized automatically).
    #[arg(long, value_delimiter = ',', required = true)]
    pub coeffs: Vec<f64>,
    /// Zero-pad to this local dimension.
    #[arg(long)]
    pub d: Option<usize>,
    /// Report random-robustness values with the identity normalized to trace one.
    #[arg(long)]
    pub normalized_identity: bool,
}

#[derive(Debug, Subcommand)]
pub enum RobustnessCmd {
    /// R_s, R_g and R_r.
    Pure(CoeffArgs),
    /// Generalized and random Schmidt-n robustness bounds.
    Schmidt {
        #[command(flatten)]
        coeffs: CoeffArgs,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum ConstructCmd {
    /// Equal-weight mixture over n-subsets; writes a matrix file.
    SubsetMix {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',')]
        coeffs: Option<Vec<f64>>,
        /// Output path (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Subset mixture → QFT → phase mixing, with residues.
    TwirlVerify {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BoundArg {
    Theorem5,
    Weak,
    /// Conjectural; output is stamped accordingly.
    Conjecture1,
}

#[derive(Debug, Subcommand)]
pub enum DistillCmd {
    /// Screen one or more density-matrix files.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "theorem5")]
        bound: BoundArg,
    },
    /// The worked 3x3 example, end to end.
    Example,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum OptimizeCmd {
    Rrn {
        /// Schmidt coefficients of the target state.
        #[arg(long, value_delimiter = ',', required = true)]
        b: Vec<f64>,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        normalized_identity: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum SweepCmd {
    /// Lower bounds on a1|00⟩ + a2(|11⟩ + …) versus a1², as CSV.
    Figure1 {
        #[arg(long, default_value_t = 19)]
        points: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
}
