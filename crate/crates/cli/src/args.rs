use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "entbound", version, about = "Entanglement bounds from two local measurement bases")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Two particles on a chain: sweep the tunneling time of the tilted basis.
    #[command(args_override_self = true)]
    Lattice(LatticeArgs),
    /// Spin-1 quench from the polar state.
    #[command(name = "spin1-quench", args_override_self = true)]
    Spin1Quench(QuenchArgs),
    /// Spin-1 ground states: q scan or particle-number scaling.
    #[command(name = "spin1-ground", args_override_self = true)]
    Spin1Ground(GroundArgs),
    /// Randomized property suite for the bounds.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// `key = value` file; explicit flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long = "log-base", default_value = "2", value_parser = ["2", "e"])]
    pub log_base: String,
}

#[derive(Args, Debug, Clone)]
pub struct OptimizerArgs {
    /// Evaluation budget per optimizer run.
    #[arg(long = "max-evals", default_value_t = 2000)]
    pub max_evals: usize,
    /// Random restarts in addition to the warm start.
    #[arg(long, default_value_t = 3)]
    pub restarts: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tolerance: f64,
    /// Write the optimizer trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct TiltArgs {
    /// Phase imprints (φ₊, φ₀, φ₋) in units of π, comma separated.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "short_time_imprint")]
    pub phases: Option<String>,
    /// Imprint (0.095, −0.495, 0.400)π before the Fourier rotation.
    #[arg(long = "short-time-imprint")]
    pub short_time_imprint: bool,
    /// Eight Gell-Mann coefficients replacing the Fourier rotation.
    #[arg(long, allow_hyphen_values = true)]
    pub tilt: Option<String>,
    /// Maximize the bound over tilts at every grid point.
    #[arg(long)]
    pub optimize: bool,
}

#[derive(Args, Debug, Clone)]
pub struct LatticeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Number of sites.
    #[arg(long = "L", default_value_t = 2)]
    pub sites: usize,
    #[arg(long = "U-over-J", default_value_t = -100.0, allow_negative_numbers = true)]
    pub u_over_j: f64,
    /// Tunneling times tJ: `start:stop:step` or a comma list.
    #[arg(long = "t-grid", default_value = "0:0.8:0.01")]
    pub t_grid: String,
    #[arg(long)]
    pub periodic: bool,
    /// Refine the best grid point with a one-dimensional search.
    #[arg(long)]
    pub refine: bool,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Args, Debug, Clone)]
pub struct QuenchArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "N", default_value_t = 10)]
    pub particles: usize,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub g: f64,
    /// Quadratic Zeeman shift (default −g(N − ½)).
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,
    /// Times in units of 1/|g|.
    #[arg(long = "t-grid", default_value = "0:0.6:0.005")]
    pub t_grid: String,
    #[command(flatten)]
    pub tilt: TiltArgs,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Args, Debug, Clone)]
#[command(group(ArgGroup::new("mode").required(true).args(["q_grid", "scaling"])))]
pub struct GroundArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "N", default_value_t = 10)]
    pub particles: usize,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub g: f64,
    /// q/q_c values for a ground-state scan.
    #[arg(long = "q-grid", allow_hyphen_values = true)]
    pub q_grid: Option<String>,
    /// Comma list of N for the logarithmic scaling fit.
    #[arg(long)]
    pub scaling: Option<String>,
    /// q/q_c used in scaling mode.
    #[arg(long = "q-over-qc", default_value_t = -5.0, allow_negative_numbers = true)]
    pub q_over_qc: f64,
    /// Upper end of the search interval for the fit offset b.
    #[arg(long = "b-max", default_value_t = 64.0)]
    pub b_max: f64,
    #[command(flatten)]
    pub tilt: TiltArgs,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Local dimensions, comma separated.
    #[arg(long, default_value = "2,3,4")]
    pub dims: String,
    /// Where to write a counterexample if any property fails.
    #[arg(long, default_value = "counterexample.txt")]
    pub dump: PathBuf,
    /// Self-test: add one bit to every q_fsd before checking.
    #[arg(long = "corrupt-q-fsd", hide = true)]
    pub corrupt_q_fsd: bool,
}
