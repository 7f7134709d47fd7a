//! `fqe`: run gradient-descent ground-state searches, perturbation scans,
//! noise sweeps and VQE comparisons on molecular Hamiltonians.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fqe_core::descent::Mode;
use fqe_core::fermion::TwoBodyOrdering;
use fqe_core::noise::{NoiseSpec, Redraw};
use fqe_core::perturbation::SignConvention;

/// Exit status when the iteration limit was reached before convergence.
pub const EXIT_MAX_ITERS: u8 = 2;
pub const EXIT_INPUT: u8 = 3;
pub const EXIT_INTERNAL: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "fqe", version, about = "Gradient-descent ground-state solver simulated on a statevector")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Learning rate γ of the descent step I − γH.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub gamma: f64,
    /// Relative energy change that stops the descent.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub threshold: f64,
    #[arg(long, global = true, default_value_t = 500)]
    pub max_iters: usize,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Circuit)]
    pub mode: ModeArg,
    /// Constant added to H before descent.
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub shift: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for scans and sweeps; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// CSV destination; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Override the two-body ordering declared in integral files.
    #[arg(long, global = true, value_enum)]
    pub ordering: Option<OrderingArg>,
    /// Electron count for the Hartree-Fock start, overriding the file.
    #[arg(long, global = true)]
    pub electrons: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Descend from the Hartree-Fock state and write the iteration trace.
    Solve(SolveArgs),
    /// One row per `<molecule>_<distance>.json` file in a directory.
    Scan(ScanArgs),
    /// Zeroth, first and second order estimates for one input.
    Perturb(PerturbArgs),
    /// Paired descent and VQE traces aligned by iteration.
    VqeCompare(VqeArgs),
    /// Seeded noisy descents next to the noiseless trace.
    NoiseSweep(NoiseArgs),
    /// Convert an integral table to a Pauli-sum file.
    Jw(JwArgs),
}

#[derive(Args, Debug)]
pub struct NoiseFlags {
    /// Hamiltonian noise as `<kind:amp>`, kind uniform or gaussian.
    #[arg(long, default_value = "none")]
    pub noise_ham: NoiseSpec,
    /// State noise as `<kind:amp>`.
    #[arg(long, default_value = "none")]
    pub noise_state: NoiseSpec,
    /// Draw the noise once per run instead of every iteration.
    #[arg(long)]
    pub frozen: bool,
}

impl NoiseFlags {
    pub fn redraw(&self) -> Redraw {
        if self.frozen {
            Redraw::Once
        } else {
            Redraw::PerIteration
        }
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub noise: NoiseFlags,
    /// Add a column of ancilla attempts drawn as Bernoulli(P_s) trials.
    #[arg(long)]
    pub sample: bool,
    /// Write the final state as a binary dump.
    #[arg(long)]
    pub dump_state: Option<PathBuf>,
    /// Start from a state dump instead of Hartree-Fock.
    #[arg(long)]
    pub resume: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    pub dir: PathBuf,
    #[arg(long, value_enum, default_value_t = ScanMethod::Exact)]
    pub method: ScanMethod,
    /// Also plot every column against distance.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SignArg::Standard)]
    pub sign_convention: SignArg,
}

#[derive(Args, Debug)]
pub struct PerturbArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = SignArg::Standard)]
    pub sign_convention: SignArg,
}

#[derive(Args, Debug)]
pub struct VqeArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 1e-3)]
    pub vqe_gamma: f64,
    #[arg(long, default_value_t = 3)]
    pub layers: usize,
    /// Finite-difference step Δθ.
    #[arg(long, default_value_t = 1e-4)]
    pub delta_theta: f64,
    /// Central instead of forward differences.
    #[arg(long)]
    pub central: bool,
    /// VQE iterations; defaults to --max-iters.
    #[arg(long)]
    pub vqe_iters: Option<usize>,
}

#[derive(Args, Debug)]
pub struct NoiseArgs {
    pub input: PathBuf,
    #[command(flatten)]
    pub noise: NoiseFlags,
    #[arg(long, default_value_t = 100)]
    pub seeds: u64,
    /// Per-seed verdicts as CSV.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct JwArgs {
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = PauliFormat::Text)]
    pub format: PauliFormat,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Circuit,
    Direct,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Circuit => Mode::Circuit,
            ModeArg::Direct => Mode::Direct,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderingArg {
    Physicist,
    Chemist,
}

impl From<OrderingArg> for TwoBodyOrdering {
    fn from(o: OrderingArg) -> TwoBodyOrdering {
        match o {
            OrderingArg::Physicist => TwoBodyOrdering::Physicist,
            OrderingArg::Chemist => TwoBodyOrdering::Chemist,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignArg {
    /// Denominators E_n − E_m.
    Standard,
    /// Flipped denominators E_m − E_n.
    Flipped,
}

impl From<SignArg> for SignConvention {
    fn from(s: SignArg) -> SignConvention {
        match s {
            SignArg::Standard => SignConvention::Standard,
            SignArg::Flipped => SignConvention::Flipped,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMethod {
    Fqe,
    Perturb,
    Exact,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliFormat {
    Text,
    Json,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<fqe_core::Error>() {
            return if e.is_input_error() { EXIT_INPUT } else { EXIT_INTERNAL };
        }
    }
    EXIT_INPUT
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_INPUT) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
