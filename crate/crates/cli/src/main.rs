//! `tcforge`: batch front end for gate synthesis, circuit simulation and the
//! verification suites.
//!
//! Exit codes: 0 pass, 1 usage or input error, 2 verification failure.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

#[derive(Parser)]
#[command(name = "tcforge", version, about = "Tavis–Cummings gate synthesis and sector simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a two-qubit gate (named, or a phase triple φ₀₀,φ₊,φ₁₁).
    Synthesize(SynthesizeArgs),
    /// Run a circuit file on a state, or emit its per-sector blocks.
    Simulate(SimulateArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// List the charge sectors with q ≤ q_max.
    Sectors(SectorsArgs),
    /// Interaction-time table for the named gates.
    Report(ReportArgs),
}

#[derive(Args)]
pub struct SynthesizeArgs {
    /// cz, swap, iswap, sqrt_iswap, uzz, upsiplus.
    #[arg(long, conflicts_with = "phases", required_unless_present = "phases")]
    pub gate: Option<String>,
    /// Angle for parametrized gates (uzz: exp(−iφ Z⊗Z)).
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Comma-separated φ₀₀,φ₊,φ₁₁ (singlet phase 0).
    #[arg(long, allow_hyphen_values = true)]
    pub phases: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Also write the bare circuit JSON (loadable by `simulate`).
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Circuit JSON file.
    pub circuit: PathBuf,
    /// Qubit bitstring (qubit 0 first), psi+, psi-, ghz, or comma-separated
    /// real amplitudes over the computational basis. Defaults to all zeros.
    #[arg(long, conflicts_with = "unitary", allow_hyphen_values = true)]
    pub state: Option<String>,
    /// Initial Fock number of the oscillator.
    #[arg(long, default_value_t = 0, conflicts_with = "unitary")]
    pub k: u32,
    /// Emit per-sector blocks instead of evolving a state.
    #[arg(long)]
    pub unitary: bool,
    /// Charge cutoff for `--unitary` (default n).
    #[arg(long)]
    pub qmax: Option<u32>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Suite {
    Accidental,
    Lie,
    Phases,
    Realizability,
    Schwinger,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Qubit count (schwinger: largest 2j, up to 12).
    #[arg(long, default_value_t = 4)]
    pub n: u32,
    /// Charge cutoff (schwinger: largest Fock number).
    #[arg(long, default_value_t = 12)]
    pub qmax: u32,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Allow n > 6 or q_max > 12.
    #[arg(long)]
    pub override_scale: bool,
    /// Random circuits for the realizability suite.
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args)]
pub struct SectorsArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub qmax: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args)]
pub struct ReportArgs {
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Outcome of a command that ran to completion.
pub enum Status {
    Pass,
    Fail,
}

/// Errors that abort a command before it can report (exit 1).
#[derive(Debug)]
pub struct UsageError(pub String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

fn init_threads() -> Result<(), UsageError> {
    let Ok(v) = std::env::var("TCFORGE_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| UsageError(format!("TCFORGE_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => e.exit(),
    };
    let run = || -> Result<Status, UsageError> {
        init_threads()?;
        match cli.command {
            Command::Synthesize(a) => commands::synthesize(&a),
            Command::Simulate(a) => commands::simulate(&a),
            Command::Verify(a) => commands::verify(&a),
            Command::Sectors(a) => commands::sectors(&a),
            Command::Report(a) => commands::report(&a),
        }
    };
    match run() {
        Ok(Status::Pass) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(2),
        Err(UsageError(msg)) => {
            eprintln!("tcforge: {msg}");
            ExitCode::from(1)
        }
    }
}
