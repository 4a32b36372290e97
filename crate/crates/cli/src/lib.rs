//! Library behind the `pptm` binary.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub mod commands;
pub mod qmx;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Check(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<ppt_metrology::Error> for CliError {
    fn from(e: ppt_metrology::Error) -> Self {
        use ppt_metrology::Error as E;
        match e {
            E::UnsupportedDimension { .. } | E::OutOfRange { .. } | E::InvalidSubsystems(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Check(e.to_string()),
        }
    }
}

impl From<qmx::QmxError> for CliError {
    fn from(e: qmx::QmxError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "pptm",
    version,
    about = "PPT bound-entangled states for quantum metrology"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Construct a state and write it as a QMX file.
    Gen(GenArgs),
    /// Quantum Fisher information, gain and noise robustness of a state.
    Qfi(QfiArgs),
    /// CSV data for the QFI-versus-d and QFI-versus-noise curves.
    Sweep(SweepArgs),
    /// Run the numerical verification suite.
    Verify(VerifyArgs),
    /// Maximise the QFI over PPT states by see-saw ascent.
    Optimize(OptimizeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    F1,
    F2,
    #[value(name = "4x4")]
    FourByFour,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitaryArg {
    Fourier,
    Hadamard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    /// A B A' B'
    Abab,
    /// A A' B B'
    Aabb,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Shield dimension; the 4x4 state only exists for d = 2.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, value_enum, default_value = "fourier")]
    pub unitary: UnitaryArg,
    /// Rotation angle of the d = 3 second-family construction.
    #[arg(long, allow_negative_numbers = true)]
    pub phi0: Option<f64>,
    #[arg(long, value_enum)]
    pub order: Option<OrderArg>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct QfiArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// `auto` or a QMX file with the same dims and order as the state.
    #[arg(long, default_value = "auto")]
    pub ham: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigArg {
    #[value(name = "1")]
    One,
    #[value(name = "3")]
    Three,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub fig: FigArg,
    /// Largest d of the QFI-versus-d curve.
    #[arg(long)]
    pub dmax: Option<usize>,
    /// Dimension of the noise curve.
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of intervals on the noise axis `p ∈ [0, 1]`.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyFamilyArg {
    F1,
    F2,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long, value_enum, default_value = "all")]
    pub family: VerifyFamilyArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Perturb the trace of the first state before checking it.
    #[arg(long, hide = true)]
    pub corrupt: bool,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub d: usize,
    /// `f2`, `mixed` or a QMX file.
    #[arg(long, default_value = "mixed")]
    pub init: String,
    #[arg(long, default_value_t = 200)]
    pub iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where to write the final state.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` and runs the command, writing the report to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            write!(out, "{e}")?;
            return Ok(());
        }
        Err(e) => {
            let msg = e.to_string();
            let msg = msg.strip_prefix("error: ").unwrap_or(&msg);
            return Err(CliError::Usage(msg.to_string()));
        }
    };
    match cli.command {
        Command::Gen(a) => commands::gen(&a, out),
        Command::Qfi(a) => commands::qfi(&a, out),
        Command::Sweep(a) => commands::sweep(&a, out),
        Command::Verify(a) => commands::verify(&a, out),
        Command::Optimize(a) => commands::optimize(&a, out),
    }
}

/// Runs with the process arguments and maps the outcome to the exit-code contract.
pub fn main_with_args(args: impl IntoIterator<Item = OsString>) -> ExitCode {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(args, &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {}", e.to_string().trim_end());
            ExitCode::from(e.exit_code())
        }
    }
}
