//! `qcos`: plan, sample, analyze and sign-resolve eigen-energy spectra of
//! Pauli-string Hamiltonians.

mod args;
mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use args::{AcquireArgs, PeakArgs, PlanArgs, ProblemArgs};
use commands::{RunArgs, SignMethod};

#[derive(Parser)]
#[command(
    name = "qcos",
    version,
    about = "Eigen-energies from ancilla-controlled time evolution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Choose Δ and N for a target resolution.
    Plan {
        #[command(flatten)]
        plan: PlanArgs,
        /// Hamiltonian for the energy bound (not needed with --bound).
        #[arg(long, value_name = "PATH")]
        hamiltonian: Option<PathBuf>,
        #[arg(long = "ref", value_name = "SPEC", requires = "hamiltonian")]
        reference: Option<String>,
        /// Directory for plan.json; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full pipeline: sample, transform, detect peaks, resolve signs, report.
    Run {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        plan: PlanArgs,
        #[command(flatten)]
        acquire: AcquireArgs,
        #[command(flatten)]
        peaks: PeakArgs,
        /// Energy offset s0 for sign resolution; defaults to max(4δ, 0.05).
        #[arg(long)]
        offset: Option<f64>,
        /// Skip sign resolution; estimates carry |E| only.
        #[arg(long, conflicts_with_all = ["assume_negative", "offset"])]
        no_sign: bool,
        /// Take every eigenvalue as negative instead of running the shifted pass.
        #[arg(long, conflicts_with = "offset")]
        assume_negative: bool,
        /// Compare against dense diagonalization; exit code 1 if any energy is missed.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Acquire the signal only.
    Sample {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        plan: PlanArgs,
        #[command(flatten)]
        acquire: AcquireArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Transform and peak-detect an existing signal CSV.
    Analyze {
        /// Signal CSV with columns n,t,q.
        signal: PathBuf,
        #[command(flatten)]
        peaks: PeakArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Resolve eigenvalue signs from the shift under H + s0·I.
    ResolveSign {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        plan: PlanArgs,
        #[command(flatten)]
        acquire: AcquireArgs,
        #[command(flatten)]
        peaks: PeakArgs,
        #[arg(long)]
        offset: Option<f64>,
        /// Directory for resolution.json; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dense eigenvalues and reference overlaps.
    Oracle {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Directory for oracle.json; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn dispatch(command: Command) -> anyhow::Result<bool> {
    match command {
        Command::Plan {
            plan,
            hamiltonian,
            reference,
            out,
        } => {
            let problem = hamiltonian.map(|hamiltonian| ProblemArgs {
                hamiltonian,
                reference,
            });
            commands::plan(&plan, problem.as_ref(), out.as_deref())?;
        }
        Command::Run {
            problem,
            plan,
            acquire,
            peaks,
            offset,
            no_sign,
            assume_negative,
            oracle,
            out,
        } => {
            let sign = if no_sign {
                SignMethod::None
            } else if assume_negative {
                SignMethod::AssumeNegative
            } else {
                SignMethod::Shift
            };
            return commands::run(RunArgs {
                problem: &problem,
                plan: &plan,
                acquire: &acquire,
                peaks: &peaks,
                offset,
                sign,
                oracle,
                out: &out,
            });
        }
        Command::Sample {
            problem,
            plan,
            acquire,
            out,
        } => commands::sample(&problem, &plan, &acquire, &out)?,
        Command::Analyze { signal, peaks, out } => commands::analyze(&signal, &peaks, &out)?,
        Command::ResolveSign {
            problem,
            plan,
            acquire,
            peaks,
            offset,
            out,
        } => commands::resolve_sign(&problem, &plan, &acquire, &peaks, offset, out.as_deref())?,
        Command::Oracle { problem, out } => commands::oracle(&problem, out.as_deref())?,
    }
    Ok(true)
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("oracle comparison: some energies were not recovered within δ");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
