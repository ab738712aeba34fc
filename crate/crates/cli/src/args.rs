use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use qcos_core::{
    parse_hamiltonian, BitString, Hamiltonian, ReferenceSpec, Route, SamplingMode, MAX_DENSE_QUBITS,
};

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Hamiltonian file, one Pauli term per line.
    #[arg(long, value_name = "PATH")]
    pub hamiltonian: PathBuf,

    /// Reference state: a bitstring, `bits:amp,...`, or `@file`. Defaults to all zeros.
    #[arg(long = "ref", value_name = "SPEC")]
    pub reference: Option<String>,
}

pub struct Problem {
    pub hamiltonian: Hamiltonian,
    pub reference: ReferenceSpec,
}

impl ProblemArgs {
    pub fn load(&self) -> Result<Problem> {
        let text = std::fs::read_to_string(&self.hamiltonian)
            .with_context(|| format!("reading {}", self.hamiltonian.display()))?;
        let hamiltonian = parse_hamiltonian(&text)
            .with_context(|| format!("parsing {}", self.hamiltonian.display()))?;
        if hamiltonian.n_qubits() > MAX_DENSE_QUBITS {
            bail!(
                "{} qubits exceeds the simulator limit of {MAX_DENSE_QUBITS}",
                hamiltonian.n_qubits()
            );
        }
        let reference = match &self.reference {
            None => ReferenceSpec::Basis(BitString::zeros(hamiltonian.n_qubits())),
            Some(spec) => parse_reference(spec)?,
        };
        Ok(Problem {
            hamiltonian,
            reference,
        })
    }
}

pub fn parse_reference(spec: &str) -> Result<ReferenceSpec> {
    match spec.strip_prefix('@') {
        Some(path) => {
            let text = std::fs::read_to_string(Path::new(path))
                .with_context(|| format!("reading reference file {path}"))?;
            ReferenceSpec::parse_weighted(&text)
                .with_context(|| format!("parsing reference file {path}"))
        }
        None => spec
            .parse()
            .with_context(|| format!("parsing reference {spec:?}")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct PlanArgs {
    /// Target energy resolution δ = 2π/t_max.
    #[arg(long, value_name = "FLOAT")]
    pub delta: f64,

    /// Sampling interval Δ; defaults to the Nyquist limit.
    #[arg(long, value_name = "FLOAT")]
    pub interval: Option<f64>,

    /// Energy bound used for the Nyquist limit; defaults to the ℓ1 norm.
    #[arg(long, value_name = "FLOAT")]
    pub bound: Option<f64>,

    /// Use |⟨ref|H|ref⟩| as the energy bound. May undershoot and alias.
    #[arg(long, conflicts_with = "bound")]
    pub heuristic_bound: bool,

    /// Measurement shots per time point; exact probabilities when omitted.
    #[arg(long, value_name = "INT")]
    pub shots: Option<u64>,

    #[arg(long, default_value = "mirror", value_name = "mirror|full")]
    pub mode: SamplingMode,
}

#[derive(Debug, Clone, Args)]
pub struct AcquireArgs {
    /// Seed for shot sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Evaluate the full ancilla circuit or the expectation value directly.
    #[arg(long, default_value = "circuit", value_name = "circuit|direct")]
    pub route: Route,
}

#[derive(Debug, Clone, Args)]
pub struct PeakArgs {
    /// Minimum coefficient a_k for a peak.
    #[arg(long, default_value_t = qcos_core::spectral::DEFAULT_THRESHOLD)]
    pub threshold: f64,
}
