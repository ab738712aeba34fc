//! Eigen-energy spectroscopy from an ancilla-controlled time-evolution
//! circuit.
//!
//! The circuit measures a single ancilla and yields
//! `Q(t) = P1 − P0 = ⟨ψ_ref|cos(Ht)|ψ_ref⟩ = Σ_i |c_i|² cos(E_i t)`.
//! Sampling `Q` on a uniform grid and taking a DFT recovers each `|E_i|` to
//! within one frequency bin `δ = 2π/T_max`, with the peak height
//! approximating the overlap `|c_i|²`. Signs come from repeating the run on
//! `H + s0·I` and watching which way each peak moves.
//!
//! Pipeline: [`hamiltonian`] → [`sampling::make_plan`] →
//! [`sampling::acquire_signal`] (via [`sim`]) → [`spectral::transform`] →
//! [`spectral::detect_peaks`] → [`sign::resolve_signs`], with [`oracle`] as
//! the dense-diagonalization reference.

pub mod bits;
pub mod error;
pub mod hamiltonian;
pub mod oracle;
pub mod sampling;
pub mod sign;
pub mod sim;
pub mod spectral;
pub mod state;

pub use bits::BitString;
pub use error::{Error, Result};
pub use hamiltonian::{parse_hamiltonian, Hamiltonian, PauliAxis, PauliTerm, MAX_DENSE_QUBITS};
pub use oracle::{
    analytic_signal, diagonalize, overlaps, EigenDecomposition, OverlapEntry, OverlapTable,
};
pub use sampling::{
    acquire_signal, acquire_signal_with, acquire_with, estimate_energy_bound, make_plan,
    AcquireOptions, EnergyBound, Route, SamplingMode, SamplingPlan, Signal,
};
pub use sign::{
    assume_negative, default_offset, pair_shifts, resolve_signs, ShiftSign, SignPair,
    SignResolution,
};
pub use sim::{
    direct_expectation_point, run_circuit_point, shot_sample, CircuitPointResult, CircuitTrace,
    Simulator,
};
pub use spectral::{
    detect_peaks, recover_report, transform, EigenEstimate, Peaks, RecoveryReport, Sign, Spectrum,
};
pub use state::{prepare_reference, ReferenceSpec, StateVector};
