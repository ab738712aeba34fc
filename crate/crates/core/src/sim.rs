//! Statevector execution of the ancilla-controlled time-evolution circuit.
//!
//! Register layout: the ancilla is the most significant qubit of an
//! `(n + 1)`-qubit state, so amplitudes `[0, 2^n)` form the ancilla-|0⟩ block
//! and `[2^n, 2^(n+1))` the ancilla-|1⟩ block. The circuit is
//!
//! ```text
//! anc: |0⟩ ─H─S─H─●────────────○────────────H─S─H─ measure
//! tgt: |ψ⟩ ───────e^{+iHt/2}──e^{-iHt/2}────────── (controlled on |1⟩ / |0⟩)
//! ```
//!
//! and leaves `|0⟩⊗sin(Ht/2)|ψ⟩ + |1⟩⊗cos(Ht/2)|ψ⟩`, so that
//! `P1 − P0 = ⟨ψ|cos(Ht)|ψ⟩`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::oracle::{diagonalize, EigenDecomposition};
use crate::state::{prepare_reference, ReferenceSpec, StateVector};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Single-qubit gate as a row-major 2×2 matrix.
pub type Gate = [[Complex64; 2]; 2];

/// Hadamard, (√2/2)·[[1, 1], [1, −1]].
pub const HADAMARD: Gate = [
    [
        Complex64::new(FRAC_1_SQRT_2, 0.0),
        Complex64::new(FRAC_1_SQRT_2, 0.0),
    ],
    [
        Complex64::new(FRAC_1_SQRT_2, 0.0),
        Complex64::new(-FRAC_1_SQRT_2, 0.0),
    ],
];

/// Phase gate, [[1, 0], [0, i]].
pub const PHASE_S: Gate = [
    [Complex64::new(1.0, 0.0), ZERO],
    [ZERO, Complex64::new(0.0, 1.0)],
];

/// Exact `e^{−iHτ}` built from a cached eigendecomposition.
#[derive(Debug, Clone)]
pub struct Propagator {
    energies: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl Propagator {
    pub fn new(h: &Hamiltonian) -> Result<Self> {
        Ok(Self::from_decomposition(&diagonalize(h)?))
    }

    pub fn from_decomposition(d: &EigenDecomposition) -> Self {
        Self {
            energies: d.energies().to_vec(),
            vectors: d.vectors().clone(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.energies.len()
    }

    /// Writes `V·exp(−iΛτ)·V†·psi` into `out`.
    pub fn evolve_into(&self, psi: &[Complex64], tau: f64, out: &mut [Complex64]) {
        let dim = self.dimension();
        debug_assert_eq!(psi.len(), dim);
        debug_assert_eq!(out.len(), dim);
        out.fill(ZERO);
        for (j, &energy) in self.energies.iter().enumerate() {
            let column = self.vectors.column(j);
            let column = column.as_slice();
            let c: Complex64 = column.iter().zip(psi).map(|(v, p)| v.conj() * p).sum();
            let c = c * Complex64::from_polar(1.0, -energy * tau);
            for (o, v) in out.iter_mut().zip(column) {
                *o += v * c;
            }
        }
    }

    /// `e^{−iHτ}·psi`.
    pub fn evolve(&self, psi: &[Complex64], tau: f64) -> Vec<Complex64> {
        let mut out = vec![ZERO; psi.len()];
        self.evolve_into(psi, tau, &mut out);
        out
    }
}

/// Applies `gate` to the most significant qubit of `state`.
fn apply_to_ancilla(state: &mut [Complex64], gate: &Gate) {
    let half = state.len() / 2;
    let (zero, one) = state.split_at_mut(half);
    for (a, b) in zero.iter_mut().zip(one.iter_mut()) {
        let (x, y) = (*a, *b);
        *a = gate[0][0] * x + gate[0][1] * y;
        *b = gate[1][0] * x + gate[1][1] * y;
    }
}

/// H′ → S → H′ on the ancilla.
fn ancilla_sandwich(state: &mut [Complex64]) {
    apply_to_ancilla(state, &HADAMARD);
    apply_to_ancilla(state, &PHASE_S);
    apply_to_ancilla(state, &HADAMARD);
}

/// Joint states at each stage of one circuit execution.
#[derive(Debug, Clone)]
pub struct CircuitTrace {
    /// `|0⟩⊗|ψ_ref⟩` after reference preparation.
    pub prepared: Vec<Complex64>,
    /// After the first ancilla sandwich.
    pub first_sandwich: Vec<Complex64>,
    /// After the controlled evolution pair.
    pub controlled: Vec<Complex64>,
    /// Circuit output, before measurement.
    pub output: Vec<Complex64>,
}

/// Ancilla measurement statistics at one evolution time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitPointResult {
    pub t: f64,
    pub p0: f64,
    pub p1: f64,
    /// `p1 − p0`.
    pub q: f64,
    pub shots_used: Option<u64>,
}

/// Circuit simulator bound to one Hamiltonian. Diagonalizes once; every time
/// point afterwards costs O(4^n).
#[derive(Debug, Clone)]
pub struct Simulator {
    n_qubits: usize,
    propagator: Propagator,
}

impl Simulator {
    pub fn new(h: &Hamiltonian) -> Result<Self> {
        Ok(Self {
            n_qubits: h.n_qubits(),
            propagator: Propagator::new(h)?,
        })
    }

    pub fn from_decomposition(n_qubits: usize, d: &EigenDecomposition) -> Self {
        Self {
            n_qubits,
            propagator: Propagator::from_decomposition(d),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn propagator(&self) -> &Propagator {
        &self.propagator
    }

    pub fn prepare(&self, spec: &ReferenceSpec) -> Result<StateVector> {
        prepare_reference(spec, self.n_qubits)
    }

    fn check(&self, reference: &StateVector, t: f64) -> Result<()> {
        if !t.is_finite() {
            return Err(Error::NonFiniteTime(t));
        }
        if reference.dimension() != self.propagator.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.propagator.dimension(),
                got: reference.dimension(),
            });
        }
        Ok(())
    }

    /// Runs the full circuit at time `t`, keeping every intermediate state.
    pub fn trace(&self, reference: &StateVector, t: f64) -> Result<CircuitTrace> {
        self.check(reference, t)?;
        let dim = reference.dimension();
        let mut state = vec![ZERO; 2 * dim];
        state[..dim].copy_from_slice(reference.amplitudes());
        let prepared = state.clone();

        ancilla_sandwich(&mut state);
        let first_sandwich = state.clone();

        // ancilla |0⟩ → e^{−iHt/2}, ancilla |1⟩ → e^{+iHt/2}
        let mut controlled = vec![ZERO; 2 * dim];
        let (c0, c1) = controlled.split_at_mut(dim);
        self.propagator.evolve_into(&state[..dim], t / 2.0, c0);
        self.propagator.evolve_into(&state[dim..], -t / 2.0, c1);

        let mut output = controlled.clone();
        ancilla_sandwich(&mut output);

        Ok(CircuitTrace {
            prepared,
            first_sandwich,
            controlled,
            output,
        })
    }

    /// Exact ancilla probabilities at time `t`.
    pub fn circuit_point(&self, reference: &StateVector, t: f64) -> Result<CircuitPointResult> {
        let output = self.trace(reference, t)?.output;
        let dim = reference.dimension();
        let p0: f64 = output[..dim].iter().map(Complex64::norm_sqr).sum();
        let p1: f64 = output[dim..].iter().map(Complex64::norm_sqr).sum();
        Ok(CircuitPointResult {
            t,
            p0,
            p1,
            q: p1 - p0,
            shots_used: None,
        })
    }

    /// `Re⟨ψ|e^{−iHt}|ψ⟩` on the target register alone.
    pub fn direct_point(&self, reference: &StateVector, t: f64) -> Result<f64> {
        self.check(reference, t)?;
        let evolved = self.propagator.evolve(reference.amplitudes(), t);
        Ok(reference.inner(&evolved).re)
    }
}

/// One-shot convenience: simulate the circuit for `h` and `spec` at `t`.
pub fn run_circuit_point(
    h: &Hamiltonian,
    spec: &ReferenceSpec,
    t: f64,
) -> Result<CircuitPointResult> {
    if !t.is_finite() {
        return Err(Error::NonFiniteTime(t));
    }
    let sim = Simulator::new(h)?;
    let reference = sim.prepare(spec)?;
    sim.circuit_point(&reference, t)
}

/// One-shot convenience for the ancilla-free expectation value.
pub fn direct_expectation_point(h: &Hamiltonian, spec: &ReferenceSpec, t: f64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::NonFiniteTime(t));
    }
    let sim = Simulator::new(h)?;
    let reference = sim.prepare(spec)?;
    sim.direct_point(&reference, t)
}

/// Replaces exact probabilities with the frequencies of `shots` ancilla
/// measurements drawn from `rng`.
pub fn shot_sample_with<R: Rng + ?Sized>(
    exact: &CircuitPointResult,
    shots: u64,
    rng: &mut R,
) -> CircuitPointResult {
    assert!(shots >= 1, "shot count must be positive");
    let p = exact.p1.clamp(0.0, 1.0);
    let successes = Binomial::new(shots, p)
        .expect("p is clamped to [0, 1]")
        .sample(rng);
    let p1 = successes as f64 / shots as f64;
    CircuitPointResult {
        t: exact.t,
        p0: 1.0 - p1,
        p1,
        q: 2.0 * p1 - 1.0,
        shots_used: Some(shots),
    }
}

/// Seeded finite-shot estimate of `exact`.
pub fn shot_sample(exact: &CircuitPointResult, shots: u64, rng_seed: u64) -> CircuitPointResult {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    shot_sample_with(exact, shots, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::parse_hamiltonian;
    use crate::oracle::{analytic_signal, overlaps};
    use std::f64::consts::PI;

    fn h(s: &str) -> Hamiltonian {
        parse_hamiltonian(s).unwrap()
    }

    #[test]
    fn time_zero_is_all_ones() {
        let r = run_circuit_point(&h("0.3 X0 Z1\n-0.2 Y1"), &"01".parse().unwrap(), 0.0).unwrap();
        assert!(r.p0.abs() < 1e-15);
        assert!((r.p1 - 1.0).abs() < 1e-15);
        assert!((r.q - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigenstate_reference_gives_cosine() {
        let r = run_circuit_point(&h("0.5 Z0"), &"0".parse().unwrap(), PI).unwrap();
        assert!(r.q.abs() < 1e-12);
        let d = direct_expectation_point(&h("1.0 X0"), &"0".parse().unwrap(), PI / 2.0).unwrap();
        assert!(d.abs() < 1e-12);
    }

    #[test]
    fn matches_oracle_on_two_level_fixture() {
        let ham = h("0.2\n1.0 Z0\n0.5 X0");
        let spec = "0".parse().unwrap();
        let r = run_circuit_point(&ham, &spec, 1.0).unwrap();
        let d = diagonalize(&ham).unwrap();
        let table = overlaps(&d, &prepare_reference(&spec, 1).unwrap()).unwrap();
        assert!((r.q - analytic_signal(&table, 1.0)).abs() < 1e-12);
    }

    #[test]
    fn sandwich_produces_first_stage_state() {
        let sim = Simulator::new(&h("1.0 Z0")).unwrap();
        let reference = sim.prepare(&"1".parse().unwrap()).unwrap();
        let tr = sim.trace(&reference, 0.7).unwrap();
        let a = Complex64::new(0.5, 0.5);
        let b = Complex64::new(0.5, -0.5);
        assert!((tr.first_sandwich[1] - a).norm() < 1e-15);
        assert!((tr.first_sandwich[3] - b).norm() < 1e-15);
        assert!(tr.first_sandwich[0].norm() < 1e-15 && tr.first_sandwich[2].norm() < 1e-15);
    }

    #[test]
    fn propagator_matches_taylor_series() {
        // independent route: small-step Taylor expansion of e^{-iHτ} using the
        // matrix-free Pauli action
        let ham = h("0.4 X0 Y1\n-0.9 Z0\n0.3 Y0 Y1\n0.25 X1\n0.1");
        let prop = Propagator::new(&ham).unwrap();
        let psi: Vec<Complex64> = (0..4)
            .map(|k| Complex64::new(0.5, 0.1 * k as f64))
            .collect();
        let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let psi: Vec<Complex64> = psi.iter().map(|a| a / norm).collect();
        let tau = 3.7;
        let steps = 400;
        let dt = tau / steps as f64;
        let mut phi = psi.clone();
        for _ in 0..steps {
            let mut term = phi.clone();
            let mut acc = phi.clone();
            for k in 1..20 {
                let hp = ham.apply(&term).unwrap();
                term = hp
                    .iter()
                    .map(|x| x * Complex64::new(0.0, -dt) / k as f64)
                    .collect();
                acc.iter_mut().zip(&term).for_each(|(a, t)| *a += t);
            }
            phi = acc;
        }
        let exact = prop.evolve(&psi, tau);
        for (a, b) in exact.iter().zip(&phi) {
            assert!((a - b).norm() < 1e-11, "{a} vs {b}");
        }
    }

    #[test]
    fn rejects_non_finite_time() {
        assert!(matches!(
            run_circuit_point(&h("1.0 Z0"), &"0".parse().unwrap(), f64::NAN),
            Err(Error::NonFiniteTime(_))
        ));
    }

    #[test]
    fn degenerate_shots() {
        let certain = CircuitPointResult {
            t: 0.0,
            p0: 0.0,
            p1: 1.0,
            q: 1.0,
            shots_used: None,
        };
        assert_eq!(shot_sample(&certain, 17, 3).q, 1.0);
        let never = CircuitPointResult {
            p0: 1.0,
            p1: 0.0,
            q: -1.0,
            ..certain
        };
        assert_eq!(shot_sample(&never, 17, 3).q, -1.0);
    }

    #[test]
    fn shots_are_seed_deterministic() {
        let half = CircuitPointResult {
            t: 0.0,
            p0: 0.5,
            p1: 0.5,
            q: 0.0,
            shots_used: None,
        };
        assert_eq!(shot_sample(&half, 1000, 9), shot_sample(&half, 1000, 9));
        assert_eq!(shot_sample(&half, 1000, 9).shots_used, Some(1000));
    }
}
