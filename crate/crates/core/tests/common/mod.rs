#![allow(dead_code)]

use num_complex::Complex64;
use qcos_core::{BitString, Hamiltonian, PauliAxis, PauliTerm};
use rand::Rng;

pub const FIXTURE: &str = "0.2\n1.0 Z0\n0.5 X0\n";

pub fn fixture() -> Hamiltonian {
    qcos_core::parse_hamiltonian(FIXTURE).unwrap()
}

/// Each term picks I/X/Y/Z independently per qubit; coefficients in [−2, 2).
pub fn random_hamiltonian<R: Rng>(rng: &mut R, n_qubits: usize, n_terms: usize) -> Hamiltonian {
    let axes = [
        None,
        Some(PauliAxis::X),
        Some(PauliAxis::Y),
        Some(PauliAxis::Z),
    ];
    let terms: Vec<PauliTerm> = (0..n_terms)
        .map(|_| {
            let factors: Vec<(usize, PauliAxis)> = (0..n_qubits)
                .filter_map(|q| axes[rng.random_range(0..4)].map(|a| (q, a)))
                .collect();
            PauliTerm::new(rng.random_range(-2.0..2.0), factors).unwrap()
        })
        .collect();
    Hamiltonian::new(n_qubits, terms).unwrap()
}

pub fn random_bits<R: Rng>(rng: &mut R, n_qubits: usize) -> BitString {
    BitString::new((0..n_qubits).map(|_| rng.random_bool(0.5)).collect())
}

/// `e^{−iHτ}ψ` by Taylor steps on the matrix-free action of `h`.
pub fn taylor_evolve(h: &Hamiltonian, psi: &[Complex64], tau: f64) -> Vec<Complex64> {
    let norm = h.l1_norm_bound().max(1e-12);
    let steps = ((norm * tau.abs()) / 0.5).ceil().max(1.0) as usize;
    let dt = tau / steps as f64;
    let mut state = psi.to_vec();
    for _ in 0..steps {
        let mut term = state.clone();
        let mut sum = state.clone();
        for k in 1..40 {
            let applied = h.apply(&term).unwrap();
            let factor = Complex64::new(0.0, -dt / k as f64);
            term = applied.into_iter().map(|a| a * factor).collect();
            for (s, t) in sum.iter_mut().zip(&term) {
                *s += t;
            }
            if term.iter().map(|t| t.norm_sqr()).sum::<f64>() < 1e-40 {
                break;
            }
        }
        state = sum;
    }
    state
}

/// `max_i |a_i − e^{iφ} b_i|` with `φ` chosen to align the two states.
pub fn phase_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let overlap: Complex64 = b.iter().zip(a).map(|(x, y)| x.conj() * y).sum();
    let phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - phase * y).norm())
        .fold(0.0, f64::max)
}

/// Direct O(N²) one-sided cosine coefficients.
pub fn direct_dft(values: &[f64]) -> (f64, Vec<f64>) {
    let n = values.len();
    let re = |k: usize| -> f64 {
        values
            .iter()
            .enumerate()
            .map(|(j, v)| v * (std::f64::consts::TAU * ((j * k) % n) as f64 / n as f64).cos())
            .sum::<f64>()
    };
    let a0 = re(0) / n as f64;
    let coeffs = (1..=(n - 1) / 2).map(|k| 2.0 * re(k) / n as f64).collect();
    (a0, coeffs)
}

pub fn seeded(seed: u64) -> rand_chacha::ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Hamiltonians on 1..=`max_qubits` qubits with 1..=`max_terms` terms.
pub fn hamiltonian_strategy(
    max_qubits: usize,
    max_terms: usize,
) -> impl proptest::strategy::Strategy<Value = Hamiltonian> {
    use proptest::prelude::*;
    (1..=max_qubits).prop_flat_map(move |n| {
        let term = (-2.0f64..2.0, proptest::collection::vec(0u8..4, n));
        proptest::collection::vec(term, 1..=max_terms).prop_map(move |terms| {
            let terms = terms.into_iter().map(|(c, axes)| {
                let factors = axes.into_iter().enumerate().filter_map(|(q, a)| match a {
                    1 => Some((q, PauliAxis::X)),
                    2 => Some((q, PauliAxis::Y)),
                    3 => Some((q, PauliAxis::Z)),
                    _ => None,
                });
                PauliTerm::new(c, factors).unwrap()
            });
            Hamiltonian::new(n, terms).unwrap()
        })
    })
}

/// A Hamiltonian together with a random normalized dense reference.
pub fn with_reference(
    max_qubits: usize,
    max_terms: usize,
) -> impl proptest::strategy::Strategy<Value = (Hamiltonian, qcos_core::StateVector)> {
    use proptest::prelude::*;
    hamiltonian_strategy(max_qubits, max_terms).prop_flat_map(|h| {
        let dim = h.dimension();
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
            .prop_filter("non-zero reference", |v| {
                v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3)
            })
            .prop_map(move |v| {
                let amps = v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
                (
                    h.clone(),
                    qcos_core::StateVector::normalized(h.n_qubits(), amps).unwrap(),
                )
            })
    })
}
