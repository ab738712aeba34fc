//! Dense-diagonalization ground truth.
//!
//! Every simulated signal and recovered spectrum is checked against the full
//! eigendecomposition of the dense Hamiltonian: energies `E_i`, reference
//! overlaps `|c_i|² = |⟨Ψ_i|ψ_ref⟩|²`, and the closed-form signal
//! `Q(t) = Σ_i |c_i|² cos(E_i t)`.

use nalgebra::linalg::SymmetricEigen;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::state::StateVector;

/// Sweep cap for the Hermitian QR iteration, per matrix dimension.
const SWEEPS_PER_DIM: usize = 1000;

/// Ascending energies with the matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    energies: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl EigenDecomposition {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn vectors(&self) -> &DMatrix<Complex64> {
        &self.vectors
    }

    pub fn dimension(&self) -> usize {
        self.energies.len()
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    /// max_i |E_i|.
    pub fn spectral_radius(&self) -> f64 {
        self.energies.iter().fold(0.0, |m, e| m.max(e.abs()))
    }

    /// V·diag(E)·V†.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let diag = DVector::from_iterator(
            self.energies.len(),
            self.energies.iter().map(|&e| Complex64::new(e, 0.0)),
        );
        &self.vectors * DMatrix::from_diagonal(&diag) * self.vectors.adjoint()
    }
}

/// Full spectrum of the dense Hermitian matrix of `h`.
pub fn diagonalize(h: &Hamiltonian) -> Result<EigenDecomposition> {
    let m = h.dense_matrix()?;
    let dim = m.nrows();
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, SWEEPS_PER_DIM * dim)
        .ok_or(Error::NoConvergence)?;

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(dim, dim, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(EigenDecomposition { energies, vectors })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapEntry {
    pub energy: f64,
    pub weight: f64,
}

/// `(E_i, |c_i|²)` for every eigenvector, zero weights included, ascending
/// in energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapTable {
    pub entries: Vec<OverlapEntry>,
}

impl OverlapTable {
    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.weight).sum()
    }

    /// Merges entries whose energies differ by at most `tolerance`, summing
    /// weights. Within a degenerate subspace only the summed weight is
    /// basis-independent.
    pub fn grouped(&self, tolerance: f64) -> OverlapTable {
        let mut out: Vec<OverlapEntry> = Vec::new();
        for e in &self.entries {
            match out.last_mut() {
                Some(last) if (e.energy - last.energy).abs() <= tolerance => {
                    let w = last.weight + e.weight;
                    if w > 0.0 {
                        last.energy = (last.energy * last.weight + e.energy * e.weight) / w;
                    }
                    last.weight = w;
                }
                _ => out.push(*e),
            }
        }
        OverlapTable { entries: out }
    }

    /// Entries with weight ≥ `threshold`.
    pub fn significant(&self, threshold: f64) -> Vec<OverlapEntry> {
        self.entries
            .iter()
            .copied()
            .filter(|e| e.weight >= threshold)
            .collect()
    }

    /// Largest |E_i| carrying weight ≥ `threshold`; the top frequency present
    /// in the signal.
    pub fn max_abs_energy(&self, threshold: f64) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.weight >= threshold)
            .fold(0.0, |m, e| m.max(e.energy.abs()))
    }
}

/// `|⟨Ψ_i|ψ_ref⟩|²` for each eigenvector of `d`.
pub fn overlaps(d: &EigenDecomposition, reference: &StateVector) -> Result<OverlapTable> {
    if reference.dimension() != d.dimension() {
        return Err(Error::DimensionMismatch {
            expected: d.dimension(),
            got: reference.dimension(),
        });
    }
    let entries = d
        .energies
        .iter()
        .enumerate()
        .map(|(i, &energy)| {
            let c: Complex64 = d
                .vectors
                .column(i)
                .iter()
                .zip(reference.amplitudes())
                .map(|(v, r)| v.conj() * r)
                .sum();
            OverlapEntry {
                energy,
                weight: c.norm_sqr(),
            }
        })
        .collect();
    Ok(OverlapTable { entries })
}

/// Σ_i |c_i|² cos(E_i t).
pub fn analytic_signal(table: &OverlapTable, t: f64) -> f64 {
    table
        .entries
        .iter()
        .map(|e| e.weight * (e.energy * t).cos())
        .sum()
}
