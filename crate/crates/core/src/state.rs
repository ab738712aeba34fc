//! Statevectors and reference-state specifications.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};

const NORM_TOLERANCE: f64 = 1e-12;

/// Unit-normalized amplitudes over `n_qubits`, qubit 0 most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps `amplitudes`, rejecting wrong lengths and non-unit norms.
    pub fn new(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let expected = 1usize << n_qubits;
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: amplitudes.len(),
            });
        }
        let norm: f64 = amplitudes.iter().map(Complex64::norm_sqr).sum();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(n_qubits: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroNorm);
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(n_qubits, amplitudes)
    }

    pub fn basis(bits: &BitString) -> Self {
        let n = bits.len();
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[bits.index()] = Complex64::new(1.0, 0.0);
        Self {
            n_qubits: n,
            amplitudes,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &[Complex64]) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// How the target register is initialised before the circuit runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceSpec {
    /// A single computational basis configuration, e.g. a Hartree–Fock string.
    Basis(BitString),
    /// Real-weighted superposition of configurations; normalized on
    /// preparation, duplicate strings summed first.
    Weighted(Vec<(BitString, f64)>),
}

impl ReferenceSpec {
    /// Register width implied by the spec, if it is consistent.
    pub fn n_qubits(&self) -> Option<usize> {
        match self {
            Self::Basis(b) => Some(b.len()),
            Self::Weighted(list) => list.first().map(|(b, _)| b.len()),
        }
    }

    pub fn as_basis(&self) -> Option<&BitString> {
        match self {
            Self::Basis(b) => Some(b),
            Self::Weighted(_) => None,
        }
    }

    /// Parses the file/inline form: one `<bits> <amplitude>` pair per line
    /// (or comma-separated `<bits>:<amplitude>` inline). A bare bitstring is
    /// a basis reference.
    pub fn parse_weighted(text: &str) -> Result<Self> {
        let mut list = Vec::new();
        let entries = text
            .lines()
            .flat_map(|l| l.split(','))
            .map(|s| s.split('#').next().unwrap_or("").trim())
            .filter(|s| !s.is_empty());
        for (i, entry) in entries.enumerate() {
            let mut parts = entry
                .split(|c: char| c == ':' || c.is_whitespace())
                .filter(|s| !s.is_empty());
            let bits: BitString = parts.next().unwrap_or_default().parse()?;
            let amp = match parts.next() {
                Some(a) => a.parse::<f64>().map_err(|_| Error::Parse {
                    line: i + 1,
                    message: format!("invalid amplitude {a:?}"),
                })?,
                None => 1.0,
            };
            if !amp.is_finite() {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("amplitude {amp} is not finite"),
                });
            }
            list.push((bits, amp));
        }
        if list.is_empty() {
            return Err(Error::EmptyReference);
        }
        Ok(Self::Weighted(list))
    }
}

impl FromStr for ReferenceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains([':', ',', '\n', ' ']) {
            Self::parse_weighted(s)
        } else {
            Ok(Self::Basis(s.parse()?))
        }
    }
}

impl fmt::Display for ReferenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Basis(b) => write!(f, "{b}"),
            Self::Weighted(list) => {
                for (i, (b, a)) in list.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{b}:{a:?}")?;
                }
                Ok(())
            }
        }
    }
}

/// Builds the normalized target-register state described by `spec`.
pub fn prepare_reference(spec: &ReferenceSpec, n_qubits: usize) -> Result<StateVector> {
    match spec {
        ReferenceSpec::Basis(bits) => {
            if bits.len() != n_qubits {
                return Err(Error::LengthMismatch {
                    expected: n_qubits,
                    got: bits.len(),
                });
            }
            Ok(StateVector::basis(bits))
        }
        ReferenceSpec::Weighted(list) => {
            if list.is_empty() {
                return Err(Error::EmptyReference);
            }
            let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
            for (bits, amp) in list {
                if bits.len() != n_qubits {
                    return Err(Error::LengthMismatch {
                        expected: n_qubits,
                        got: bits.len(),
                    });
                }
                *merged.entry(bits.index()).or_insert(0.0) += amp;
            }
            let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
            for (index, amp) in merged {
                amplitudes[index] = Complex64::new(amp, 0.0);
            }
            StateVector::normalized(n_qubits, amplitudes)
        }
    }
}
