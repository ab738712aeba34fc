//! Pauli-string Hamiltonians.
//!
//! A Hamiltonian is a real-weighted sum of Pauli strings,
//!
//!   H = Σ_j h_j · P_j,   P_j = ⊗_q σ_q,  σ ∈ {I, X, Y, Z}
//!
//! stored in canonical form: factors sorted by qubit, duplicate strings merged,
//! zero-weight terms dropped. Qubit 0 is the most significant bit of the
//! basis-state index everywhere in this crate.
//!
//! The text format is line-oriented:
//!
//! ```text
//! # comment
//! qubits 2
//! -0.4804 Z0 Z1
//! 0.2            # identity term
//! 0.5 x0         # axes are case-insensitive
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Largest register for which a dense matrix (and hence the exact oracle and
/// propagator) is built.
pub const MAX_DENSE_QUBITS: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    fn from_char(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'X' => Some(Self::X),
            'Y' => Some(Self::Y),
            'Z' => Some(Self::Z),
            _ => None,
        }
    }

    fn as_char(self) -> char {
        match self {
            Self::X => 'X',
            Self::Y => 'Y',
            Self::Z => 'Z',
        }
    }
}

/// `coefficient · ⊗ factors`, identity on every qubit not listed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    coefficient: f64,
    factors: Vec<(usize, PauliAxis)>,
}

impl PauliTerm {
    /// Builds a term, sorting factors by qubit. Rejects repeated qubits and
    /// non-finite coefficients.
    pub fn new(
        coefficient: f64,
        factors: impl IntoIterator<Item = (usize, PauliAxis)>,
    ) -> Result<Self> {
        if !coefficient.is_finite() {
            return Err(Error::NonFiniteCoefficient(coefficient));
        }
        let mut factors: Vec<_> = factors.into_iter().collect();
        factors.sort_by_key(|&(q, _)| q);
        if let Some(w) = factors.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateQubit { qubit: w[0].0 });
        }
        Ok(Self {
            coefficient,
            factors,
        })
    }

    pub fn identity(coefficient: f64) -> Result<Self> {
        Self::new(coefficient, [])
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn factors(&self) -> &[(usize, PauliAxis)] {
        &self.factors
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    /// True when every factor is Z, i.e. the term is diagonal in the
    /// computational basis.
    pub fn is_diagonal(&self) -> bool {
        self.factors.iter().all(|&(_, a)| a == PauliAxis::Z)
    }

    fn max_qubit(&self) -> Option<usize> {
        self.factors.last().map(|&(q, _)| q)
    }

    /// Bit masks for the action on a basis index of an `n_qubits` register:
    /// `flip` marks X/Y factors, `phase` marks Z/Y factors, plus the Y count.
    fn masks(&self, n_qubits: usize) -> (usize, usize, usize) {
        let mut flip = 0;
        let mut phase = 0;
        let mut n_y = 0;
        for &(q, axis) in &self.factors {
            let bit = 1 << (n_qubits - 1 - q);
            match axis {
                PauliAxis::X => flip |= bit,
                PauliAxis::Z => phase |= bit,
                PauliAxis::Y => {
                    flip |= bit;
                    phase |= bit;
                    n_y += 1;
                }
            }
        }
        (flip, phase, n_y)
    }
}

/// i^k for k mod 4.
fn i_pow(k: usize) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn parity_sign(x: usize) -> f64 {
    if x.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Immutable, canonical Pauli-sum Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hamiltonian {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl Hamiltonian {
    /// Canonicalizes `terms` on an `n_qubits` register: identical factor
    /// lists are merged, zero-weight results dropped, terms ordered by
    /// factor list (identity first).
    pub fn new(n_qubits: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::QubitOutOfRange { qubit: 0, n_qubits });
        }
        let mut merged: BTreeMap<Vec<(usize, PauliAxis)>, f64> = BTreeMap::new();
        for term in terms {
            if let Some(q) = term.max_qubit().filter(|&q| q >= n_qubits) {
                return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
            }
            *merged.entry(term.factors).or_insert(0.0) += term.coefficient;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(factors, coefficient)| PauliTerm {
                coefficient,
                factors,
            })
            .collect();
        Ok(Self { n_qubits, terms })
    }

    /// Like [`Hamiltonian::new`] with the register sized to the largest
    /// qubit index referenced (at least one qubit).
    pub fn from_terms(terms: Vec<PauliTerm>) -> Result<Self> {
        let n = terms
            .iter()
            .filter_map(PauliTerm::max_qubit)
            .max()
            .map_or(1, |q| q + 1);
        Self::new(n, terms)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dimension(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// Coefficient of the identity term (0 when absent).
    pub fn identity_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .find(|t| t.is_identity())
            .map_or(0.0, |t| t.coefficient)
    }

    pub fn check_dense_cap(&self) -> Result<()> {
        if self.n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::DimensionCap {
                n_qubits: self.n_qubits,
                cap: MAX_DENSE_QUBITS,
            });
        }
        Ok(())
    }

    /// Dense 2^n × 2^n matrix, qubit 0 on the most significant index bit.
    pub fn dense_matrix(&self) -> Result<DMatrix<Complex64>> {
        self.check_dense_cap()?;
        let dim = self.dimension();
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for term in &self.terms {
            let (flip, phase, n_y) = term.masks(self.n_qubits);
            let base = i_pow(n_y) * term.coefficient;
            for col in 0..dim {
                m[(col ^ flip, col)] += base * parity_sign(col & phase);
            }
        }
        Ok(m)
    }

    /// Matrix-free `H·psi`.
    pub fn apply(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        let dim = self.dimension();
        if psi.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: psi.len(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for term in &self.terms {
            let (flip, phase, n_y) = term.masks(self.n_qubits);
            let base = i_pow(n_y) * term.coefficient;
            for (col, &amp) in psi.iter().enumerate() {
                out[col ^ flip] += base * parity_sign(col & phase) * amp;
            }
        }
        Ok(out)
    }

    /// Σ_j |h_j|, an upper bound on the spectral radius.
    pub fn l1_norm_bound(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }

    /// `H + s0·I`.
    pub fn offset(&self, s0: f64) -> Result<Self> {
        let shift = PauliTerm::identity(s0)?;
        Self::new(
            self.n_qubits,
            self.terms.iter().cloned().chain(std::iter::once(shift)),
        )
    }

    /// ⟨bits|H|bits⟩. Only Z-only and identity terms contribute.
    pub fn basis_expectation(&self, bits: &BitString) -> Result<f64> {
        if bits.len() != self.n_qubits {
            return Err(Error::LengthMismatch {
                expected: self.n_qubits,
                got: bits.len(),
            });
        }
        let index = bits.index();
        Ok(self
            .terms
            .iter()
            .filter(|t| t.is_diagonal())
            .map(|t| {
                let (_, phase, _) = t.masks(self.n_qubits);
                t.coefficient * parity_sign(index & phase)
            })
            .sum())
    }
}

/// Parses the line-oriented Hamiltonian format (see module docs).
pub fn parse_hamiltonian(text: &str) -> Result<Hamiltonian> {
    let mut header: Option<usize> = None;
    let mut terms = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let first = tokens.next().expect("non-empty line has a token");

        if first.eq_ignore_ascii_case("qubits") {
            if header.is_some() {
                return Err(err("duplicate 'qubits' header".into()));
            }
            let n = tokens
                .next()
                .ok_or_else(|| err("'qubits' header needs a count".into()))?;
            let n: usize = n
                .parse()
                .map_err(|_| err(format!("invalid qubit count {n:?}")))?;
            if n == 0 {
                return Err(err("qubit count must be positive".into()));
            }
            if let Some(extra) = tokens.next() {
                return Err(err(format!("unexpected token {extra:?} after qubit count")));
            }
            header = Some(n);
            continue;
        }

        let coefficient: f64 = first
            .parse()
            .map_err(|_| err(format!("non-numeric coefficient {first:?}")))?;
        if !coefficient.is_finite() {
            return Err(err(format!("coefficient {first:?} is not finite")));
        }

        let mut factors = Vec::new();
        for token in tokens {
            let mut chars = token.chars();
            let axis = chars
                .next()
                .and_then(PauliAxis::from_char)
                .ok_or_else(|| err(format!("expected a Pauli factor like Z3, got {token:?}")))?;
            let index = chars.as_str();
            if index.starts_with('-') {
                return Err(err(format!("negative qubit index in {token:?}")));
            }
            if index.is_empty() || !index.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err(format!("invalid qubit index in {token:?}")));
            }
            let q: usize = index
                .parse()
                .map_err(|_| err(format!("qubit index out of range in {token:?}")))?;
            factors.push((q, axis));
        }
        let term = PauliTerm::new(coefficient, factors).map_err(|e| match e {
            Error::DuplicateQubit { qubit } => err(format!("duplicate axis on qubit {qubit}")),
            other => other,
        })?;
        terms.push(term);
    }

    let inferred = terms
        .iter()
        .filter_map(PauliTerm::max_qubit)
        .max()
        .map_or(1, |q| q + 1);
    match header {
        Some(n) => Hamiltonian::new(n, terms),
        None => Hamiltonian::new(inferred, terms),
    }
}

impl FromStr for Hamiltonian {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_hamiltonian(s)
    }
}

/// Serializes in the same text format accepted by [`parse_hamiltonian`].
impl fmt::Display for Hamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.n_qubits)?;
        for term in &self.terms {
            write!(f, "{:?}", term.coefficient)?;
            for &(q, axis) in &term.factors {
                write!(f, " {}{}", axis.as_char(), q)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
