use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Computational-basis label, one bit per qubit. Character `i` is qubit `i`,
/// and qubit 0 is the most significant bit of the basis index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// The all-zero string on `n` qubits.
    pub fn zeros(n: usize) -> Self {
        Self(vec![false; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bit(&self, qubit: usize) -> bool {
        self.0[qubit]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// Basis-state index with qubit 0 as the most significant bit.
    pub fn index(&self) -> usize {
        self.0
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b))
    }

    pub fn from_index(index: usize, n_qubits: usize) -> Self {
        Self(
            (0..n_qubits)
                .map(|q| (index >> (n_qubits - 1 - q)) & 1 == 1)
                .collect(),
        )
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::InvalidBitString(s.to_string()));
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidBitString(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl TryFrom<String> for BitString {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<BitString> for String {
    fn from(b: BitString) -> String {
        b.to_string()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}
