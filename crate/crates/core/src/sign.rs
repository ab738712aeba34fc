//! Eigenvalue signs from the peak shift under `H → H + s0·I`.
//!
//! The offset moves every eigenvalue by `+s0`, so a peak at `|E|` moves right
//! (to `|E| + s0`) when `E > 0` and left (to `|E| − s0`) when `E < 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::sampling::{acquire_signal_with, AcquireOptions, SamplingPlan};
use crate::spectral::{detect_peaks, transform, EigenEstimate, Sign};
use crate::state::ReferenceSpec;

/// Offset used when none is given: `max(4δ, 0.05)`.
pub fn default_offset(delta: f64) -> f64 {
    (4.0 * delta).max(0.05)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftSign {
    Positive,
    Negative,
    /// Shift below one bin, or shifted partners on both sides.
    Ambiguous,
    /// No shifted peak at the expected distance.
    Unmatched,
}

impl ShiftSign {
    pub fn as_sign(self) -> Sign {
        match self {
            Self::Positive => Sign::Positive,
            Self::Negative => Sign::Negative,
            Self::Ambiguous | Self::Unmatched => Sign::Unknown,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignPair {
    pub base: EigenEstimate,
    pub shifted: Option<EigenEstimate>,
    /// `shifted |E| − base |E|`.
    pub shift: Option<f64>,
    pub sign: ShiftSign,
}

impl SignPair {
    pub fn signed_energy(&self) -> Option<f64> {
        self.base.with_sign(self.sign.as_sign()).energy
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignResolution {
    pub s0: f64,
    pub delta: f64,
    pub pairs: Vec<SignPair>,
}

impl SignResolution {
    /// Base estimates with signs and signed energies filled in.
    pub fn signed_estimates(&self) -> Vec<EigenEstimate> {
        self.pairs
            .iter()
            .map(|p| p.base.with_sign(p.sign.as_sign()))
            .collect()
    }

    pub fn unmatched(&self) -> usize {
        self.pairs
            .iter()
            .filter(|p| p.sign == ShiftSign::Unmatched)
            .count()
    }
}

/// Shifted peaks weaker than this fraction of the base peak are leakage
/// side lobes, not the moved tone.
pub const MATCH_AMPLITUDE_RATIO: f64 = 0.25;

/// Pairs base peaks with shifted peaks and classifies each shift.
///
/// A true tone moves by exactly `±s0`, so base peaks (taken in the given
/// order, descending amplitude from [`detect_peaks`]) only consider unclaimed
/// shifted peaks whose distance lies in `[s0 − 2δ, s0 + 2δ]` and whose
/// amplitude is at least [`MATCH_AMPLITUDE_RATIO`] of their own. The nearest
/// such peak is claimed. Candidates on both sides mean the peak is the merged
/// image of `±|E|`; it is reported ambiguous and claims both.
pub fn pair_shifts(
    base: &[EigenEstimate],
    shifted: &[EigenEstimate],
    s0: f64,
    delta: f64,
) -> SignResolution {
    let (low, high) = (s0 - 2.0 * delta, s0 + 2.0 * delta);
    let mut claimed = vec![false; shifted.len()];
    let pairs = base
        .iter()
        .map(|b| {
            let mut candidates: Vec<(usize, f64)> = shifted
                .iter()
                .enumerate()
                .filter(|&(i, s)| {
                    !claimed[i]
                        && (low..=high).contains(&(s.abs_energy - b.abs_energy).abs())
                        && s.amplitude >= MATCH_AMPLITUDE_RATIO * b.amplitude
                })
                .map(|(i, s)| (i, s.abs_energy - b.abs_energy))
                .collect();
            candidates.sort_by(|x, y| x.1.abs().total_cmp(&y.1.abs()));

            let Some(&(nearest, shift)) = candidates.first() else {
                return SignPair {
                    base: *b,
                    shifted: None,
                    shift: None,
                    sign: ShiftSign::Unmatched,
                };
            };
            claimed[nearest] = true;
            let mirror = candidates[1..]
                .iter()
                .find(|&&(_, d)| d.signum() != shift.signum() && shift != 0.0);
            let sign = if let Some(&(other, _)) = mirror {
                claimed[other] = true;
                ShiftSign::Ambiguous
            } else if shift > delta {
                ShiftSign::Positive
            } else if shift < -delta {
                ShiftSign::Negative
            } else {
                ShiftSign::Ambiguous
            };
            SignPair {
                base: *b,
                shifted: Some(shifted[nearest]),
                shift: Some(shift),
                sign,
            }
        })
        .collect();
    SignResolution { s0, delta, pairs }
}

/// Re-runs acquisition and peak detection on `h + s0·I` with the same plan
/// and reference, then pairs the peaks with `base_estimates`.
///
/// The plan's interval must also satisfy Nyquist for the shifted spectrum,
/// i.e. `Δ·(energy_bound + s0) ≤ π`.
pub fn resolve_signs(
    h: &Hamiltonian,
    spec: &ReferenceSpec,
    plan: &SamplingPlan,
    s0: f64,
    base_estimates: &[EigenEstimate],
    threshold: f64,
    opts: &AcquireOptions,
) -> Result<SignResolution> {
    let minimum = 2.0 * plan.delta();
    if !s0.is_finite() || s0 <= minimum {
        return Err(Error::OffsetBelowResolution { s0, minimum });
    }
    let shifted_bound = plan.energy_bound() + s0;
    if plan.interval() * shifted_bound > std::f64::consts::PI {
        return Err(Error::NyquistViolation {
            requested: plan.interval(),
            max_interval: std::f64::consts::PI / shifted_bound,
            energy_bound: shifted_bound,
        });
    }
    let shifted_h = h.offset(s0)?;
    let signal = acquire_signal_with(&shifted_h, spec, plan, opts)?;
    let shifted = detect_peaks(&transform(&signal)?, threshold);
    Ok(pair_shifts(
        base_estimates,
        &shifted.estimates,
        s0,
        plan.delta(),
    ))
}

/// Signs every estimate negative, the usual case for bound molecular
/// states. Only applied on explicit request.
pub fn assume_negative(estimates: &[EigenEstimate]) -> Vec<EigenEstimate> {
    estimates
        .iter()
        .map(|e| e.with_sign(Sign::Negative))
        .collect()
}
