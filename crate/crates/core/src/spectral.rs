//! DFT analysis of the sampled signal.
//!
//! For an odd-length sequence `q(0..N)` with `R(k) = Σ_n q(n)·e^{−i2πkn/N}`,
//! the one-sided cosine coefficients are `a_0 = R(0)/N` and
//! `a_k = 2·Re R(k)/N` for `k = 1..=(N−1)/2`, so that
//! `q(n) = a_0 + Σ_k a_k·cos(2πnk/N)`. Bin `k` sits at frequency
//! `x_k = k/(N·Δ)` and energy `|E| = 2π·x_k = k·δ`; its coefficient
//! approximates the overlap weight of eigenstates at that energy.

use std::f64::consts::TAU;
use std::io::{Read, Write};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::OverlapTable;
use crate::sampling::{nyquist_interval, SamplingPlan, Signal};

/// Default minimum `a_k` for a bin to count as a peak.
pub const DEFAULT_THRESHOLD: f64 = 1e-3;

/// One-sided cosine spectrum of a signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    plan: SamplingPlan,
    a0: f64,
    /// `a_k` for `k = 1..=(N−1)/2`.
    coefficients: Vec<f64>,
    max_imag: f64,
}

impl Spectrum {
    pub fn plan(&self) -> &SamplingPlan {
        &self.plan
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    /// `a_1, …, a_{(N−1)/2}`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `a_k` for any `k` in `0..=(N−1)/2`.
    pub fn amplitude(&self, k: usize) -> f64 {
        if k == 0 {
            self.a0
        } else {
            self.coefficients[k - 1]
        }
    }

    /// Highest bin index, `(N−1)/2`.
    pub fn max_bin(&self) -> usize {
        self.coefficients.len()
    }

    /// Largest `|Im R(k)|` seen; tiny for symmetric signals.
    pub fn max_imag(&self) -> f64 {
        self.max_imag
    }

    /// `x_k = k/(N·Δ)`.
    pub fn frequency(&self, k: usize) -> f64 {
        k as f64 / self.plan.t_max()
    }

    /// `|E| = 2π·x_k`.
    pub fn energy(&self, k: usize) -> f64 {
        TAU * k as f64 / self.plan.t_max()
    }

    /// `a_0 + Σ a_k`, which reconstructs `q(0)`.
    pub fn reconstruct_origin(&self) -> f64 {
        self.a0 + self.coefficients.iter().sum::<f64>()
    }

    /// Writes `k,x,a` rows for `k = 0..=(N−1)/2`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["k", "x", "a"])?;
        for k in 0..=self.max_bin() {
            w.write_record([
                k.to_string(),
                format!("{:.16e}", self.frequency(k)),
                format!("{:.16e}", self.amplitude(k)),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `x,log10_a` rows for bins with positive amplitude (log-scale
    /// plot data).
    pub fn write_log_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["x", "log10_a"])?;
        for k in 0..=self.max_bin() {
            let a = self.amplitude(k);
            if a > 0.0 {
                w.write_record([
                    format!("{:.16e}", self.frequency(k)),
                    format!("{:.16e}", a.log10()),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a `k,x,a` table back. `N = 2·k_max + 1` and `N·Δ` come from the
    /// last row.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            k: usize,
            x: f64,
            a: f64,
        }
        let mut rdr = csv::Reader::from_reader(reader);
        let rows: Vec<Row> = rdr.deserialize().collect::<std::result::Result<_, _>>()?;
        if rows.len() < 2 {
            return Err(Error::MalformedSignal(
                "spectrum needs at least two bins".into(),
            ));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(i, r)| r.k != *i) {
            return Err(Error::MalformedSignal(format!(
                "row {} has k = {}",
                i + 1,
                r.k
            )));
        }
        let last = rows.last().expect("at least two rows");
        let count = 2 * last.k + 1;
        let t_max = last.k as f64 / last.x;
        let interval = t_max / count as f64;
        let plan = SamplingPlan::from_grid(interval, count, nyquist_interval(interval))?;
        Ok(Self {
            plan,
            a0: rows[0].a,
            coefficients: rows[1..].iter().map(|r| r.a).collect(),
            max_imag: 0.0,
        })
    }
}

/// DFT of `signal`, reduced to the one-sided cosine coefficients.
pub fn transform(signal: &Signal) -> Result<Spectrum> {
    let n = signal.len();
    if n.is_multiple_of(2) {
        return Err(Error::EvenLength(n));
    }
    let mut buffer: Vec<Complex64> = signal
        .values()
        .iter()
        .map(|&q| Complex64::new(q, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buffer);

    let half = (n - 1) / 2;
    let scale = n as f64;
    let max_imag = buffer[..=half]
        .iter()
        .fold(0.0f64, |m, r| m.max(r.im.abs()));
    Ok(Spectrum {
        plan: *signal.plan(),
        a0: buffer[0].re / scale,
        coefficients: buffer[1..=half]
            .iter()
            .map(|r| 2.0 * r.re / scale)
            .collect(),
        max_imag,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Positive,
    Negative,
    Unknown,
}

/// A spectral peak read as an eigen-energy magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenEstimate {
    pub bin: usize,
    pub x: f64,
    pub abs_energy: f64,
    /// `a_k`, an approximation to the overlap weight.
    pub amplitude: f64,
    pub sign: Sign,
    /// Signed energy once the sign is known.
    pub energy: Option<f64>,
}

impl EigenEstimate {
    /// Applies `sign`, filling the signed energy when it is definite.
    pub fn with_sign(mut self, sign: Sign) -> Self {
        self.sign = sign;
        self.energy = match sign {
            Sign::Positive => Some(self.abs_energy),
            Sign::Negative => Some(-self.abs_energy),
            Sign::Unknown => None,
        };
        self
    }
}

/// Detected peaks. The DC bin is never an eigen-estimate: an energy of
/// exactly zero cannot be told apart from a constant offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Peaks {
    /// `a_0` when it reaches the threshold.
    pub dc: Option<f64>,
    /// Sorted by descending amplitude.
    pub estimates: Vec<EigenEstimate>,
}

/// Strict local maxima of `a_k` (k ≥ 1) at or above `threshold`.
///
/// Two adjacent bins straddling one tone resolve to whichever has the larger
/// amplitude; an exact tie goes to the lower bin. Bin 1 is compared against
/// the DC bin on the same `2R/N` scale (`2·a_0`).
pub fn detect_peaks(spectrum: &Spectrum, threshold: f64) -> Peaks {
    assert!(threshold > 0.0, "threshold must be positive");
    let m = spectrum.max_bin();
    let a = |k: usize| spectrum.amplitude(k);
    let mut estimates: Vec<EigenEstimate> = (1..=m)
        .filter(|&k| {
            let here = a(k);
            let left = if k == 1 { 2.0 * spectrum.a0 } else { a(k - 1) };
            let right = if k == m { f64::NEG_INFINITY } else { a(k + 1) };
            // strict on the left, inclusive on the right: plateaus resolve to the lower bin
            here >= threshold && here > left && here >= right
        })
        .map(|k| EigenEstimate {
            bin: k,
            x: spectrum.frequency(k),
            abs_energy: spectrum.energy(k),
            amplitude: a(k),
            sign: Sign::Unknown,
            energy: None,
        })
        .collect();
    estimates.sort_by(|x, y| y.amplitude.total_cmp(&x.amplitude).then(x.bin.cmp(&y.bin)));
    Peaks {
        dc: (spectrum.a0 >= threshold).then_some(spectrum.a0),
        estimates,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateMatch {
    pub abs_energy: f64,
    pub amplitude: f64,
    /// Nearest oracle |E_i| (by magnitude).
    pub oracle_abs_energy: f64,
    pub oracle_weight: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleMatch {
    /// Signed oracle energy (weight-averaged over the merged group).
    pub energy: f64,
    pub weight: f64,
    /// Nearest estimated |E|, or `None` when no estimate exists.
    pub estimate: Option<f64>,
    pub error: Option<f64>,
    pub recovered: bool,
}

/// Comparison of recovered peaks against the dense-diagonalization oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub delta: f64,
    pub threshold: f64,
    pub estimates: Vec<EstimateMatch>,
    /// Oracle entries with weight ≥ threshold, grouped by |E|.
    pub oracle: Vec<OracleMatch>,
    /// Largest estimate-to-oracle distance.
    pub max_estimate_error: Option<f64>,
    /// Largest oracle-to-estimate distance over significant oracle entries.
    pub max_recovery_error: Option<f64>,
    pub missed: usize,
    pub success: bool,
}

/// Groups `table` by |E| (entries closer than `tolerance` in magnitude merge).
fn magnitude_groups(table: &OverlapTable, tolerance: f64) -> Vec<(f64, f64, f64)> {
    let mut items: Vec<(f64, f64)> = table.entries.iter().map(|e| (e.energy, e.weight)).collect();
    items.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()));
    let mut groups: Vec<(f64, f64, f64)> = Vec::new(); // (|E| mean, signed mean, weight)
    for (e, w) in items {
        match groups.last_mut() {
            Some(g) if (e.abs() - g.0).abs() <= tolerance => {
                let total = g.2 + w;
                if total > 0.0 {
                    g.0 = (g.0 * g.2 + e.abs() * w) / total;
                    g.1 = (g.1 * g.2 + e * w) / total;
                }
                g.2 = total;
            }
            _ => groups.push((e.abs(), e, w)),
        }
    }
    groups
}

/// Matches `peaks` against `oracle` at resolution `delta`.
///
/// Every oracle |E| group with weight ≥ `threshold` must have an estimate
/// within `delta` for success. Groups below `delta/2` count as recovered when
/// the DC component was detected.
pub fn recover_report(
    peaks: &Peaks,
    oracle: &OverlapTable,
    delta: f64,
    threshold: f64,
) -> RecoveryReport {
    let tolerance = delta * (1.0 + 1e-9);
    let groups = magnitude_groups(oracle, 1e-9);
    let nonzero: Vec<&(f64, f64, f64)> = groups.iter().filter(|g| g.2 > 0.0).collect();

    let estimates: Vec<EstimateMatch> = peaks
        .estimates
        .iter()
        .filter_map(|est| {
            nonzero
                .iter()
                .min_by(|a, b| {
                    (a.0 - est.abs_energy)
                        .abs()
                        .total_cmp(&(b.0 - est.abs_energy).abs())
                })
                .map(|g| EstimateMatch {
                    abs_energy: est.abs_energy,
                    amplitude: est.amplitude,
                    oracle_abs_energy: g.0,
                    oracle_weight: g.2,
                    error: (g.0 - est.abs_energy).abs(),
                })
        })
        .collect();

    let oracle: Vec<OracleMatch> = groups
        .iter()
        .filter(|g| g.2 >= threshold)
        .map(|&(abs_e, signed, weight)| {
            let nearest = peaks
                .estimates
                .iter()
                .map(|e| e.abs_energy)
                .min_by(|a, b| (a - abs_e).abs().total_cmp(&(b - abs_e).abs()));
            let error = nearest.map(|e| (e - abs_e).abs());
            let dc_hit = abs_e <= delta / 2.0 && peaks.dc.is_some();
            OracleMatch {
                energy: signed,
                weight,
                estimate: nearest,
                error,
                recovered: dc_hit || error.is_some_and(|e| e <= tolerance),
            }
        })
        .collect();

    let max_of = |it: &mut dyn Iterator<Item = f64>| {
        it.fold(None, |m: Option<f64>, e| Some(m.map_or(e, |m| m.max(e))))
    };
    let max_estimate_error = max_of(&mut estimates.iter().map(|m| m.error));
    let max_recovery_error = max_of(&mut oracle.iter().filter_map(|m| m.error));
    let missed = oracle.iter().filter(|m| !m.recovered).count();
    RecoveryReport {
        delta,
        threshold,
        estimates,
        oracle,
        max_estimate_error,
        max_recovery_error,
        missed,
        success: missed == 0,
    }
}
