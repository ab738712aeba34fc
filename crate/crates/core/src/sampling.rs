//! Time-grid planning and signal acquisition.
//!
//! A plan fixes the sampling interval Δ and an odd sample count N. The
//! product `T_max = N·Δ` sets the frequency bin width `δ = 2π/T_max`, which is
//! the energy resolution, while Δ must stay below the Nyquist limit
//! `π/|E|_max` for the fastest component of the signal.

use std::f64::consts::{PI, TAU};
use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::sim::{shot_sample_with, CircuitPointResult, Simulator};
use crate::state::{ReferenceSpec, StateVector};

/// Environment variable holding the worker-thread count for acquisition.
pub const WORKERS_ENV: &str = "QCOS_WORKERS";

/// Smallest admissible sample count.
pub const MIN_SAMPLES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    /// Evaluate `n = 0..=(N−1)/2` and fill the rest from `q(n) = q(N−n)`.
    #[default]
    Mirror,
    /// Evaluate every sample directly.
    Full,
}

impl std::str::FromStr for SamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mirror" => Ok(Self::Mirror),
            "full" => Ok(Self::Full),
            other => Err(Error::InvalidPlan(format!(
                "unknown sampling mode {other:?}"
            ))),
        }
    }
}

/// Uniform time grid `t_n = n·Δ`, `n = 0..N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PlanFields")]
pub struct SamplingPlan {
    delta: f64,
    interval: f64,
    count: usize,
    t_max: f64,
    mode: SamplingMode,
    shots: Option<u64>,
    energy_bound: f64,
}

#[derive(Deserialize)]
struct PlanFields {
    delta: f64,
    interval: f64,
    count: usize,
    t_max: f64,
    mode: SamplingMode,
    shots: Option<u64>,
    energy_bound: f64,
}

impl TryFrom<PlanFields> for SamplingPlan {
    type Error = Error;

    fn try_from(f: PlanFields) -> Result<Self> {
        let plan = SamplingPlan::from_grid(f.interval, f.count, f.energy_bound)?
            .with_mode(f.mode)
            .with_shots(f.shots)?;
        let consistent = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs());
        if !consistent(plan.delta, f.delta) || !consistent(plan.t_max, f.t_max) {
            return Err(Error::InvalidPlan(format!(
                "delta {} / t_max {} inconsistent with interval {} and count {}",
                f.delta, f.t_max, f.interval, f.count
            )));
        }
        Ok(plan)
    }
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidPlan(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

/// `π / energy_bound`.
pub fn nyquist_interval(energy_bound: f64) -> f64 {
    PI / energy_bound
}

impl SamplingPlan {
    /// Plan on an explicit grid. `count` must be odd and `interval` within
    /// the Nyquist limit of `energy_bound`.
    pub fn from_grid(interval: f64, count: usize, energy_bound: f64) -> Result<Self> {
        positive("interval", interval)?;
        positive("energy bound", energy_bound)?;
        if count < MIN_SAMPLES || count.is_multiple_of(2) {
            return Err(Error::InvalidPlan(format!(
                "sample count must be odd and at least {MIN_SAMPLES}, got {count}"
            )));
        }
        let max_interval = nyquist_interval(energy_bound);
        if interval > max_interval {
            return Err(Error::NyquistViolation {
                requested: interval,
                max_interval,
                energy_bound,
            });
        }
        let t_max = count as f64 * interval;
        Ok(Self {
            delta: TAU / t_max,
            interval,
            count,
            t_max,
            mode: SamplingMode::default(),
            shots: None,
            energy_bound,
        })
    }

    pub fn with_mode(mut self, mode: SamplingMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_shots(mut self, shots: Option<u64>) -> Result<Self> {
        if shots == Some(0) {
            return Err(Error::InvalidPlan("shots must be positive".into()));
        }
        self.shots = shots;
        Ok(self)
    }

    /// Frequency-bin width `2π/(N·Δ)`: the energy resolution.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn interval(&self) -> f64 {
        self.interval
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn mode(&self) -> SamplingMode {
        self.mode
    }

    pub fn shots(&self) -> Option<u64> {
        self.shots
    }

    pub fn energy_bound(&self) -> f64 {
        self.energy_bound
    }

    pub fn max_interval(&self) -> f64 {
        nyquist_interval(self.energy_bound)
    }

    /// Index of the last independently evaluated sample in mirror mode.
    pub fn half(&self) -> usize {
        (self.count - 1) / 2
    }

    /// Number of circuit evaluations the plan requires.
    pub fn evaluations(&self) -> usize {
        match self.mode {
            SamplingMode::Mirror => self.half() + 1,
            SamplingMode::Full => self.count,
        }
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.interval
    }
}

/// Builds the coarsest grid that reaches `target_delta` without aliasing.
///
/// `T_max` is set to `2π/target_delta`, Δ starts at the requested interval (or
/// the Nyquist limit when none is given) and is then shrunk until `T_max/Δ`
/// is an odd integer.
pub fn make_plan(
    target_delta: f64,
    energy_bound: f64,
    requested_interval: Option<f64>,
    shots: Option<u64>,
) -> Result<SamplingPlan> {
    positive("target delta", target_delta)?;
    positive("energy bound", energy_bound)?;
    let max_interval = nyquist_interval(energy_bound);
    let base = match requested_interval {
        Some(r) => {
            positive("interval", r)?;
            if r > max_interval {
                return Err(Error::NyquistViolation {
                    requested: r,
                    max_interval,
                    energy_bound,
                });
            }
            r
        }
        None => max_interval,
    };

    let t_target = TAU / target_delta;
    let mut count = ((t_target / base).ceil() as usize).max(MIN_SAMPLES);
    if count.is_multiple_of(2) {
        count += 1;
    }
    let mut interval = (t_target / count as f64).min(base);
    // rounding can leave N·Δ a hair short of T_max
    while TAU / (count as f64 * interval) > target_delta && interval.next_up() <= base {
        interval = interval.next_up();
    }
    SamplingPlan::from_grid(interval, count, energy_bound)?.with_shots(shots)
}

/// An energy bound and whether it is guaranteed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBound {
    pub value: f64,
    /// True for the basis-state estimate, which may undershoot max |E_i|.
    pub heuristic: bool,
}

/// ℓ1 coefficient norm by default; with `basis_reference`, the heuristic
/// `|⟨bits|H|bits⟩|` instead.
pub fn estimate_energy_bound(
    h: &Hamiltonian,
    basis_reference: Option<&BitString>,
) -> Result<EnergyBound> {
    match basis_reference {
        None => Ok(EnergyBound {
            value: h.l1_norm_bound(),
            heuristic: false,
        }),
        Some(bits) => Ok(EnergyBound {
            value: h.basis_expectation(bits)?.abs(),
            heuristic: true,
        }),
    }
}

/// How each time point is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    /// Full ancilla circuit.
    #[default]
    Circuit,
    /// `Re⟨ψ|e^{−iHt}|ψ⟩` on the target register only.
    Direct,
}

impl std::str::FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "circuit" => Ok(Self::Circuit),
            "direct" => Ok(Self::Direct),
            other => Err(Error::InvalidPlan(format!("unknown route {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AcquireOptions {
    pub route: Route,
    /// Seed for shot sampling; point `n` draws from stream `n`.
    pub seed: u64,
}

/// Sampled sequence `q(n) = Q(n·Δ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    plan: SamplingPlan,
    values: Vec<f64>,
}

impl Signal {
    pub fn new(plan: SamplingPlan, values: Vec<f64>) -> Result<Self> {
        if values.len() != plan.count() {
            return Err(Error::MalformedSignal(format!(
                "{} values for a {}-sample plan",
                values.len(),
                plan.count()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::MalformedSignal(format!("non-finite sample {v}")));
        }
        Ok(Self { plan, values })
    }

    pub fn plan(&self) -> &SamplingPlan {
        &self.plan
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Writes `n,t,q` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["n", "t", "q"])?;
        for (n, q) in self.values.iter().enumerate() {
            w.write_record([
                n.to_string(),
                format!("{:.16e}", self.plan.time(n)),
                format!("{q:.16e}"),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads an `n,t,q` table. The interval is recovered from the time
    /// column; the energy bound is set to the largest value the grid can
    /// represent (`π/Δ`).
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            n: usize,
            t: f64,
            q: f64,
        }
        let mut rdr = csv::Reader::from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().map(str::trim).collect::<Vec<_>>() != ["n", "t", "q"] {
            return Err(Error::MalformedSignal(format!(
                "expected header n,t,q, got {headers:?}"
            )));
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (i, row) in rdr.deserialize::<Row>().enumerate() {
            let row = row?;
            if row.n != i {
                return Err(Error::MalformedSignal(format!(
                    "row {} has n = {}",
                    i + 1,
                    row.n
                )));
            }
            times.push(row.t);
            values.push(row.q);
        }
        let count = values.len();
        if count % 2 == 0 {
            return Err(Error::EvenLength(count));
        }
        if count < MIN_SAMPLES {
            return Err(Error::MalformedSignal(format!(
                "need at least {MIN_SAMPLES} samples, got {count}"
            )));
        }
        // t_1 is Δ itself, written at full precision
        let interval = times[1];
        for (n, &t) in times.iter().enumerate() {
            let expected = n as f64 * interval;
            if (t - expected).abs() > 1e-9 * expected.abs().max(interval) {
                return Err(Error::MalformedSignal(format!(
                    "row {n}: t = {t} is off the uniform grid (expected {expected})"
                )));
            }
        }
        let symmetric = (1..count).all(|n| values[n] == values[count - n]);
        let mode = if symmetric {
            SamplingMode::Mirror
        } else {
            SamplingMode::Full
        };
        let plan =
            SamplingPlan::from_grid(interval, count, nyquist_interval(interval))?.with_mode(mode);
        Signal::new(plan, values)
    }
}

fn configured_workers() -> Option<usize> {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

fn evaluate_point(
    sim: &Simulator,
    reference: &StateVector,
    plan: &SamplingPlan,
    opts: &AcquireOptions,
    n: usize,
) -> Result<f64> {
    let t = plan.time(n);
    let exact = match opts.route {
        Route::Circuit => sim.circuit_point(reference, t)?,
        Route::Direct => {
            let q = sim.direct_point(reference, t)?;
            CircuitPointResult {
                t,
                p0: (1.0 - q) / 2.0,
                p1: (1.0 + q) / 2.0,
                q,
                shots_used: None,
            }
        }
    };
    Ok(match plan.shots() {
        None => exact.q,
        Some(shots) => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(n as u64);
            shot_sample_with(&exact, shots, &mut rng).q
        }
    })
}

/// Evaluates the plan's time grid with a prepared simulator. Points are
/// evaluated in parallel (see [`WORKERS_ENV`]) and assembled in index order.
pub fn acquire_with(
    sim: &Simulator,
    reference: &StateVector,
    plan: &SamplingPlan,
    opts: &AcquireOptions,
) -> Result<Signal> {
    let evaluated = plan.evaluations();
    let run = || -> Result<Vec<f64>> {
        (0..evaluated)
            .into_par_iter()
            .map(|n| evaluate_point(sim, reference, plan, opts, n))
            .collect()
    };
    let mut values = match configured_workers() {
        Some(workers) => rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidPlan(format!("cannot start {workers} workers: {e}")))?
            .install(run)?,
        None => run()?,
    };
    if plan.mode() == SamplingMode::Mirror {
        let count = plan.count();
        for n in evaluated..count {
            values.push(values[count - n]);
        }
    }
    Signal::new(*plan, values)
}

/// Samples `Q(t)` for `h` and `spec` on the plan's grid through the full
/// circuit.
pub fn acquire_signal(
    h: &Hamiltonian,
    spec: &ReferenceSpec,
    plan: &SamplingPlan,
) -> Result<Signal> {
    acquire_signal_with(h, spec, plan, &AcquireOptions::default())
}

pub fn acquire_signal_with(
    h: &Hamiltonian,
    spec: &ReferenceSpec,
    plan: &SamplingPlan,
    opts: &AcquireOptions,
) -> Result<Signal> {
    let sim = Simulator::new(h)?;
    let reference = sim.prepare(spec)?;
    acquire_with(&sim, &reference, plan, opts)
}
