use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use qcos_core::sampling::nyquist_interval;
use qcos_core::sign::assume_negative;
use qcos_core::*;
use serde::Serialize;

use crate::args::{AcquireArgs, PeakArgs, PlanArgs, Problem, ProblemArgs};
use crate::output::*;

/// Wall-clock seconds per stage, kept out of the deterministic report.
#[derive(Default, Serialize)]
struct Timings(BTreeMap<&'static str, f64>);

impl Timings {
    fn time<T>(&mut self, stage: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f().with_context(|| format!("stage {stage}"))?;
        self.0.insert(stage, start.elapsed().as_secs_f64());
        Ok(out)
    }
}

fn energy_bound(args: &PlanArgs, problem: Option<&Problem>) -> Result<EnergyBound> {
    if let Some(value) = args.bound {
        return Ok(EnergyBound {
            value,
            heuristic: false,
        });
    }
    let Some(problem) = problem else {
        bail!("--bound is required without --hamiltonian");
    };
    if args.heuristic_bound {
        let Some(bits) = problem.reference.as_basis() else {
            bail!("--heuristic-bound needs a basis-state reference");
        };
        Ok(estimate_energy_bound(&problem.hamiltonian, Some(bits))?)
    } else {
        Ok(estimate_energy_bound(&problem.hamiltonian, None)?)
    }
}

/// Plan for `args`; with an offset, the default interval also clears the
/// Nyquist limit of the shifted spectrum.
fn build_plan(args: &PlanArgs, bound: f64, offset: Option<f64>) -> Result<SamplingPlan> {
    let interval = args
        .interval
        .or(offset.map(|s0| nyquist_interval(bound + s0)));
    Ok(make_plan(args.delta, bound, interval, args.shots)?.with_mode(args.mode))
}

fn options(args: &AcquireArgs) -> AcquireOptions {
    AcquireOptions {
        route: args.route,
        seed: args.seed,
    }
}

pub fn plan(args: &PlanArgs, problem: Option<&ProblemArgs>, out: Option<&Path>) -> Result<()> {
    let problem = problem.map(ProblemArgs::load).transpose()?;
    let bound = energy_bound(args, problem.as_ref())?;
    let plan = build_plan(args, bound.value, None)?;
    emit_json(out, "plan.json", &PlanSummary::new(plan, bound.heuristic))?;
    Ok(())
}

pub fn oracle(problem: &ProblemArgs, out: Option<&Path>) -> Result<()> {
    let p = problem.load()?;
    let d = diagonalize(&p.hamiltonian).context("diagonalizing")?;
    let reference = prepare_reference(&p.reference, p.hamiltonian.n_qubits())?;
    let table = overlaps(&d, &reference)?;
    let file = OracleFile {
        entries: table.entries,
        ground_energy: d.ground_energy(),
        l1_bound: p.hamiltonian.l1_norm_bound(),
    };
    emit_json(out, "oracle.json", &file)?;
    Ok(())
}

pub fn sample(
    problem: &ProblemArgs,
    plan_args: &PlanArgs,
    acq: &AcquireArgs,
    out: &Path,
) -> Result<()> {
    let p = problem.load()?;
    let bound = energy_bound(plan_args, Some(&p))?;
    let plan = build_plan(plan_args, bound.value, None)?;
    let signal = acquire_signal_with(&p.hamiltonian, &p.reference, &plan, &options(acq))?;
    write_atomic(&out.join("signal.csv"), |f| Ok(signal.write_csv(f)?))?;
    write_json(
        &out.join("plan.json"),
        &PlanSummary::new(plan, bound.heuristic),
    )
}

fn write_spectrum(out: &Path, spectrum: &Spectrum, peaks: &Peaks, threshold: f64) -> Result<()> {
    write_atomic(&out.join("spectrum.csv"), |f| Ok(spectrum.write_csv(f)?))?;
    write_atomic(&out.join("spectrum_log.csv"), |f| {
        Ok(spectrum.write_log_csv(f)?)
    })?;
    write_json(
        &out.join("estimates.json"),
        &EstimatesFile {
            delta: spectrum.plan().delta(),
            threshold,
            dc: peaks.dc,
            estimates: peaks.estimates.clone(),
        },
    )
}

pub fn analyze(signal_path: &Path, peaks: &PeakArgs, out: &Path) -> Result<()> {
    let file = std::fs::File::open(signal_path)
        .with_context(|| format!("opening {}", signal_path.display()))?;
    let signal =
        Signal::read_csv(file).with_context(|| format!("reading {}", signal_path.display()))?;
    let spectrum = transform(&signal)?;
    let detected = detect_peaks(&spectrum, peaks.threshold);
    write_spectrum(out, &spectrum, &detected, peaks.threshold)
}

pub fn resolve_sign(
    problem: &ProblemArgs,
    plan_args: &PlanArgs,
    acq: &AcquireArgs,
    peak_args: &PeakArgs,
    offset: Option<f64>,
    out: Option<&Path>,
) -> Result<()> {
    let p = problem.load()?;
    let bound = energy_bound(plan_args, Some(&p))?;
    let s0 = offset.unwrap_or_else(|| default_offset(plan_args.delta));
    let plan = build_plan(plan_args, bound.value, Some(s0))?;
    let opts = options(acq);
    let signal = acquire_signal_with(&p.hamiltonian, &p.reference, &plan, &opts)?;
    let base = detect_peaks(&transform(&signal)?, peak_args.threshold);
    let resolution = resolve_signs(
        &p.hamiltonian,
        &p.reference,
        &plan,
        s0,
        &base.estimates,
        peak_args.threshold,
        &opts,
    )?;
    emit_json(out, "resolution.json", &ResolutionFile::from(&resolution))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignMethod {
    Shift,
    AssumeNegative,
    None,
}

#[derive(Serialize)]
struct RunConfig {
    hamiltonian: PathBuf,
    reference: String,
    delta: f64,
    interval: Option<f64>,
    bound: Option<f64>,
    heuristic_bound: bool,
    shots: Option<u64>,
    seed: u64,
    mode: SamplingMode,
    route: Route,
    threshold: f64,
    offset: Option<f64>,
    sign: SignMethod,
    oracle: bool,
}

#[derive(Serialize)]
struct OracleComparison {
    ground_energy: f64,
    l1_bound: f64,
    recovery: RecoveryReport,
}

#[derive(Serialize)]
struct RunReport {
    config: RunConfig,
    energy_bound: EnergyBound,
    plan: SamplingPlan,
    dc: Option<f64>,
    estimates: Vec<EigenEstimate>,
    sign_resolution: Option<ResolutionFile>,
    oracle: Option<OracleComparison>,
}

pub struct RunArgs<'a> {
    pub problem: &'a ProblemArgs,
    pub plan: &'a PlanArgs,
    pub acquire: &'a AcquireArgs,
    pub peaks: &'a PeakArgs,
    pub offset: Option<f64>,
    pub sign: SignMethod,
    pub oracle: bool,
    pub out: &'a Path,
}

/// Runs the full pipeline. Returns whether the oracle comparison (if any)
/// recovered every significant energy.
pub fn run(args: RunArgs<'_>) -> Result<bool> {
    let mut timings = Timings::default();
    let p = timings.time("load", || args.problem.load())?;
    let bound = energy_bound(args.plan, Some(&p))?;
    let s0 = (args.sign == SignMethod::Shift).then(|| {
        args.offset
            .unwrap_or_else(|| default_offset(args.plan.delta))
    });
    let plan = timings.time("plan", || build_plan(args.plan, bound.value, s0))?;
    let opts = options(args.acquire);
    let threshold = args.peaks.threshold;

    let signal = timings.time("acquire", || {
        Ok(acquire_signal_with(
            &p.hamiltonian,
            &p.reference,
            &plan,
            &opts,
        )?)
    })?;
    let spectrum = timings.time("transform", || Ok(transform(&signal)?))?;
    let peaks = detect_peaks(&spectrum, threshold);

    let (estimates, resolution) = match (args.sign, s0) {
        (SignMethod::Shift, Some(s0)) => {
            let r = timings.time("resolve-sign", || {
                Ok(resolve_signs(
                    &p.hamiltonian,
                    &p.reference,
                    &plan,
                    s0,
                    &peaks.estimates,
                    threshold,
                    &opts,
                )?)
            })?;
            (r.signed_estimates(), Some(ResolutionFile::from(&r)))
        }
        (SignMethod::AssumeNegative, _) => (assume_negative(&peaks.estimates), None),
        _ => (peaks.estimates.clone(), None),
    };

    let oracle = if args.oracle {
        Some(timings.time("oracle", || {
            let d = diagonalize(&p.hamiltonian)?;
            let table = overlaps(
                &d,
                &prepare_reference(&p.reference, p.hamiltonian.n_qubits())?,
            )?;
            Ok(OracleComparison {
                ground_energy: d.ground_energy(),
                l1_bound: p.hamiltonian.l1_norm_bound(),
                recovery: recover_report(&peaks, &table, plan.delta(), threshold),
            })
        })?)
    } else {
        None
    };
    let success = oracle.as_ref().is_none_or(|o| o.recovery.success);

    let report = RunReport {
        config: RunConfig {
            hamiltonian: args.problem.hamiltonian.clone(),
            reference: p.reference.to_string(),
            delta: args.plan.delta,
            interval: args.plan.interval,
            bound: args.plan.bound,
            heuristic_bound: args.plan.heuristic_bound,
            shots: args.plan.shots,
            seed: args.acquire.seed,
            mode: args.plan.mode,
            route: args.acquire.route,
            threshold,
            offset: s0,
            sign: args.sign,
            oracle: args.oracle,
        },
        energy_bound: bound,
        plan,
        dc: peaks.dc,
        estimates,
        sign_resolution: resolution,
        oracle,
    };

    let out = args.out;
    timings.time("write", || {
        write_atomic(&out.join("signal.csv"), |f| Ok(signal.write_csv(f)?))?;
        write_spectrum(out, &spectrum, &peaks, threshold)?;
        write_json(&out.join("report.json"), &report)
    })?;
    write_json(&out.join("timings.json"), &timings)?;
    Ok(success)
}
