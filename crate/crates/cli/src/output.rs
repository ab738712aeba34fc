use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use qcos_core::{EigenEstimate, OverlapEntry, ShiftSign, SignResolution};
use serde::Serialize;

/// Writes through a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, write: impl FnOnce(&mut fs::File) -> Result<()>) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| -> Result<()> {
        let mut file = fs::File::create(&tmp)?;
        write(&mut file)?;
        file.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.with_context(|| format!("writing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, |f| {
        serde_json::to_writer_pretty(&mut *f, value)?;
        f.write_all(b"\n")?;
        Ok(())
    })
}

pub fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => Ok(other?),
    }
}

/// JSON to `dir/name` when `dir` is given, stdout otherwise.
pub fn emit_json<T: Serialize>(
    dir: Option<&Path>,
    name: &str,
    value: &T,
) -> Result<Option<PathBuf>> {
    match dir {
        Some(dir) => {
            let path = dir.join(name);
            write_json(&path, value)?;
            Ok(Some(path))
        }
        None => print_json(value).map(|_| None),
    }
}

#[derive(Debug, Serialize)]
pub struct PlanSummary {
    pub max_interval: f64,
    pub interval: f64,
    pub count: usize,
    pub delta: f64,
    pub t_max: f64,
    pub energy_bound: f64,
    pub heuristic_bound: bool,
    pub evaluations: usize,
    pub plan: qcos_core::SamplingPlan,
}

impl PlanSummary {
    pub fn new(plan: qcos_core::SamplingPlan, heuristic_bound: bool) -> Self {
        Self {
            max_interval: plan.max_interval(),
            interval: plan.interval(),
            count: plan.count(),
            delta: plan.delta(),
            t_max: plan.t_max(),
            energy_bound: plan.energy_bound(),
            heuristic_bound,
            evaluations: plan.evaluations(),
            plan,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EstimatesFile {
    pub delta: f64,
    pub threshold: f64,
    pub dc: Option<f64>,
    pub estimates: Vec<EigenEstimate>,
}

#[derive(Debug, Serialize)]
pub struct OracleFile {
    pub entries: Vec<OverlapEntry>,
    pub ground_energy: f64,
    pub l1_bound: f64,
}

#[derive(Debug, Serialize)]
pub struct ResolutionPair {
    pub base_abs_energy: f64,
    pub shifted_abs_energy: Option<f64>,
    pub shift: Option<f64>,
    pub sign: ShiftSign,
    pub signed_energy: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct ResolutionFile {
    pub s0: f64,
    pub pairs: Vec<ResolutionPair>,
}

impl From<&SignResolution> for ResolutionFile {
    fn from(r: &SignResolution) -> Self {
        Self {
            s0: r.s0,
            pairs: r
                .pairs
                .iter()
                .map(|p| ResolutionPair {
                    base_abs_energy: p.base.abs_energy,
                    shifted_abs_energy: p.shifted.map(|s| s.abs_energy),
                    shift: p.shift,
                    sign: p.sign,
                    signed_energy: p.signed_energy(),
                })
                .collect(),
        }
    }
}
