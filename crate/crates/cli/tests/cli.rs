use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qcos_core::{Signal, Spectrum};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn qcos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcos"))
        .args(args)
        .output()
        .unwrap()
}

fn qcos_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcos"))
        .args(args)
        .env(key, value)
        .output()
        .unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

/// Seeded 4-qubit Hamiltonian text from a splitmix64 stream.
fn random_four_qubit(mut seed: u64) -> String {
    let mut next = || {
        seed = seed.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = seed;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    };
    let mut text = String::from("qubits 4\n");
    for _ in 0..8 {
        let coeff = (next() >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0;
        text.push_str(&format!("{coeff:?}"));
        for q in 0..4 {
            match next() % 4 {
                1 => text.push_str(&format!(" X{q}")),
                2 => text.push_str(&format!(" Y{q}")),
                3 => text.push_str(&format!(" Z{q}")),
                _ => {}
            }
        }
        text.push('\n');
    }
    text
}

#[test]
fn plan_reports_chemical_accuracy_grid() {
    let v = stdout_json(&qcos(&["plan", "--delta", "0.0016", "--bound", "2.1664"]));
    assert!(v["t_max"].as_f64().unwrap() > 3926.9);
    assert!((v["max_interval"].as_f64().unwrap() - 1.45).abs() < 0.01);
    assert!(v["interval"].as_f64().unwrap() <= 1.45);
    let count = v["count"].as_u64().unwrap();
    assert_eq!(v["evaluations"].as_u64().unwrap(), count.div_ceil(2));
}

#[test]
fn plan_echoes_grid_invariant() {
    let v = stdout_json(&qcos(&["plan", "--delta", "0.1", "--bound", "1.0"]));
    assert!((v["max_interval"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-12);
    let count = v["count"].as_u64().unwrap();
    assert_eq!(count % 2, 1);
    let product = v["delta"].as_f64().unwrap() * v["interval"].as_f64().unwrap() * count as f64;
    assert!((product - std::f64::consts::TAU).abs() < 1e-12);
}

#[test]
fn plan_rejects_aliasing_interval() {
    let out = qcos(&[
        "plan",
        "--delta",
        "0.0016",
        "--bound",
        "2.1664",
        "--interval",
        "2.0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1.450"));
}

#[test]
fn run_recovers_fixture_with_signs() {
    let dir = tempfile::tempdir().unwrap();
    let ham = fixture("two_level.ham");
    let out = qcos(&[
        "run",
        "--hamiltonian",
        ham.to_str().unwrap(),
        "--ref",
        "0",
        "--delta",
        "0.001",
        "--oracle",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let report = json(&dir.path().join("report.json"));
    assert_eq!(report["oracle"]["recovery"]["success"], Value::Bool(true));
    let delta = report["plan"]["delta"].as_f64().unwrap();
    let r = 1.25f64.sqrt();
    for expected in [0.2 - r, 0.2 + r] {
        let found = report["estimates"].as_array().unwrap().iter().any(|e| {
            e["energy"]
                .as_f64()
                .is_some_and(|energy| (energy - expected).abs() <= delta)
        });
        assert!(found, "no signed estimate near {expected}");
    }
}

#[test]
fn run_outputs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let ham = fixture("two_level.ham");
    let out = qcos(&[
        "run",
        "--hamiltonian",
        ham.to_str().unwrap(),
        "--delta",
        "0.01",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let signal =
        Signal::read_csv(std::fs::File::open(dir.path().join("signal.csv")).unwrap()).unwrap();
    let spectrum =
        Spectrum::read_csv(std::fs::File::open(dir.path().join("spectrum.csv")).unwrap()).unwrap();
    let report = json(&dir.path().join("report.json"));
    assert_eq!(
        signal.plan().count() as u64,
        report["plan"]["count"].as_u64().unwrap()
    );
    assert_eq!(spectrum.max_bin(), (signal.len() - 1) / 2);

    let log = std::fs::read_to_string(dir.path().join("spectrum_log.csv")).unwrap();
    let mut lines = log.lines();
    assert_eq!(lines.next(), Some("x,log10_a"));
    for line in lines {
        let mut cols = line.split(',');
        cols.next().unwrap().parse::<f64>().unwrap();
        cols.next().unwrap().parse::<f64>().unwrap();
    }

    let estimates = json(&dir.path().join("estimates.json"));
    assert!(!estimates["estimates"].as_array().unwrap().is_empty());
    assert!(json(&dir.path().join("timings.json"))
        .get("acquire")
        .is_some());
}

#[test]
fn exact_runs_are_byte_identical_across_workers() {
    let ham = fixture("two_level.ham");
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |dir: &Path| {
        vec![
            "run".to_string(),
            "--hamiltonian".into(),
            ham.to_str().unwrap().into(),
            "--delta".into(),
            "0.005".into(),
            "--oracle".into(),
            "--out".into(),
            dir.to_str().unwrap().into(),
        ]
    };
    let run = |dir: &Path, workers: &str| {
        let args = args(dir);
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert!(qcos_env(&args, "QCOS_WORKERS", workers).status.success());
    };
    run(a.path(), "1");
    run(b.path(), "4");
    for file in [
        "report.json",
        "signal.csv",
        "spectrum.csv",
        "estimates.json",
    ] {
        assert_eq!(
            std::fs::read(a.path().join(file)).unwrap(),
            std::fs::read(b.path().join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn shot_runs_repeat_with_seed() {
    let ham = fixture("two_level.ham");
    let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
    for (dir, seed) in dirs.iter().zip(["5", "5", "6"]) {
        let out = qcos(&[
            "sample",
            "--hamiltonian",
            ham.to_str().unwrap(),
            "--delta",
            "0.05",
            "--shots",
            "200",
            "--seed",
            seed,
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let read = |i: usize| std::fs::read(dirs[i].path().join("signal.csv")).unwrap();
    assert_eq!(read(0), read(1));
    assert_ne!(read(0), read(2));
}

#[test]
fn random_four_qubit_run_recovers_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let ham = dir.path().join("random4.ham");
    std::fs::write(&ham, random_four_qubit(2024)).unwrap();
    let out = qcos(&[
        "run",
        "--hamiltonian",
        ham.to_str().unwrap(),
        "--ref",
        "0101",
        "--delta",
        "0.005",
        "--route",
        "direct",
        "--no-sign",
        "--oracle",
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    let report = json(&dir.path().join("out/report.json"));
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        report["oracle"]["recovery"]["oracle"]
    );
}

#[test]
fn understated_bound_fails_oracle_check() {
    let dir = tempfile::tempdir().unwrap();
    let ham = fixture("two_level.ham");
    let out = qcos(&[
        "run",
        "--hamiltonian",
        ham.to_str().unwrap(),
        "--delta",
        "0.01",
        "--bound",
        "0.4",
        "--no-sign",
        "--oracle",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(
        json(&dir.path().join("report.json"))["oracle"]["recovery"]["success"],
        Value::Bool(false)
    );
}

#[test]
fn analyze_rejects_even_length_signal() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("even.csv");
    std::fs::write(&csv, "n,t,q\n0,0.0,1.0\n1,0.5,0.9\n").unwrap();
    let out = qcos(&[
        "analyze",
        csv.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("odd"));
}

#[test]
fn oracle_reads_reference_file() {
    let dir = tempfile::tempdir().unwrap();
    let reference = dir.path().join("ref.txt");
    std::fs::write(&reference, "0 1\n1 1\n").unwrap();
    let ham = fixture("two_level.ham");
    let v = stdout_json(&qcos(&[
        "oracle",
        "--hamiltonian",
        ham.to_str().unwrap(),
        "--ref",
        &format!("@{}", reference.display()),
    ]));
    let total: f64 = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["weight"].as_f64().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert!((v["ground_energy"].as_f64().unwrap() - (0.2 - 1.25f64.sqrt())).abs() < 1e-12);
    assert!((v["l1_bound"].as_f64().unwrap() - 1.7).abs() < 1e-12);
}

#[test]
fn resolve_sign_reports_both_signs() {
    let ham = fixture("two_level.ham");
    let v = stdout_json(&qcos(&[
        "resolve-sign",
        "--hamiltonian",
        ham.to_str().unwrap(),
        "--delta",
        "0.001",
    ]));
    assert_eq!(v["s0"].as_f64(), Some(0.05));
    let signs: Vec<&str> = v["pairs"].as_array().unwrap()[..2]
        .iter()
        .map(|p| p["sign"].as_str().unwrap())
        .collect();
    assert_eq!(signs, ["positive", "negative"]);
}

#[test]
fn collision_is_reported_ambiguous() {
    let dir = tempfile::tempdir().unwrap();
    let ham = dir.path().join("z.ham");
    std::fs::write(&ham, "1.0 Z0\n").unwrap();
    let v = stdout_json(&qcos(&[
        "resolve-sign",
        "--hamiltonian",
        ham.to_str().unwrap(),
        "--ref",
        "0:1,1:1",
        "--delta",
        "0.001",
    ]));
    assert_eq!(v["pairs"][0]["sign"], "ambiguous");
}

#[test]
fn bad_hamiltonian_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let ham = dir.path().join("bad.ham");
    std::fs::write(&ham, "1.0 Z0\n0.5 Q1\n").unwrap();
    let out = qcos(&["oracle", "--hamiltonian", ham.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}
