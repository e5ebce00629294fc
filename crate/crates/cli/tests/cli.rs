use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dbar(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dbar"))
        .args(args)
        .env("DBAR_OUTPUT_DIR", out)
        .output()
        .expect("binary runs")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn solve_dirichlet_catalog_case() {
    let dir = tempfile::tempdir().unwrap();
    let o = dbar(dir.path(), &["solve", "--domain", "disk", "--problem", "dirichlet", "--case", "poly3", "--p", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(dir.path());
    assert_eq!(r["verdict"], "accepted");
    assert!(r["residual"].as_f64().unwrap() <= 1e-8);
    assert!(dir.path().join("trace.csv").exists());
    assert!(dir.path().join("data.csv").exists());
}

#[test]
fn robin_counterexample_exits_with_compatibility_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = dbar(dir.path(), &["solve", "--domain", "disk", "--problem", "robin", "--b", "-1", "--r", "0"]);
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("compatibility: |exp(i∫b)−1| = 0"), "{err}");
}

#[test]
fn conj_membership_is_rejected_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = dbar(dir.path(), &["membership", "--problem", "dirichlet", "--data", "conj"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("rejected: "));
    let r = report(dir.path());
    assert_eq!(r["verdict"], "rejected");
    assert!((r["residual"].as_f64().unwrap() - 1.0).abs() < 0.01);
}

#[test]
fn csv_round_trip_reproduces_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let o = dbar(&first, &["membership", "--domain", "square", "--n", "256", "--case", "exp", "--no-refine"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let a = report(&first);
    let second = dir.path().join("second");
    let csv = first.join("data.csv");
    let o = dbar(&second, &["membership", "--domain", "square", "--n", "256", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let b = report(&second);
    assert_eq!(a["verdict"], b["verdict"]);
    let (ra, rb) = (a["residual"].as_f64().unwrap(), b["residual"].as_f64().unwrap());
    assert!((ra - rb).abs() <= 1e-12, "{ra} vs {rb}");
}

#[test]
fn reports_are_deterministic_apart_from_runtime() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(k.to_string());
        let o = dbar(&out, &["solve", "--domain", "ellipse:1.5,1", "--problem", "regularity", "--case", "exp"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let mut r = report(&out);
        r.as_object_mut().unwrap().remove("runtime_seconds");
        reports.push(serde_json::to_string(&r).unwrap());
        assert_eq!(std::fs::read(out.join("trace.csv")).unwrap(), std::fs::read(dir.path().join("0/trace.csv")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# Neumann on the unit disk\nproblem = neumann\ndata = 2*z^2\nalpha = 0\nn = 128\n").unwrap();
    let o = dbar(dir.path(), &["solve", "--config", cfg.to_str().unwrap(), "--n", "256"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = report(dir.path());
    assert_eq!(r["problem"], "neumann");
    assert_eq!(r["n_nodes"], 256);
    assert!(r["checks"]["value_at_alpha"].as_f64().unwrap() <= 1e-10);

    std::fs::write(&cfg, "problem = neumann\ndata = 1\n").unwrap();
    let o = dbar(dir.path(), &["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn robin_rejection_still_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = dbar(dir.path(), &["solve", "--problem", "robin", "--r", "conj(z)"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert_eq!(report(dir.path())["verdict"], "rejected");
}

#[test]
fn converge_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = dbar(dir.path(), &["converge", "--case", "poly3", "--sizes", "64,128,256"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let dat = std::fs::read_to_string(dir.path().join("convergence.dat")).unwrap();
    assert_eq!(dat.lines().filter(|l| !l.starts_with('#')).count(), 3);
    let table: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("convergence.json")).unwrap()).unwrap();
    let errors: Vec<f64> = table["errors"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]));
    assert!(errors[2] <= 1e-9);
}

#[test]
fn demo_nonuniqueness_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let o = dbar(dir.path(), &["demo-nonuniqueness"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("nonuniqueness.json")).unwrap()).unwrap();
    assert_eq!(r["passed"], true);
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["solve"],
        vec!["solve", "--case", "poly3", "--data", "z"],
        vec!["solve", "--data", "sin(z)"],
        vec!["solve", "--case", "nope"],
        vec!["solve", "--domain", "torus", "--case", "poly3"],
        vec!["bogus"],
        vec!["solve", "--case", "poly3", "--p", "abc"],
    ] {
        let o = dbar(dir.path(), &args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
        assert_eq!(stderr(&o).lines().count(), 1, "{args:?}");
    }
}
