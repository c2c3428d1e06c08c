//! The `lerwlab` binary: exit codes, artifact schema and reruns.

use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_lerwlab");

fn run(args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.display().to_string()
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["growth", "--samples", "many"]).status.code(), Some(2));
}

#[test]
fn invalid_parameters_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let res = run(&["--out", &out, "lerw-sample", "--radius=-3"]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("invalid input"));
    let res = run(&["--out", &out, "growth", "--radii", "8,16", "--samples", "10"]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn growth_writes_csv_fit_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let res = run(&["--out", &out, "growth", "--radii", "4,8,16", "--samples", "100"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = std::fs::read_to_string(dir.path().join("growth.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("experiment,n,estimate,stderr,samples"));
    assert_eq!(lines.count(), 3);
    let fit: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("growth_fit.json")).unwrap()).unwrap();
    assert!(fit[0][1]["slope"].as_f64().unwrap() > 1.0);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 42);
    assert!(manifest["command_line"].as_array().unwrap().len() > 3);
    assert!(manifest["finished_unix"].as_f64().unwrap() >= manifest["started_unix"].as_f64().unwrap());
}

#[test]
fn lerw_sample_writes_one_path_per_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    let res = run(&["--out", &out, "--seed", "5", "lerw-sample", "--radius", "6", "--samples", "4"]);
    assert!(res.status.success());
    let text = std::fs::read_to_string(dir.path().join("paths.jsonl")).unwrap();
    let paths: Vec<Vec<[i32; 2]>> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(paths.len(), 4);
    for p in paths {
        assert_eq!(p[0], [0, 0]);
        let [x, y] = *p.last().unwrap();
        assert!(((x * x + y * y) as f64).sqrt() >= 6.0);
    }
}

#[test]
fn seed_changes_output_and_rerun_does_not() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let args = |dir: &Path, seed: &str, workers: &str| {
        let out = out_arg(dir);
        run(&["--out", &out, "--seed", seed, "--workers", workers, "moments", "--radii", "4,6,8", "--samples", "30"])
    };
    assert!(args(a.path(), "1", "1").status.success());
    assert!(args(b.path(), "1", "3").status.success());
    assert!(args(c.path(), "2", "2").status.success());
    let read = |d: &Path| std::fs::read(d.join("moments.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    assert_ne!(read(a.path()), read(c.path()));
}
