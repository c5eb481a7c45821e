use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lieco(args: &[&str], cache_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lieco"));
    cmd.args(args).env_remove("LIECO_CACHE_DIR");
    if let Some(dir) = cache_env {
        cmd.env("LIECO_CACHE_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const TRIVIAL_M0: &str = r#"{
  "algebra": {"family": "m0", "K": 5},
  "coefficients": {"kind": "trivial", "W": 0, "N": 0},
  "task": "cohomology",
  "q": 2,
  "lambda_range": [0, 6]
}"#;

fn stripped(path: &Path) -> Value {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("run");
    v
}

#[test]
fn syntax_error_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let job = write(dir.path(), "bad.json", "{\n  \"algebra\": {\"family\": \"h\", \"K\": 4},\n  \"task\" \"cohomology\"\n}");
    let out = lieco(&["cohomology", "--job", &job], None);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn unknown_field_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let job = write(dir.path(), "bad.json", r#"{"algebra": {"family": "h", "K": 4}, "task": "validate", "lamda": 2}"#);
    let out = lieco(&["validate", "--job", &job], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lamda"));
}

#[test]
fn subcommand_must_match_task() {
    let dir = tempfile::tempdir().unwrap();
    let job = write(dir.path(), "job.json", TRIVIAL_M0);
    let out = lieco(&["sweep", "--job", &job], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cohomology"));
}

#[test]
fn missing_job_file() {
    let out = lieco(&["validate", "--job", "/nonexistent/job.json"], None);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cohomology_report_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let job = write(dir.path(), "job.json", TRIVIAL_M0);
    let first = dir.path().join("first.json");
    let out = lieco(&["cohomology", "--job", &job, "--out", first.to_str().unwrap()], Some(&cache));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("passed"));

    let report: Value = serde_json::from_str(&std::fs::read_to_string(&first).unwrap()).unwrap();
    assert_eq!(report["tool"], "lieco");
    assert_eq!(report["task"], "cohomology");
    assert_eq!(report["passed"], true);
    let entries = report["results"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 7);
    let dims: Vec<u64> = entries.iter().map(|e| e["dim"].as_u64().unwrap()).collect();
    // Weight 6 exceeds K, so it is answered on a larger truncation, where
    // e1*∧e5* is no longer closed.
    assert_eq!(dims, vec![0, 0, 0, 0, 0, 1, 0]);
    for e in entries {
        let exact = e["lambda"].as_i64().unwrap() <= 5;
        assert_eq!(e["window"]["kind"] == "exact", exact, "{e}");
        for term in e["terms"].as_array().unwrap().iter().flat_map(|t| t.as_array().unwrap()) {
            let c = term["coeff"].as_str().unwrap();
            assert!(c.parse::<i64>().is_ok() || c.split_once('/').is_some(), "{c}");
        }
    }
    assert_eq!(report["run"]["cache"]["misses"], 7);
    assert!(std::fs::read_dir(&cache).unwrap().count() >= 7);

    let second = dir.path().join("second.json");
    let out = lieco(&["cohomology", "--job", &job, "--out", second.to_str().unwrap()], Some(&cache));
    assert!(out.status.success());
    let again: Value = serde_json::from_str(&std::fs::read_to_string(&second).unwrap()).unwrap();
    assert_eq!(again["run"]["cache"]["hits"], 7);
    assert_eq!(again["run"]["cache"]["misses"], 0);
    assert_eq!(stripped(&first), stripped(&second));
}

#[test]
fn worker_count_does_not_change_reports() {
    let dir = tempfile::tempdir().unwrap();
    let job = write(
        dir.path(),
        "sweep.json",
        r#"{"algebra": {"family": "h", "K": 3},
            "coefficients": {"kind": "adjoint", "W": 3, "N": 1},
            "task": "sweep", "q": 1, "lambda_range": [0, 1],
            "grid": {"K": [3, 4], "W": [3, 4], "N": [1, 2], "lockstep": true}}"#,
    );
    let mut reports = Vec::new();
    for n in ["1", "3"] {
        let out_path = dir.path().join(format!("r{n}.json"));
        let out = lieco(&["sweep", "--job", &job, "--jobs", n, "--out", out_path.to_str().unwrap()], None);
        assert!(out.status.code() == Some(0) || out.status.code() == Some(2), "{}", String::from_utf8_lossy(&out.stderr));
        reports.push(std::fs::read_to_string(&out_path).unwrap());
    }
    let strip = |s: &str| {
        let mut v: Value = serde_json::from_str(s).unwrap();
        v.as_object_mut().unwrap().remove("run");
        serde_json::to_string_pretty(&v).unwrap()
    };
    assert_eq!(strip(&reports[0]), strip(&reports[1]));
}

#[test]
fn validate_and_verify_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let job = write(dir.path(), "v.json", r#"{"algebra": {"family": "h", "K": 6}, "task": "validate"}"#);
    let out = lieco(&["validate", "--job", &job], None);
    assert!(out.status.success());
    let job = write(
        dir.path(),
        "c.json",
        r#"{"algebra": {"family": "m0", "K": 6}, "coefficients": {"kind": "trivial", "W": 0, "N": 0},
            "task": "verify", "classes": ["e1_dual", "omega(3,4)"]}"#,
    );
    let out_path = dir.path().join("c_out.json");
    let out = lieco(&["verify", "--job", &job, "--out", out_path.to_str().unwrap()], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    for e in report["results"]["entries"].as_array().unwrap() {
        assert_eq!(e["cocycle"], true, "{e}");
        assert_eq!(e["coboundary"], false, "{e}");
    }
}
