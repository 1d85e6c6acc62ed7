use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const FLOW: &str = r#"
schema_version = 1
kind = "flow"

[grid]
n = 64
length = 4.0

[profile]
family = "flat_product"
a0 = 1.0
b0 = 1.0

[flow]
t_end = 0.4
track_radius = 0.5
record_stride = 16
"#;

fn warpflow(cwd: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_warpflow"))
        .args(args)
        .current_dir(cwd)
        .env_remove("WARPFLOW_OUT")
        .output()
        .unwrap()
}

fn error_record(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr)
        .unwrap_or_else(|_| panic!("stderr: {}", String::from_utf8_lossy(&out.stderr)))
}

fn entries(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

#[test]
fn flow_run_writes_only_inside_its_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("flow.toml"), FLOW).unwrap();
    let out = warpflow(
        dir.path(),
        &["flow", "run", "--config", "flow.toml", "--out", "run"],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(entries(dir.path()), ["flow.toml", "run"]);
    let run = dir.path().join("run");
    for f in [
        "manifest.json",
        "summary.json",
        "timeseries.csv",
        "final_state.csv",
        "t_sup_rm.svg",
    ] {
        assert!(run.join(f).exists(), "{f}");
    }
    let summary: Value =
        serde_json::from_slice(&std::fs::read(run.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["results"]["reached_t_end"], true);
    let b_sq = summary["results"]["final_b_sq_min"].as_f64().unwrap();
    assert!((b_sq - 0.2).abs() < 1e-4, "{b_sq}");
    let header = std::fs::read_to_string(run.join("timeseries.csv")).unwrap();
    assert!(header.starts_with("t [time],sup_rm [1/length^2]"));

    let report = warpflow(dir.path(), &["report", "--in", "run"]);
    assert_eq!(report.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&report.stdout).unwrap();
    assert_eq!(r["kind"], "flow");
    assert_eq!(r["fingerprint"], summary["fingerprint"]);
}

#[test]
fn default_output_root_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("flow.toml"),
        FLOW.replace("t_end = 0.4", "t_end = 0.01"),
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_warpflow"))
        .args(["flow", "run", "--config", "flow.toml"])
        .current_dir(dir.path())
        .env("WARPFLOW_OUT", "root")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let runs = entries(&dir.path().join("root"));
    assert_eq!(runs.len(), 1);
    assert!(runs[0].starts_with("flow-"));
}

#[test]
fn config_errors_exit_2_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.toml"),
        FLOW.replace("t_end = 0.4", "t_end = 0.4\ncfl = 3"),
    )
    .unwrap();
    let out = warpflow(
        dir.path(),
        &["flow", "run", "--config", "bad.toml", "--out", "run"],
    );
    assert_eq!(out.status.code(), Some(2));
    let rec = error_record(&out);
    assert_eq!(rec["error"], "config_error");
    assert_eq!(rec["key"], "flow.cfl");
    assert!(!dir.path().join("run").exists());

    let missing = warpflow(dir.path(), &["flow", "run", "--config", "nope.toml"]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(error_record(&missing)["exit_code"], 2);

    let args = warpflow(dir.path(), &["moser", "verify", "--seeds", "3"]);
    assert_eq!(args.status.code(), Some(2));
    assert_eq!(error_record(&args)["key"], "<arguments>");
}

#[test]
fn step_limit_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("f.toml"),
        FLOW.replace("t_end = 0.4", "t_end = 0.4\nmax_steps = 5"),
    )
    .unwrap();
    let out = warpflow(
        dir.path(),
        &["flow", "run", "--config", "f.toml", "--out", "run"],
    );
    assert_eq!(out.status.code(), Some(3));
    let summary: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("run/summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["results"]["stop_reason"], "step_limit");
    assert_eq!(
        warpflow(dir.path(), &["report", "--in", "run"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn moser_verify_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = warpflow(
            dir.path(),
            &[
                "moser",
                "verify",
                "--seeds",
                "10",
                "--seed",
                "5",
                "--heat-problems",
                "1",
                "--out",
                out,
            ],
        );
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    for f in [
        "checks.csv",
        "adversarial.csv",
        "summary.json",
        "manifest.json",
    ] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
    let summary: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("a/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["results"]["violations"], 0);
    assert_eq!(summary["results"]["adversarial_detected"], true);
}

const CALIBRATE: &str = r#"
schema_version = 1
kind = "calibrate"
seed = 1

[calibrate]
heights = [10.0, 30.0, 100.0]
collapse_factors = [1.0, 0.1, 0.01]
n = 128
heat_problems = 2
heat_n = 64
"#;

#[test]
fn calibrate_writes_a_baseline_and_detects_drift() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("suite.toml"), CALIBRATE).unwrap();
    let first = warpflow(
        dir.path(),
        &["calibrate", "--suite", "suite.toml", "--out", "first"],
    );
    assert_eq!(
        first.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    let base_path = dir.path().join("first/baseline.json");
    let base: Value = serde_json::from_slice(&std::fs::read(&base_path).unwrap()).unwrap();
    let listed = base["entries"].as_array().unwrap();
    assert_eq!(listed.len(), 7);
    let manifest: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("first/manifest.json")).unwrap())
            .unwrap();
    assert!(listed
        .iter()
        .all(|e| e["fingerprint"] == manifest["fingerprint"]));
    assert_eq!(entries(&dir.path().join("first/members")).len(), 12);

    let again = warpflow(
        dir.path(),
        &[
            "calibrate",
            "--suite",
            "suite.toml",
            "--out",
            "second",
            "--baseline",
            "first/baseline.json",
        ],
    );
    assert_eq!(again.status.code(), Some(0));

    let mut tampered = base.clone();
    let v = tampered["entries"][1]["value"].as_f64().unwrap();
    tampered["entries"][1]["value"] = (v * 1.5).into();
    std::fs::write(
        dir.path().join("tampered.json"),
        serde_json::to_vec(&tampered).unwrap(),
    )
    .unwrap();
    let drift = warpflow(
        dir.path(),
        &[
            "calibrate",
            "--suite",
            "suite.toml",
            "--out",
            "third",
            "--baseline",
            "tampered.json",
        ],
    );
    assert_eq!(drift.status.code(), Some(1));
    let summary: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("third/summary.json")).unwrap())
            .unwrap();
    let flagged: Vec<&Value> = summary["results"]["drift"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|d| d["within"] == false)
        .collect();
    assert_eq!(flagged.len(), 1);
}

#[test]
fn too_small_calibration_suite_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("suite.toml"),
        CALIBRATE.replace("heights = [10.0, 30.0, 100.0]", "heights = [10.0]"),
    )
    .unwrap();
    let out = warpflow(
        dir.path(),
        &["calibrate", "--suite", "suite.toml", "--out", "x"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["key"], "calibrate");
}
