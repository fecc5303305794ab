use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const DEVIATION: &str = r#"{
  "experiment": "deviation",
  "generator": {"variant": "product_rademacher", "params": {}, "d": 2},
  "shape": [8, 8],
  "x_grid": [0.5, 1.0, 2.0],
  "seed": 17,
  "replicas": 300
}"#;

const BOUNDED: &str = r#"{
  "experiment": "verify-bound",
  "generator": {"variant": "iid_symmetric", "params": {"dist": "rademacher"}, "d": 2},
  "shape": [8, 8],
  "x_grid": [48.0, 200.0],
  "bound": {"kind": "bounded"},
  "seed": 3,
  "replicas": 200
}"#;

fn orthofield(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orthofield"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn payload(path: &Path) -> Value {
    let mut v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("run_info");
    v
}

#[test]
fn verify_bound_writes_report_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", BOUNDED);
    let out = dir.path().join("report.json");
    let csv = dir.path().join("table.csv");
    let o = orthofield(&[
        "verify-bound",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = payload(&out);
    assert_eq!(report["experiment"], "verify-bound");
    assert_eq!(report["pass"], true);
    assert_eq!(report["config"]["seed"], 3);
    assert!(report["constants"]["K_levels"].is_array());
    assert!(report["tolerances"].is_object());
    let table = fs::read_to_string(&csv).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("x,estimate,ci_lo,ci_hi,bound,verdict"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn missing_config_exits_one() {
    let o = orthofield(&["deviation", "--config", "/nonexistent/cfg.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("reading config"));
}

#[test]
fn malformed_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", "{\"experiment\": \"deviation\", \"seed\": 1");
    assert_eq!(orthofield(&["deviation", "--config", &cfg]).status.code(), Some(1));
    let cfg = write_config(dir.path(), "unsorted.json", &DEVIATION.replace("[0.5, 1.0, 2.0]", "[2.0, 1.0]"));
    assert_eq!(orthofield(&["deviation", "--config", &cfg]).status.code(), Some(1));
}

#[test]
fn subcommand_must_match_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", DEVIATION);
    let o = orthofield(&["tightness", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(orthofield(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(orthofield(&["deviation"]).status.code(), Some(1));
    assert_eq!(orthofield(&["--help"]).status.code(), Some(0));
}

#[test]
fn failing_verdict_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{
      "experiment": "fdd",
      "generator": {"variant": "product_rademacher", "params": {}, "d": 2},
      "shape": [64, 64],
      "points": [[1.0, 1.0]],
      "seed": 5,
      "replicas": 2000
    }"#;
    let cfg = write_config(dir.path(), "cfg.json", body);
    let o = orthofield(&["fdd", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["pass"], false);
}

#[test]
fn threads_and_reruns_do_not_change_the_payload() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", DEVIATION);
    let mut payloads = Vec::new();
    for (i, threads) in ["1", "8", "8"].iter().enumerate() {
        let out = dir.path().join(format!("r{i}.json"));
        let o = orthofield(&[
            "deviation",
            "--config",
            &cfg,
            "--threads",
            threads,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        payloads.push(payload(&out));
    }
    assert_eq!(payloads[0], payloads[1]);
    assert_eq!(payloads[1], payloads[2]);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", DEVIATION);
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    orthofield(&["deviation", "--config", &cfg, "--out", a.to_str().unwrap()]);
    orthofield(&["deviation", "--config", &cfg, "--seed", "99", "--out", b.to_str().unwrap()]);
    let (a, b) = (payload(&a), payload(&b));
    assert_eq!(a["config"]["seed"], 17);
    assert_eq!(b["config"]["seed"], 99);
    assert_ne!(a["table"], b["table"]);
}

#[test]
fn output_field_in_config_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from_config.json");
    let body = DEVIATION.replace(
        "\"seed\": 17,",
        &format!("\"seed\": 17, \"output\": {:?},", target.to_str().unwrap()),
    );
    let cfg = write_config(dir.path(), "cfg.json", &body);
    let o = orthofield(&["deviation", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(payload(&target)["experiment"], "deviation");
}

#[test]
fn zero_threads_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cfg.json", DEVIATION);
    assert_eq!(
        orthofield(&["deviation", "--config", &cfg, "--threads", "0"]).status.code(),
        Some(1)
    );
}
