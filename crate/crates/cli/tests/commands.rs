use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fractalab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fractalab"))
        .args(args)
        .current_dir(dir)
        .env_remove("FRACTALAB_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn workspace() -> TempDir {
    let dir = TempDir::new().unwrap();
    let out = fractalab(dir.path(), &["gallery", "export", "--dir", "g"]);
    assert!(out.status.success());
    dir
}

#[test]
fn dim_prints_value_and_writes_report() {
    let dir = workspace();
    let out = fractalab(dir.path(), &["dim", "--ifs", "g/cantor.json", "--tol", "1e-10"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "0.6309297535714574");
    let report = read_json(&dir.path().join("dim.json"));
    assert_eq!(report["result"]["certified"], true);
    let manifest = read_json(&dir.path().join("dim.manifest.json"));
    assert_eq!(manifest["config_hash"], report["config_hash"]);
    assert_eq!(manifest["reports"][0], "dim.json");
}

#[test]
fn pressure_at_zero_is_log_two() {
    let dir = workspace();
    let out = fractalab(dir.path(), &["pressure", "--ifs", "g/cantor.json", "--s", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "0.6931471805599453");
}

#[test]
fn target_reports_series_bound_and_boxcount_table() {
    let dir = workspace();
    let out = fractalab(dir.path(), &["target", "--ifs", "g/cantor.json", "--x0", "0", "--delta", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("target.json"));
    let entry = &report["result"]["deltas"][0];
    let bound = entry["series_bound"]["value"].as_f64().unwrap();
    assert!((bound - 0.5 * 2f64.ln() / 3f64.ln()).abs() < 1e-12);
    assert!(entry["boxcount"]["boxcount"].as_array().unwrap().len() >= 5);

    let out = fractalab(
        dir.path(),
        &["target", "--ifs", "g/cantor.json", "--x0", "0", "--delta", "2", "--format", "csv"],
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("target.csv")).unwrap();
    assert!(csv.starts_with("delta,eps,N,logN\n2,"));
}

#[test]
fn validate_flags_budget_and_contraction() {
    let dir = workspace();
    let out = fractalab(dir.path(), &["validate", "--ifs", "g/cantor.json"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("open set condition holds"));

    let out = fractalab(dir.path(), &["validate", "--ifs", "g/cantor.json", "--kmax", "40"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("2^40 = 1099511627776"));

    std::fs::write(
        dir.path().join("bad.json"),
        r#"{"dim": 1, "maps": [{"kind": "similarity", "ratio": 1.1, "translation": [0]}],
           "bounding_ball": {"center": [0], "radius": 1}}"#,
    )
    .unwrap();
    let out = fractalab(dir.path(), &["validate", "--ifs", "bad.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("error[contraction]"));
}

#[test]
fn malformed_ifs_reports_line_and_column() {
    let dir = workspace();
    std::fs::write(dir.path().join("broken.json"), "{\n  \"dim\": 1,\n  \"maps\": [,]\n}").unwrap();
    let out = fractalab(dir.path(), &["dim", "--ifs", "broken.json"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3, column"), "{err}");
}

#[test]
fn wide_bracket_exits_inconclusive() {
    let dir = workspace();
    let out = fractalab(
        dir.path(),
        &["dim", "--ifs", "g/nonlinear-cantor.json", "--certify-width", "1e-9"],
    );
    assert_eq!(out.status.code(), Some(2));
    let report = read_json(&dir.path().join("dim.json"));
    assert_eq!(report["outcome"], "inconclusive");
    assert!(!report["result"]["ladder"].as_array().unwrap().is_empty());
}

#[test]
fn budget_overflow_keeps_partial_ladder() {
    let dir = workspace();
    let out = Command::new(env!("CARGO_BIN_EXE_fractalab"))
        .args(["pressure", "--ifs", "g/nonlinear-cantor.json", "--s", "0.5", "--kmax", "12"])
        .current_dir(dir.path())
        .env("FRACTALAB_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let report = read_json(&dir.path().join("pressure.json"));
    assert_eq!(report["result"]["error"], "budget-exceeded");
    assert!(!report["result"]["partial"].as_array().unwrap().is_empty());
    let manifest = read_json(&dir.path().join("pressure.manifest.json"));
    assert!(manifest["warnings"][0].as_str().unwrap().contains("budget"));
}

#[test]
fn run_config_matches_direct_invocation() {
    let dir = workspace();
    std::fs::write(
        dir.path().join("exp.json"),
        r#"{"ifs": "g/cantor.json", "seed": 0, "out": "from-config.json",
            "task": {"command": "cutset", "r": 0.01}}"#,
    )
    .unwrap();
    let out = fractalab(dir.path(), &["run", "--config", "exp.json"]);
    assert_eq!(out.status.code(), Some(0));
    let direct = fractalab(dir.path(), &["cutset", "--ifs", "g/cantor.json", "--r", "0.01", "--out", "direct.json"]);
    assert_eq!(direct.status.code(), Some(0));
    let a = read_json(&dir.path().join("from-config.json"));
    let b = read_json(&dir.path().join("direct.json"));
    assert_eq!(a["result"], b["result"]);
    assert_eq!(a["config_hash"], b["config_hash"]);
    assert_eq!(a["result"]["size"], 32);
}

#[test]
fn content_writes_cover_dump_and_ledger() {
    let dir = workspace();
    let out = fractalab(
        dir.path(),
        &[
            "content", "--ifs", "g/cantor.json", "--s", "0.5,0.9", "--grid-scale", "0.001", "--samples", "5000",
            "--format", "csv",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("content.csv")).unwrap();
    assert!(csv.starts_with("s,eta,grid_scale,value,retained_mass\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 2);
    let manifest = read_json(&dir.path().join("content.manifest.json"));
    let reports: Vec<&str> = manifest["reports"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(reports, ["content.csv", "content.covers.json"]);
    for r in reports {
        assert!(dir.path().join(r).exists());
    }
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = workspace();
    for run in ["a", "b"] {
        let out = fractalab(
            dir.path(),
            &["full-report", "--ifs", "g/conformal-rotations.json", "--seed", "3", "--out", &format!("{run}.json")],
        );
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn usage_errors_exit_one() {
    let dir = workspace();
    let out = fractalab(dir.path(), &["dim"]);
    assert_eq!(out.status.code(), Some(1));
    let out = fractalab(dir.path(), &["--help"]);
    assert_eq!(out.status.code(), Some(0));
}
