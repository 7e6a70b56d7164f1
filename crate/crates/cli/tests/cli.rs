use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn yamabe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_yamabe"))
        .args(args)
        .env_remove("YAMABE_OUT_DIR")
        .output()
        .expect("spawn yamabe")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn verify_constants_default_table_passes() {
    let out = yamabe(&["verify-constants"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "verify-constants");
    assert_eq!(v["passed"], true);
    assert_eq!(v["failures"], 0);
    let rows = v["rows"].as_array().unwrap();
    assert!(rows.iter().all(|r| r["match"] == "exact"));
    assert!(rows.iter().any(|r| r["dim"] == 5 && r["name"] == "max_value" && r["computed"] == "3/2560 + 0*pi"));
}

#[test]
fn verify_constants_tampered_table_fails() {
    let mut table: Vec<Value> = serde_json::from_str(include_str!("../src/expected.json")).unwrap();
    let row = table.iter_mut().find(|r| r["dim"] == 5 && r["name"] == "max_value").unwrap();
    row["expected"] = Value::from("3/2561");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.json");
    std::fs::write(&path, serde_json::to_string(&table).unwrap()).unwrap();

    let out = yamabe(&["verify-constants", "--dim", "5", "--expected", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["passed"], false);
    assert_eq!(v["failures"], 1);
    let fail = v["rows"].as_array().unwrap().iter().find(|r| r["match"] == "FAIL").unwrap();
    assert_eq!(fail["name"], "max_value");
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL N=5 max_value"));
}

#[test]
fn optimize_reports_exact_maximizer() {
    let out = yamabe(&["optimize", "--dim", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["argmax"][0], "-63/4");
    assert_eq!(v["argmax"][1], "105/8");
    assert_eq!(v["value"], "3/2560 + 0*pi");

    let v = json(&yamabe(&["optimize", "--dim", "6"]));
    assert_eq!(v["argmax"][0], "-128/7");
    assert_eq!(v["argmax"][1], "544/35");
    assert_eq!(v["reference_point"]["is_maximizer"], true);
    assert_eq!(v["reference_point"]["value"], "0 + 31/78400*pi");
}

#[test]
fn invalid_input_exits_two() {
    assert_eq!(yamabe(&["optimize", "--dim", "7"]).status.code(), Some(2));
    assert_eq!(yamabe(&["verify-constants", "--dim", "9"]).status.code(), Some(2));
    assert_eq!(yamabe(&["solve-linearized", "--dim", "5", "--pi", "1,-1"]).status.code(), Some(2));
}

#[test]
fn pohozaev_bubble_and_negative_control() {
    let out = yamabe(&["pohozaev", "--dim", "5", "--profile", "bubble"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for row in v["rows"].as_array().unwrap() {
        assert!(row["report"]["residual"].as_f64().unwrap().abs() <= 1e-8);
    }
    let out = yamabe(&["pohozaev", "--dim", "5", "--profile", "perturbed", "--rho", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["rows"][0]["report"]["residual"].as_f64().unwrap().abs() > 1e-8);
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_yamabe"))
        .args(["optimize", "--dim", "5"])
        .env("YAMABE_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("optimize.json")).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema"], 1);
}

fn run_to(args: &[&str], path: &Path) -> Vec<u8> {
    let mut full = args.to_vec();
    full.extend(["--out", path.to_str().unwrap()]);
    assert_eq!(yamabe(&full).status.code(), Some(0));
    std::fs::read(path).unwrap()
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["mass-flux", "--dim", "5", "--seed", "7", "--mc-samples", "4096", "--mc-replicates", "2", "--tol", "0.05"];
    let a = run_to(&args, &dir.path().join("a.json"));
    let b = run_to(&args, &dir.path().join("b.json"));
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["seed"], 7);
}

#[test]
fn solve_linearized_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("u.csv");
    let out = yamabe(&["solve-linearized", "--dim", "5", "--nr", "65", "--nt", "65", "--csv", csv.to_str().unwrap()]);
    let v = json(&out);
    assert_eq!(v["checks"]["residual_ok"], true);
    assert_eq!(v["checks"]["energy_ok"], true);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("r,t,u"));
    assert_eq!(text.lines().count(), 1 + 65 * 65);
}
