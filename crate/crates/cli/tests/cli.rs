use std::f64::consts::PI;
use std::process::{Command, Output};

use hsgeo::norms::norm;
use hsgeo::shortpath::multiscale_function;
use hsgeo::{Grid1D, MetricSpec};
use serde_json::Value;

fn hsgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hsgeo")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

fn f(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn cosine_order_zero_is_l2_norm() {
    let out = hsgeo(&["norm", "--s", "0", "preset=cosine", "k=1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((f(&v["value"]) - PI.sqrt()).abs() < 1e-12);
    assert_eq!(v["variant"], "hs");
}

#[test]
fn multiscale_norm_matches_library_exactly() {
    let out = hsgeo(&["norm", "--s", "0.5", "--grid-n", "4096", "preset=multiscale", "scales=8"]);
    assert_eq!(out.status.code(), Some(0));
    let grid = Grid1D::circle(4096).unwrap();
    let want = norm(&MetricSpec::hs(0.5).unwrap(), &multiscale_function(8, &grid).unwrap()).unwrap();
    assert_eq!(f(&json(&out)["value"]), want);
}

#[test]
fn csv_input_and_malformed_csv() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.csv");
    let n = 64;
    let mut text = String::from("x,value\n");
    for j in 0..n {
        let x = 2.0 * PI * j as f64 / n as f64;
        text.push_str(&format!("{x:.17e},{:.17e}\n", (2.0 * x).sin()));
    }
    std::fs::write(&good, text).unwrap();
    let out = hsgeo(&["norm", "--s", "0", &format!("input={}", good.display())]);
    assert_eq!(out.status.code(), Some(0));
    assert!((f(&json(&out)["value"]) - PI.sqrt()).abs() < 1e-10);

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,value\n0,1\n0.1,oops\n").unwrap();
    let out = hsgeo(&["norm", "--s", "0", &format!("input={}", bad.display())]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["exit_code"], 2);
}

#[test]
fn config_file_flags_and_overrides_layer_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# norm run\ns = 1\npreset = cosine\nk = 3\n").unwrap();
    let path = cfg.display().to_string();
    // flag beats file, override beats flag
    let out = hsgeo(&["norm", "--config", &path, "--s", "0.5", "s=0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(f(&v["s"]), 0.0);
    assert!((f(&v["value"]) - PI.sqrt()).abs() < 1e-12);
}

#[test]
fn unknown_keys_and_bad_values_exit_2() {
    for args in [
        vec!["norm", "--s", "0", "colour=blue"],
        vec!["norm", "--s", "zero"],
        vec!["norm", "preset=cosine"],
        vec!["vanish", "family=circle"],
        vec!["vanish", "family=line"],
        vec!["kernel", "--s", "0.5", "--variant", "homogeneous"],
        vec!["frobnicate"],
    ] {
        let out = hsgeo(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let e = stderr_json(&out);
        assert!(e["error"].is_string() && e["message"].is_string(), "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(hsgeo(&["--help"]).status.code(), Some(0));
    assert_eq!(hsgeo(&["vanish", "--help"]).status.code(), Some(0));
}

#[test]
fn circle_sweep_writes_csv_and_reports_failed_points() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().display().to_string();
    let out = hsgeo(&["vanish", "--grid-n", "256", "--out", &d, "family=circle", "params=1,2,5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[0]["error"].is_null() && rows[1]["error"].is_null());
    assert!(rows[2]["error"].as_str().unwrap().contains("resolve"));
    assert_eq!(v["verdict"], "not decreasing");
    let csv = std::fs::read_to_string(dir.path().join("vanish.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    for col in ["param", "length", "energy", "endpoint_error"] {
        assert!(header.split(',').any(|c| c == col));
    }
    assert_eq!(csv.lines().count(), 4);
    assert!(dir.path().join("vanish.json").exists());
}

#[test]
fn burgers_run_reports_characteristics_error() {
    let out = hsgeo(&["geodesic", "--grid-n", "512", "equation=burgers", "u0=sin", "t_final=0.25", "dt=0.001"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(f(&v["characteristics_error"]) < 1e-5);
    assert!((f(&v["breaking_time"]) - 1.0 / 3.0).abs() < 1e-9);
    assert!(v["stopped_at"].is_null());
}

#[test]
fn mclm_precondition_surfaces_as_exit_2() {
    let ok = hsgeo(&["geodesic", "equation=mclm", "u0=sin", "t_final=0.05"]);
    assert_eq!(ok.status.code(), Some(0));
    let bad = hsgeo(&["geodesic", "equation=mclm", "u0=bump", "t_final=0.05"]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(stderr_json(&bad)["error"], "HomogeneousNonzeroMean");
}

#[test]
fn cfl_violation_truncates_with_exit_0() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().display().to_string();
    let out = hsgeo(&["geodesic", "--out", &d, "equation=burgers", "amplitude=5", "dt=0.02", "t_final=1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(f(&v["stopped_at"]) < 1.0);
    assert!(v["stop_reason"].as_str().unwrap().contains("CFL"));
    assert!(std::fs::read_to_string(dir.path().join("geodesic.csv")).unwrap().lines().count() > 1);
}

#[test]
fn kernel_table_matches_exponential_at_order_one() {
    let out = hsgeo(&["kernel", "--s", "1", "r=0.5,1,2,4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["form"], "bessel-k");
    for (r, k) in v["r"].as_array().unwrap().iter().zip(v["values"].as_array().unwrap()) {
        assert!((f(k) - 0.5 * (-f(r)).exp()).abs() < 1e-10);
    }
}

#[test]
fn verify_passes_and_fault_is_named() {
    let out = hsgeo(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["passed"], true);
    let bad = hsgeo(&["verify", "--fault", "hilbert"]);
    assert_eq!(bad.status.code(), Some(1));
    let report = json(&bad);
    assert_eq!(report["failed"], serde_json::json!(["hilbert_involution"]));
    let e: Value = {
        let text = String::from_utf8_lossy(&bad.stderr);
        let start = text.find('{').unwrap();
        serde_json::from_str(&text[start..]).unwrap()
    };
    assert!(e["message"].as_str().unwrap().contains("hilbert_involution"));
    let also = hsgeo(&["verify", "fault=hilbert"]);
    assert_eq!(also.status.code(), Some(1));
}

#[test]
fn verify_report_keys_are_stable() {
    let a = json(&hsgeo(&["verify", "--seed", "3"]));
    let b = json(&hsgeo(&["verify", "--seed", "11"]));
    let keys = |v: &Value| v.as_object().unwrap().keys().cloned().collect::<Vec<_>>();
    assert_eq!(keys(&a), keys(&b));
    let names = |v: &Value| v["checks"].as_array().unwrap().iter().map(|c| c["name"].clone()).collect::<Vec<_>>();
    assert_eq!(names(&a), names(&b));
}
