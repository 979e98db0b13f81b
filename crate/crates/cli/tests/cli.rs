use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn horocycle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_horocycle")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> (i32, String) {
    let path = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    full.extend(["--out", &p]);
    let out = horocycle(&full);
    let body = std::fs::read_to_string(&path).unwrap_or_default();
    (code(&out), body)
}

/// Parses the CSV body (after the schema comment and header) into rows.
fn rows(csv: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# schema_version=1"));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let data = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, data)
}

#[test]
fn simulate_translation_along_horizontal_horocycle() {
    let dir = tempfile::tempdir().unwrap();
    let (c, csv) = run_to(
        dir.path(),
        "t.csv",
        &["simulate", "--system", "magnetic", "--q0", "0,1", "--v0", "-1,0", "--T", "1", "--dt", "0.001"],
    );
    assert_eq!(c, 0);
    let (header, data) = rows(&csv);
    assert_eq!(header, ["t", "x", "y", "vx", "vy", "E", "px"]);
    assert_eq!(data.len(), 1001);
    let last = data.last().unwrap();
    assert!((last[0] - 1.0).abs() < 1e-15);
    assert!((last[1] + 1.0).abs() < 1e-9 && (last[2] - 1.0).abs() < 1e-9);
}

#[test]
fn simulate_vertical_geodesic_reaches_e() {
    let out = horocycle(&["simulate", "--system", "kinetic", "--q0", "0,1", "--v0", "0,1", "--T", "1"]);
    assert_eq!(code(&out), 0);
    let (_, data) = rows(&String::from_utf8(out.stdout).unwrap());
    assert!((data.last().unwrap()[2] - std::f64::consts::E).abs() < 1e-8);
}

#[test]
fn simulate_subcritical_energy_is_constant() {
    let out = horocycle(&["simulate", "--system", "magnetic", "--q0", "0,1", "--v0", "0.5,0", "--T", "20"]);
    assert_eq!(code(&out), 0);
    let (_, data) = rows(&String::from_utf8(out.stdout).unwrap());
    assert!(data.iter().all(|r| (r[5] - 0.125).abs() < 1e-8));
}

#[test]
fn simulate_cotangent_header() {
    let out = horocycle(&[
        "simulate",
        "--system",
        "magnetic",
        "--bundle",
        "cotangent",
        "--q0",
        "0,1",
        "--p0",
        "0,0",
        "--T",
        "0.01",
    ]);
    assert_eq!(code(&out), 0);
    let (header, data) = rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header, ["t", "x", "y", "px", "py", "H"]);
    assert!(data.iter().all(|r| (r[5] - 0.5).abs() < 1e-12));
}

#[test]
fn simulate_boundary_escape_writes_partial_file() {
    let dir = tempfile::tempdir().unwrap();
    let (c, csv) = run_to(
        dir.path(),
        "escape.csv",
        &["simulate", "--system", "kinetic", "--q0", "0,1", "--v0", "0,-1", "--T", "30", "--dt", "0.01"],
    );
    assert_eq!(c, 3);
    let (_, data) = rows(&csv);
    let last = data.last().unwrap();
    assert!(last[0] > 20.0 && last[0] < 30.0);
    assert!(last[2] > 0.0 && last[2] < 1e-8);
}

#[test]
fn invalid_flags_exit_2() {
    for args in [
        &["simulate", "--system", "magnetic", "--q0", "0,-1", "--v0", "1,0", "--T", "1"][..],
        &["simulate", "--system", "magnetic", "--q0", "0,1", "--T", "1"],
        &["simulate", "--system", "magnetic", "--q0", "0,1,2", "--v0", "1,0", "--T", "1"],
        &["simulate", "--system", "magnetic", "--q0", "0,1", "--v0", "1,0", "--T", "1", "--dt", "2"],
        &["simulate", "--system", "electric", "--q0", "0,1", "--v0", "1,0", "--T", "1"],
        &["verify", "--family", "arctan"],
        &["verify", "--family", "arcsinh", "--a", "inf"],
        &["verify", "--system", "kinetic", "--family", "arctan", "--a", "0"],
        &["period", "--k", "0.5"],
        &["period", "--k", "0.7"],
        &["period", "--k", "0.1", "--samples", "0"],
        &["foliation", "--kind", "geodesic-center", "--a", "inf"],
        &["mane", "--grid", "0,1,3,-1,1,3"],
    ] {
        let out = horocycle(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
    let out = horocycle(&["period", "--k", "0.5"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no periodic orbits"));
}

#[test]
fn verify_catalog_members_pass() {
    let dir = tempfile::tempdir().unwrap();
    let (c, body) = run_to(dir.path(), "r.json", &["verify", "--system", "magnetic", "--family", "arctan", "--a", "0"]);
    assert_eq!(c, 0);
    let r: Value = serde_json::from_str(&body).unwrap();
    for key in [
        "solution",
        "grid",
        "max_residual",
        "mean_residual",
        "max_grad_mismatch",
        "max_level_deviation",
        "invariance_deviation",
        "pass",
        "schema_version",
    ] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert!(r["max_residual"].as_f64().unwrap() < 1e-12);
    assert!(r["invariance_deviation"].as_f64().unwrap() < 1e-6);
    assert_eq!(r["pass"], true);

    let (c, body) = run_to(
        dir.path(),
        "k.json",
        &["verify", "--system", "kinetic", "--family", "arcsinh", "--a", "3", "--sign", "-"],
    );
    assert_eq!(c, 0);
    let r: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(r["pass"], true);

    let (c, _) = run_to(
        dir.path(),
        "inf.json",
        &["verify", "--family", "log-endpoint", "--a", "inf", "--sign", "-", "--c", "2"],
    );
    assert_eq!(c, 0);
}

#[test]
fn verify_negative_control_fails_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let (c, body) = run_to(dir.path(), "x.json", &["verify", "--system", "magnetic", "--family", "adhoc-x"]);
    assert_eq!(c, 4);
    let r: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(r["pass"], false);
    assert_eq!(r["reference_residual"].as_f64().unwrap(), 0.5);
    assert!(r["max_residual"].as_f64().unwrap() > 0.5);
}

#[test]
fn period_reports() {
    let dir = tempfile::tempdir().unwrap();
    let (c, body) = run_to(dir.path(), "a.json", &["period", "--k", "0.125", "--samples", "5"]);
    assert_eq!(c, 0);
    let a: Value = serde_json::from_str(&body).unwrap();
    assert_eq!(a["samples"].as_array().unwrap().len(), 5);
    assert!(a["max_relative_spread"].as_f64().unwrap() < 1e-4);

    let (c, body) = run_to(dir.path(), "b.json", &["period", "--k", "0.245", "--samples", "3"]);
    assert_eq!(c, 0);
    let b: Value = serde_json::from_str(&body).unwrap();
    assert!(b["max_relative_spread"].as_f64().unwrap() < 1e-4);
    let pa = a["samples"][0]["period"].as_f64().unwrap();
    let pb = b["samples"][0]["period"].as_f64().unwrap();
    assert!((pa - pb).abs() > 1.0);
}

#[test]
fn period_without_return_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("short.toml");
    std::fs::write(&cfg, "period_budget = 2.0\n").unwrap();
    let out = horocycle(&["--config", cfg.to_str().unwrap(), "period", "--k", "0.125"]);
    assert_eq!(code(&out), 5);
}

#[test]
fn mane_reports() {
    let out = horocycle(&["mane", "--candidate", "constant", "--curves", "euclidean"]);
    assert_eq!(code(&out), 0);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["upper"].as_f64().unwrap(), 0.5);
    for key in ["upper", "lower", "gap", "candidate", "curves", "schema_version"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }

    let out = horocycle(&["mane"]);
    assert_eq!(code(&out), 0);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((r["upper"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert!(r["lower"].as_f64().unwrap() >= 0.48);

    let out = horocycle(&["mane", "--curves", "hyperbolic-refined", "--a", "inf"]);
    assert_eq!(code(&out), 0);
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((0.5 - r["lower"].as_f64().unwrap()).abs() < 0.02);
}

#[test]
fn foliation_samples() {
    let grid = ["--grid", "-3,3,7,0.2,5,6"];
    let out = horocycle(&[&["foliation", "--kind", "horocycle", "--a", "0"][..], &grid].concat());
    assert_eq!(code(&out), 0);
    let (header, data) = rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header, ["x", "y", "vx", "vy"]);
    assert_eq!(data.len(), 42);
    for r in &data {
        let (x, y) = (r[0], r[1]);
        // inward unit normal of the horocycle through (x, y) tangent at 0
        let s = x * x + y * y;
        let (vx, vy) = (y * (y * y - x * x) / s, -2.0 * x * y * y / s);
        assert!((r[2] - vx).abs() < 1e-12 && (r[3] - vy).abs() < 1e-12, "{r:?}");
    }

    let out = horocycle(&[&["foliation", "--kind", "horocycle", "--a", "inf"][..], &grid].concat());
    let (_, data) = rows(&String::from_utf8(out.stdout).unwrap());
    assert!(data.iter().all(|r| r[2] == -r[1] && r[3] == 0.0));

    let out = horocycle(&[&["foliation", "--kind", "geodesic-center", "--a", "0"][..], &grid].concat());
    let (_, data) = rows(&String::from_utf8(out.stdout).unwrap());
    assert!(data.iter().all(|r| ((r[2] * r[2] + r[3] * r[3]).sqrt() / r[1] - 1.0).abs() < 1e-12));
}

#[test]
fn output_is_bit_stable() {
    let args = ["verify", "--family", "arcsinh", "--a", "-2", "--grid", "-2,2,21,0.5,3,21"];
    let a = horocycle(&args);
    let b = horocycle(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let args = ["simulate", "--system", "magnetic", "--q0", "0.3,1.2", "--v0", "0.2,-0.4", "--T", "3"];
    assert_eq!(horocycle(&args).stdout, horocycle(&args).stdout);
}

#[test]
fn config_and_worker_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "dt = 0.5\ngrid_nx = 3\ngrid_ny = 2\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let out =
        horocycle(&["--config", cfg, "simulate", "--system", "kinetic", "--q0", "0,1", "--v0", "1,0", "--T", "1"]);
    let (_, data) = rows(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(data.len(), 3);

    let out = horocycle(&["--config", cfg, "foliation", "--kind", "horocycle", "--a", "1"]);
    assert_eq!(rows(&String::from_utf8(out.stdout).unwrap()).1.len(), 6);

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "unknown_key = 1\n").unwrap();
    let out = horocycle(&["--config", bad.to_str().unwrap(), "period", "--k", "0.1"]);
    assert_eq!(code(&out), 2);

    let run = |workers: &str| {
        Command::new(env!("CARGO_BIN_EXE_horocycle"))
            .args(["foliation", "--kind", "geodesic-endpoint", "--a", "2"])
            .env("HOROCYCLE_WORKERS", workers)
            .output()
            .unwrap()
    };
    let (one, two) = (run("1"), run("2"));
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, two.stdout);
    assert_eq!(code(&run("0")), 2);
}
