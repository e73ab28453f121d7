use std::process::{Command, Output};

use serde_json::Value;

fn bellspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellspace")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = bellspace(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn close(v: &Value, expected: f64, tol: f64) -> bool {
    (v.as_f64().expect("number") - expected).abs() <= tol
}

#[test]
fn chsh_conditional_default() {
    let v = json(&["chsh"]);
    assert!(close(&v["combined_value"], 2.0 * 2f64.sqrt(), 1e-12));
    assert_eq!(v["satisfied"], false);
}

#[test]
fn chsh_partial_mode() {
    let v = json(&["chsh", "--mode", "partial"]);
    assert!(close(&v["combined_value"], 2f64.sqrt() / 2.0, 1e-12));
    assert_eq!(v["satisfied"], true);
}

#[test]
fn measure_cells_and_layout() {
    let v = json(&["measure"]);
    let beta2 = (2.0 - 2f64.sqrt()) / 4.0;
    let gamma2 = (2.0 + 2f64.sqrt()) / 4.0;
    assert!(close(&v["cells"][0][0], gamma2 / 8.0, 1e-15));
    assert!(close(&v["cells"][1][0], beta2 / 8.0, 1e-15));
    assert!(close(&v["cells"][0][3], beta2 / 8.0, 1e-15));
    assert_eq!(v["columns"], serde_json::json!(["a0b0", "a1b0", "a1b1", "a0b1"]));
}

#[test]
fn measure_csv_has_seventeen_digits() {
    let out = bellspace(&["measure", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,a0b0,a1b0,a1b1,a0b1"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&first[..2], ["1", "1"]);
    let digits = first[2].trim_start_matches("0.").trim_start_matches('0');
    assert_eq!(digits.len(), 17, "{}", first[2]);
}

#[test]
fn concentrated_settings_in_degrees() {
    let v = json(&["measure", "--settings", "1,0,0,0", "--angles", "0,22.5,45,67.5", "--degrees"]);
    let total: f64 = v["cells"].as_array().unwrap().iter().map(|r| r[0].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    for r in 0..4 {
        for c in 1..4 {
            assert_eq!(v["cells"][r][c].as_f64(), Some(0.0));
        }
    }
    assert!(close(&v["angles"][1], std::f64::consts::PI / 8.0, 1e-15));
}

#[test]
fn bell_defaults() {
    let v = json(&["bell"]);
    let r = 2f64.sqrt() / 6.0;
    assert!(close(&v["lhs"], r, 1e-12));
    assert!(close(&v["rhs"], 1.0 - r, 1e-12));
    assert_eq!(v["satisfied"], true);
}

#[test]
fn bell_rejects_unshared_angle() {
    let out = bellspace(&["bell", "--angles", "0,0.1,0.2,0.3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_input_exits_2() {
    for args in [
        &["chsh", "--settings", "0.5,0.5,0.5,0.5"][..],
        &["chsh", "--settings", "-0.5,0.5,0.5,0.5"],
        &["chsh", "--angles", "1,2"],
        &["witness", "--grid", "10"],
        &["sample", "--n", "0"],
        &["chsh", "--format", "xml"],
    ] {
        let out = bellspace(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn strict_violation_exits_1() {
    assert_eq!(bellspace(&["chsh", "--strict"]).status.code(), Some(1));
    assert_eq!(bellspace(&["chsh", "--strict", "--mode", "partial"]).status.code(), Some(0));
    assert_eq!(bellspace(&["bell", "--strict"]).status.code(), Some(0));
}

#[test]
fn config_file_with_flag_override() {
    let dir = std::env::temp_dir().join(format!("bellspace-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.conf");
    std::fs::write(&path, "mode = partial\nformat = csv\nseed = 3\n").unwrap();
    let p = path.to_str().unwrap();

    let out = bellspace(&["chsh", "--config", p]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("quantity,value\nmode,partial\n"), "{text}");

    let v = json(&["chsh", "--config", p, "--format", "json", "--mode", "conditional"]);
    assert!(close(&v["combined_value"], 2.0 * 2f64.sqrt(), 1e-12));

    std::fs::write(&path, "bogus = 1\n").unwrap();
    assert_eq!(bellspace(&["chsh", "--config", p]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn witness_reports_contradiction() {
    let v = json(&["witness"]);
    assert_eq!(v["contradiction"], true);
    assert!(close(&v["p_tilde_max_abs"], 2f64.sqrt(), 1e-9));
}

#[test]
fn nosignal_and_factorize() {
    let v = json(&["nosignal"]);
    assert!(v["max_deviation"].as_f64().unwrap() <= 1e-12);
    let v = json(&["factorize"]);
    assert!(v["residual"].as_f64().unwrap() > 0.01);
}

#[test]
fn lhv_fit_reaches_bound() {
    let v = json(&["lhv-fit", "--grid", "16", "--restarts", "8", "--seed", "7"]);
    let bound = (2.0 * 2f64.sqrt() - 2.0) / 16.0;
    assert!(v["m_hat"].as_f64().unwrap() >= bound - 1e-9);
    assert_eq!(v["model"]["rho"].as_array().unwrap().len(), 16);
}

#[test]
fn sample_is_reproducible_and_binary_matches() {
    let a = bellspace(&["sample", "--n", "2000", "--seed", "9", "--format", "csv"]);
    let b = bellspace(&["sample", "--n", "2000", "--seed", "9", "--format", "csv"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let path = std::env::temp_dir().join(format!("bellspace-sample-{}.bin", std::process::id()));
    let out = bellspace(&["sample", "--n", "2000", "--seed", "9", "--binary", path.to_str().unwrap()]);
    assert!(out.status.success());
    let bytes = std::fs::read(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(&bytes[..4], b"BTS1");
    assert_eq!(u64::from_le_bytes(bytes[4..12].try_into().unwrap()), 9);
    assert_eq!(u64::from_le_bytes(bytes[12..20].try_into().unwrap()), 2000);
    assert_eq!(bytes.len(), 20 + 2000);

    let series = bellspace::montecarlo::TrialSeries::from_bytes(&bytes).unwrap();
    assert_eq!(series.to_csv().as_bytes(), &a.stdout[..]);
}
