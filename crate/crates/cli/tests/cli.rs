use std::path::PathBuf;
use std::process::{Command, Output};

fn tzo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tzo")).args(args).output().unwrap()
}

fn write_config(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tzo-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn cos_config() -> PathBuf {
    write_config(
        "cos.json",
        r#"{"kind": "cos", "s_mid": 7.7996794871794872, "gamma": 4.5327357768368262e-3, "sigma": 0.1}"#,
    )
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn forward_with_zero_strike_prices_at_spot() {
    let cfg = cos_config();
    let out = tzo(&["price", "--config", cfg.to_str().unwrap(), "--claim", "forward", "--spot", "7.81", "--tenor", "1"]);
    let v = json(&out);
    assert!((v["value"].as_f64().unwrap() - 7.81).abs() < 1e-12);
    assert!((v["delta"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn binary_has_no_hedge_fields() {
    let cfg = cos_config();
    let out = tzo(&[
        "price", "--config", cfg.to_str().unwrap(), "--claim", "binary", "--strike", "7.8", "--spot", "7.8", "--tenor", "0.5",
    ]);
    let v = json(&out);
    assert!(v["delta"].is_null() && v["bond_holding"].is_null());
    assert!(v["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn curve_emits_header_and_grid() {
    let cfg = cos_config();
    let out = tzo(&[
        "curve", "--config", cfg.to_str().unwrap(), "--spot", "7.8", "--strikes", "7.78,7.8,7.82", "--tenors", "0.25,1",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "strike,tenor,call,put,binary,bond,forward");
    assert_eq!(lines.len(), 1 + 6);
    for row in &lines[1..] {
        let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        // call - put == forward
        assert!((cells[2] - cells[3] - cells[6]).abs() < 1e-12);
    }
}

#[test]
fn spot_outside_band_is_an_input_error() {
    let cfg = cos_config();
    let out = tzo(&[
        "price", "--config", cfg.to_str().unwrap(), "--claim", "call", "--strike", "7.8", "--spot", "7.9", "--tenor", "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside"));
}

#[test]
fn bad_config_reports_key_path() {
    let cfg = write_config(
        "bad.json",
        r#"{"model": {"kind": "cos", "s_mid": 7.8, "gamma": 0.004, "sigma": 0.1, "sigmaa": 1}}"#,
    );
    let out = tzo(&["price", "--config", cfg.to_str().unwrap(), "--claim", "bond", "--spot", "7.8", "--tenor", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("model.sigmaa"), "{err}");
}

#[test]
fn missing_config_file_is_an_input_error() {
    let out = tzo(&["price", "--config", "/nonexistent/m.json", "--claim", "bond", "--spot", "7.8", "--tenor", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn density_curve_is_csv() {
    let out = tzo(&[
        "density", "--mu", "0.05", "--sigma", "0.3", "--rho", "0", "--length", "1", "--x", "0.4", "--tau", "0.5", "--points",
        "11",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("x_prime,P"));
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn eigen_report_lists_requested_modes() {
    let cfg = cos_config();
    let out = tzo(&["eigen", "--config", cfg.to_str().unwrap(), "--n-max", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 6);
}
