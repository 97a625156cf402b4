use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn layersep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_layersep"))
        .args(args)
        .env_remove("LAYERSEP_OUT")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, amplitudes: &str) -> String {
    let cfg = format!(
        r#"{{
  "version": 1,
  "geometry": {{"width": 1.0, "height": 1.0}},
  "shear": {{"kind": "constant", "amplitude": 1.0}},
  "amplitudes": {amplitudes},
  "viscosities": [0.05],
  "t_end": 0.05,
  "resolutions": [16],
  "sample_dt": 0.01,
  "output_dir": "{}"
}}"#,
        dir.join("out").display()
    );
    let p = dir.join("c.json");
    fs::write(&p, cfg).unwrap();
    p.display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn rest_state_run_writes_zero_separation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[0.0]");
    let o = layersep(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 1);
    let csv = fs::read_to_string(dir.path().join("out/case_000/separation.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "separation").unwrap();
    let rows: Vec<f64> = lines.map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect();
    assert!(!rows.is_empty() && rows.iter().all(|&s| s == 0.0));
}

#[test]
fn subsolution_rates() {
    let o = layersep(&["subsolution", "--lambda", "0.5", "--eps", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o);
    let field = |key: &str| -> f64 {
        let rest = line.split(&format!("{key} = ")).nth(1).unwrap();
        rest.split(|c| c == ',' || c == '\n').next().unwrap().trim().parse().unwrap()
    };
    assert!((field("r") - 1.0 / 12.0).abs() < 1e-15);
    assert!((field("deviation") - 5.0 / 12.0).abs() < 1e-15);
    assert!((field("C") - 5.0 / 6.0).abs() < 1e-15);
}

#[test]
fn subsolution_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let o = layersep(&["subsolution", "--lambda", "0.3", "--eps", "0.2", "--out", &out]);
    assert_eq!(o.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("subsolution/subsolution.json")).unwrap()).unwrap();
    assert!(json["residual"]["min_eigenvalue"].as_f64().unwrap() >= -1e-12);
    assert!(dir.path().join("subsolution/profile.csv").exists());
}

#[test]
fn bounds_without_runs_is_a_dependency_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[1.0]");
    let o = layersep(&["bounds", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing dependency"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(layersep(&["run", "--bogus"]).status.code(), Some(1));
    assert_eq!(layersep(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(layersep(&["--help"]).status.code(), Some(0));
}

#[test]
fn invalid_parameters_exit_two() {
    assert_eq!(layersep(&["subsolution", "--lambda", "1.5", "--eps", "0.5"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    fs::write(&p, r#"{"version": 1, "unknown": 3}"#).unwrap();
    assert_eq!(layersep(&["run", "--config", p.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn prandtl_check_and_full_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[0.5, 1.0]");
    let o = layersep(&["prandtl-check", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(dir.path().join("out/prandtl/series.csv")).unwrap().lines().count(), 62);
    let o = layersep(&["run", "--config", &cfg, "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let o = layersep(&["bounds", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("bounds: 2 run(s)"));
    assert!(dir.path().join("out/bounds.json").exists());
    let o = layersep(&["report", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("out/report").read_dir().unwrap().count() > 0);
}

#[test]
fn out_flag_overrides_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[0.0]");
    let alt = dir.path().join("alt");
    let env_dir = dir.path().join("env");
    let o = Command::new(env!("CARGO_BIN_EXE_layersep"))
        .args(["run", "--config", &cfg, "--out", alt.to_str().unwrap()])
        .env("LAYERSEP_OUT", &env_dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(alt.join("case_000/record.json").exists());
    assert!(!env_dir.exists());
}

#[test]
fn environment_overrides_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[0.0]");
    let env_dir = dir.path().join("env");
    let o = Command::new(env!("CARGO_BIN_EXE_layersep"))
        .args(["run", "--config", &cfg])
        .env("LAYERSEP_OUT", &env_dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(env_dir.join("case_000/record.json").exists());
}
