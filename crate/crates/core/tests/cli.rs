use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dirac_cyclotron::cli::{parse_config, provenance_config};
use dirac_cyclotron::grid::{angle_between, circular_peaks};

const BIN: &str = env!("CARGO_BIN_EXE_dirac-cyclotron");

const TWO_SCENARIOS: &str = "\
[scenario]
name = timescales
lambda_over_a = 0.1
qa = 5
alpha = 1
beta = 1

[scenario]
name = velocity
lambda_over_a = 0.1
qa = 5
alpha = 1
beta = 1
t_end = 2*T_cl
n_samples = 64
";

fn run(dir: &Path, config: &str, extra: &[&str]) -> Output {
    let path = dir.join("scenarios.cfg");
    fs::write(&path, config).unwrap();
    Command::new(BIN)
        .arg("run")
        .arg(&path)
        .arg("--out")
        .arg(dir)
        .args(extra)
        .output()
        .unwrap()
}

fn payload(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn runs_are_deterministic_across_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run(a.path(), TWO_SCENARIOS, &["--no-timestamp", "--threads", "1"]).status.success());
    assert!(run(b.path(), TWO_SCENARIOS, &["--no-timestamp", "--threads", "4"]).status.success());
    for name in ["timescales.csv", "velocity.csv"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
}

#[test]
fn artifact_header_reproduces_the_scenario() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), TWO_SCENARIOS, &[]).status.success());
    let text = fs::read_to_string(dir.path().join("velocity.csv")).unwrap();
    assert!(text.lines().any(|l| l.starts_with("#! timestamp")));
    let again = parse_config(&provenance_config(&text)).unwrap();
    let original = parse_config(TWO_SCENARIOS).unwrap();
    assert_eq!(again.len(), 1);
    assert!(again[0].same_plan(&original[1]));
}

#[test]
fn timescales_report_seconds() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), TWO_SCENARIOS, &["--no-timestamp"]).status.success());
    let rows = payload(&fs::read_to_string(dir.path().join("timescales.csv")).unwrap());
    let col = rows[0].iter().position(|h| h == "T_R_seconds").unwrap();
    let t_r: f64 = rows[1][col].parse().unwrap();
    assert!((t_r / 2.3e-16 - 1.0).abs() < 0.05, "T_R = {t_r}");

    let rows = payload(&fs::read_to_string(dir.path().join("velocity.csv")).unwrap());
    assert_eq!(rows.len(), 65);
    assert_eq!(rows[0][0], "tau_lambda_over_c");
}

#[test]
fn exit_codes_follow_error_kind() {
    let dir = tempfile::tempdir().unwrap();
    let bad = TWO_SCENARIOS.replace("n_samples", "n_sampels");
    let out = run(dir.path(), &bad, &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n_sampels"));

    let missing = Command::new(BIN)
        .args(["run", "/nonexistent/scenarios.cfg"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(3));

    let capped = TWO_SCENARIOS.replace("beta = 1\nt_end", "beta = 1\nn_max = 3\nt_end");
    let out = run(dir.path(), &capped, &[]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn fractional_map_shows_two_opposite_lobes() {
    let dir = tempfile::tempdir().unwrap();
    let config = "\
[scenario]
name = fractional
lambda_over_a = 0.1
qa = 5
alpha = 1
beta = 1
tau = T_R/4
m = 1
n = 4
n_rho = 60
n_theta = 180
";
    let out = run(dir.path(), config, &["--no-timestamp"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = payload(&fs::read_to_string(dir.path().join("fractional.csv")).unwrap());
    let head = &rows[0];
    let theta_col = head.iter().position(|h| h == "theta").unwrap();
    let rho_col = head.iter().position(|h| h == "rho").unwrap();
    let dens_col = head.iter().position(|h| h == "density_fractional").unwrap();
    let mut marginal = vec![0.0; 180];
    let mut thetas = vec![0.0; 180];
    for (k, row) in rows[1..].iter().enumerate() {
        let j = k / 60;
        let rho: f64 = row[rho_col].parse().unwrap();
        marginal[j] += rho * row[dens_col].parse::<f64>().unwrap();
        thetas[j] = row[theta_col].parse().unwrap();
    }
    let peaks = circular_peaks(&marginal, 0.1);
    assert_eq!(peaks.len(), 2, "{peaks:?}");
    let sep = angle_between(thetas[peaks[0]], thetas[peaks[1]]);
    assert!((sep - PI).abs() < 5f64.to_radians(), "separation {sep}");
}
