//! End-to-end behaviour of the `fracrd` binary: exit codes, config handling,
//! output formats and the headline numerical checks of each subcommand.

use std::path::Path;
use std::process::{Command, Output};

use fracrd_cli::table::{Cell, Table};

fn fracrd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracrd")).args(args).output().expect("fracrd runs")
}

fn table_of(out: &Output) -> Table {
    Table::from_csv(std::str::from_utf8(&out.stdout).unwrap()).expect("csv parses")
}

fn summary(t: &Table, key: &str) -> Cell {
    t.summary
        .iter()
        .find(|(k, _)| k == key)
        .unwrap_or_else(|| panic!("summary {key} missing"))
        .1
        .clone()
}

fn num(t: &Table, row: usize, col: &str) -> f64 {
    t.rows[row][t.column(col).unwrap()].as_f64().unwrap()
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn ml_reproduces_e_and_a_cosine_zero() {
    let out = fracrd(&["ml", "--alpha", "1", "--z", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let t = table_of(&out);
    assert!((num(&t, 0, "value_re") - std::f64::consts::E).abs() <= 4.0 * f64::EPSILON);

    // E_{2,1}(−z²) = cos z vanishes at z = π/2
    let z = -(std::f64::consts::FRAC_PI_2.powi(2));
    let out = fracrd(&["ml", "--alpha", "2", &format!("--z={z:e}")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(num(&table_of(&out), 0, "value_re").abs() < 1e-14);
}

#[test]
fn ml_sweep_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let sweep = dir.path().join("sweep.csv");
    let mut text = String::from("alpha,z_re,beta,z_im\n");
    for i in 0..100 {
        let alpha = 0.3 + 1.5 * f64::from(i) / 99.0;
        text += &format!("{alpha},{},{},{}\n", -5.0 + 0.1 * f64::from(i), 1.0 + 0.01 * f64::from(i), 0.02 * f64::from(i % 7));
    }
    std::fs::write(&sweep, text).unwrap();
    let a = fracrd(&["ml", "--sweep", path_arg(&sweep)]);
    let b = fracrd(&["ml", "--sweep", path_arg(&sweep)]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let t = table_of(&a);
    assert_eq!(t.rows.len(), 100);
    assert_eq!(summary(&t, "flagged_rows"), Cell::Int(0));
}

#[test]
fn ilt_two_term_matches_mittag_leffler() {
    // a = 0 and γ = 0 leave s^{α−1}/(s^α + b), whose inverse is E_α(−b t^α)
    let out = fracrd(&["ilt", "--alpha", "0.8", "--b", "1.5", "--times", "0.5,1,2", "--oracle", "off"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let t = table_of(&out);
    for (row, time) in [0.5f64, 1.0, 2.0].iter().enumerate() {
        let z = -1.5 * time.powf(0.8);
        let ml = fracrd(&["ml", "--alpha", "0.8", &format!("--z={z:e}")]);
        let expected = num(&table_of(&ml), 0, "value_re");
        assert!((num(&t, row, "series_value") - expected).abs() < 1e-9, "t = {time}");
    }
}

#[test]
fn ilt_agrees_with_talbot() {
    let out = fracrd(&["ilt", "--alpha", "0.9", "--beta", "0.3", "--gamma", "0.6", "--a", "0.4", "--b", "0.5", "--times", "0.1,0.5,1,2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let t = table_of(&out);
    assert!(summary(&t, "max_abs_delta_converged").as_f64().unwrap() < 1e-8);
}

#[test]
fn guard_violation_exits_two_with_partial_value() {
    let out = fracrd(&["ilt", "--alpha", "0.9", "--beta", "0.3", "--gamma", "0.6", "--a", "2", "--b", "3", "--times", "5", "--oracle", "off"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("GuardViolated"));
    let t = table_of(&out);
    assert_eq!(t.rows[0][t.column("converged").unwrap()], Cell::Bool(false));
    assert!(num(&t, 0, "series_value").is_finite());
}

#[test]
fn solve_heat_preset_matches_the_gaussian() {
    let out = fracrd(&["solve", "--preset", "heat"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(summary(&table_of(&out), "heat_kernel_max_abs_error").as_f64().unwrap() <= 1e-6);
}

#[test]
fn green_route_agrees_with_spectral() {
    let args = ["solve", "--preset", "heat", "--modes", "128", "--times", "0.5", "--initial", "gaussian", "--width", "1"];
    let spectral = table_of(&fracrd(&args));
    let mut green_args = args.to_vec();
    green_args.extend(["--route", "green"]);
    let green = fracrd(&green_args);
    assert_eq!(green.status.code(), Some(0), "{}", String::from_utf8_lossy(&green.stderr));
    let green = table_of(&green);
    assert_eq!(spectral.rows.len(), green.rows.len());
    let worst = (0..spectral.rows.len())
        .map(|r| (num(&spectral, r, "N") - num(&green, r, "N")).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn telegraph_classical_preset_matches_the_oscillator() {
    let out = fracrd(&["telegraph", "--preset", "classical"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(summary(&table_of(&out), "classical_mode_max_delta").as_f64().unwrap() <= 1e-10);
}

#[test]
fn three_order_preset_agrees_with_the_ode_oracle() {
    let out = fracrd(&["solve", "--preset", "three-order", "--modes", "64", "--times", "0.5", "--oracle", "on"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(summary(&table_of(&out), "oracle_delta_max").as_f64().unwrap() <= 1e-4);
}

#[test]
fn oracle_fode_relaxation() {
    // D^1 u + u = 0, u(0) = 1
    let out = fracrd(&["oracle", "--kind", "fode", "--terms", "1:1", "--a0", "1", "--u0", "1", "--times", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!((num(&table_of(&out), 0, "u") - (-1f64).exp()).abs() < 1e-4);
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "alpah = 0.5\n").unwrap();
    let out = fracrd(&["ml", "--config", path_arg(&cfg), "--z", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().count(), 1, "{stderr}");
    assert!(stderr.starts_with("error kind=config "), "{stderr}");
    assert!(out.stdout.is_empty());
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "alpha = 2.0\nz = [\"1\"]\n").unwrap();
    let from_file = table_of(&fracrd(&["ml", "--config", path_arg(&cfg)]));
    assert_eq!(num(&from_file, 0, "alpha"), 2.0);
    let overridden = table_of(&fracrd(&["ml", "--config", path_arg(&cfg), "--alpha", "1"]));
    assert_eq!(num(&overridden, 0, "alpha"), 1.0);
    assert!((num(&overridden, 0, "value_re") - std::f64::consts::E).abs() < 1e-15);
}

#[test]
fn validation_failure_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.csv");
    let out = fracrd(&["solve", "--preset", "heat", "--modes", "0", "--output", path_arg(&target)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!target.exists());
}

#[test]
fn json_output_round_trips_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (csv_path, json_path) = (dir.path().join("t.csv"), dir.path().join("t.json"));
    let base = ["telegraph", "--preset", "classical", "--modes", "32"];
    let run = |extra: &[&str]| {
        let mut args = base.to_vec();
        args.extend_from_slice(extra);
        assert_eq!(fracrd(&args).status.code(), Some(0));
    };
    run(&["--output", path_arg(&csv_path)]);
    run(&["--output", path_arg(&json_path), "--format", "json"]);
    let csv = Table::from_csv(&std::fs::read_to_string(&csv_path).unwrap()).unwrap();
    let json_text = std::fs::read_to_string(&json_path).unwrap();
    let json = Table::from_json(&json_text).unwrap();
    assert_eq!(csv.key_sorted(), json.key_sorted());
    assert_eq!(json.to_json(), json_text);
}

#[test]
fn verify_rejects_unknown_criteria() {
    let out = fracrd(&["verify", "--only", "13"]);
    assert_eq!(out.status.code(), Some(1));
}
