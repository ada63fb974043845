use std::process::{Command, Output};

use serde_json::Value;

fn dprime(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dprime"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().take_while(|l| !l.is_empty());
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn resonance_table() {
    let out = dprime(&["resonances", "--path", "adjacent", "--count", "3"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(
        header,
        ["n", "sigma", "lambda", "chi", "g", "kappa", "R_re", "R_im", "T_re", "T_im", "k"]
    );
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| num(&r[4]) == 0.0));
    assert!((num(&rows[0][1]) - 3.9266023).abs() < 1e-7);
}

#[test]
fn quadratic_resonance_has_bound_state() {
    let out = dprime(&["resonances", "--path", "quadratic:1", "--count", "1"]);
    assert!(out.status.success());
    let (_, rows) = csv_rows(&stdout(&out));
    assert!((num(&rows[0][4]) - 276.34589).abs() < 1e-4);
    assert!((num(&rows[0][5]) - 7.697132).abs() < 1e-5);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["resonances", "--count", "0"],
        vec![
            "limit-trace",
            "--path",
            "adjacent",
            "--lambda",
            "10",
            "--points",
            "4",
        ],
        vec![
            "sweep",
            "--l",
            "1e-3",
            "--lambda-min",
            "1",
            "--lambda-max",
            "2",
            "--samples",
            "1",
        ],
        vec!["resonances", "--path", "zigzag", "--count", "1"],
        vec!["transfer", "--l", "0", "--lambda", "1"],
    ] {
        let out = dprime(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn numeric_failures_exit_3() {
    let out = dprime(&[
        "bc", "--alpha", "1", "--lambda", "1", "--beta", "0", "--k", "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1 - alpha*lambda = 0"));

    let out = dprime(&[
        "limit-trace",
        "--path",
        "adjacent",
        "--lambda",
        "10",
        "--l-end",
        "1e-7",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("precision floor"));
}

#[test]
fn transfer_report() {
    let out = dprime(&[
        "transfer", "--l", "0.5", "--rho", "0.2", "--lambda", "0", "--E", "4", "--check",
    ]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&stdout(&out));
    let col = |name: &str| num(&rows[0][header.iter().position(|h| h == name).unwrap()]);
    // free propagation over x0 = 1.2 at k = 2
    assert!((col("L11") - (2.4f64).cos()).abs() < 1e-14);
    assert!((col("L12") - (2.4f64).sin() / 2.0).abs() < 1e-14);
    assert!(col("det_residual") < 1e-12);
    assert!(col("oracle_residual") < 1e-10);
    assert!((col("T2") - 1.0).abs() < 1e-14);
}

#[test]
fn limit_trace_verdicts() {
    let out = dprime(&["limit-trace", "--path", "adjacent", "--resonance", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["l", "rho", "L11", "L12", "L21", "L22", "det"]);
    assert_eq!(rows.len(), 13);
    let block: Value = serde_json::from_str(text.split("\n\n").nth(1).unwrap()).unwrap();
    for entry in ["L11", "L12", "L21", "L22"] {
        assert_eq!(block["verdict"][entry]["kind"], "converges");
    }
    assert_eq!(block["agrees"], true);

    let out = dprime(&[
        "limit-trace",
        "--path",
        "barrier-first:0.5",
        "--resonance",
        "1",
        "--format",
        "json",
    ]);
    let json: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["verdict"]["L21"]["kind"], "divergent");
    assert_eq!(json["prediction"]["kind"], "separated");
    assert_eq!(json["rows"].as_array().unwrap().len(), 13);
}

#[test]
fn sweep_peaks() {
    let out = dprime(&[
        "sweep",
        "--path",
        "adjacent",
        "--l",
        "1e-3",
        "--lambda-min",
        "0",
        "--lambda-max",
        "60",
        "--samples",
        "2001",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let json: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["rows"][0]["T2"], 1.0);
    let peaks: Vec<f64> = json["peaks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["lambda"].as_f64().unwrap())
        .collect();
    for target in [15.418205716980063, 49.96486203180023] {
        assert!(peaks.iter().any(|p| (p - target).abs() < 0.1), "{peaks:?}");
    }
}

#[test]
fn bc_report() {
    let out = dprime(&[
        "bc", "--alpha", "0.5", "--beta", "0", "--lambda", "1", "--k", "1",
    ]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&stdout(&out));
    let col = |name: &str| rows[0][header.iter().position(|h| h == name).unwrap()].clone();
    assert_eq!(num(&col("A")), 3.0);
    assert!((num(&col("R_re")) + 0.8).abs() < 1e-15);
    assert!((num(&col("T_re")) - 0.6).abs() < 1e-15);
    assert_eq!(col("bound_states"), "");

    let out = dprime(&[
        "bc", "--alpha", "0.5", "--beta", "-1", "--lambda", "0", "--E", "1",
    ]);
    assert!(out.status.success());
}

#[test]
fn bc_fit_report() {
    let out = dprime(&["bc-fit", "--path", "adjacent", "--n", "1"]);
    assert!(out.status.success());
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(
        header,
        ["n", "lambda_n", "chi_n", "g_n", "alpha_n", "beta_n", "residual"]
    );
    let alpha = num(&rows[0][4]);
    assert!(alpha > 0.0 && alpha < 1.0);
    assert_eq!(num(&rows[0][5]), 0.0);
    assert!(num(&rows[0][6]) < 1e-12);
}

#[test]
fn output_is_deterministic_and_file_backed() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("res.csv");
    let args = ["resonances", "--path", "linear:1", "--count", "4"];
    let first = stdout(&dprime(&args));
    let out = dprime(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert!(out.status.success() && out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), first);
    assert_eq!(stdout(&dprime(&args)), first);
    assert!(!first.contains('\r'));
}

#[test]
fn help_lists_defaults() {
    let out = dprime(&["sweep", "--help"]);
    let help = stdout(&out);
    assert!(help.contains("[default: adjacent]"));
    assert!(help.contains("[default: 1]"));
    let out = dprime(&["--help"]);
    assert!(stdout(&out).contains("[default: csv]"));
}
