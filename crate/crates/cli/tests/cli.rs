use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ratio-tail"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_with_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is one JSON line")
}

const LOGISTIC: &str = r#"{"form":"logistic","alpha":2}"#;

#[test]
fn sample_is_reproducible_and_carries_a_header() {
    let args = ["sample", "--model", LOGISTIC, "--n", "50", "--seed", "9"];
    let a = run(&args);
    let b = run(&args);
    let c = run(&["--sequential", "sample", "--model", LOGISTIC, "--n", "50", "--seed", "9"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    let header: Value = serde_json::from_str(lines.next().unwrap().strip_prefix("# ").unwrap()).unwrap();
    assert_eq!(header["command"], "sample");
    assert_eq!(header["seed"], 9);
    assert_eq!(header["n"], 50);
    assert_eq!(header["model"]["alpha"], 2.0);
    assert!(header["version"].is_string());
    assert_eq!(lines.next().unwrap(), "i,x,y");
    assert_eq!(lines.count(), 50);
}

#[test]
fn exit_codes() {
    let zero = run(&["sample", "--model", r#"{"form":"independent"}"#, "--n", "0"]);
    assert_eq!(zero.status.code(), Some(2));
    assert_eq!(stderr_json(&zero)["exit_code"], 2);

    let bad_json = run(&["check", "--model", "{not json"]);
    assert_eq!(bad_json.status.code(), Some(2));
    let bad_param = run(&["check", "--model", r#"{"form":"rho","rho":1.5}"#]);
    assert_eq!(bad_param.status.code(), Some(2));
    let bad_flag = run(&["sample", "--bogus"]);
    assert_eq!(bad_flag.status.code(), Some(2));
    let bad_grid = run(&["gamma-fn", "--model", LOGISTIC, "--t-grid", "5:1:log"]);
    assert_eq!(bad_grid.status.code(), Some(2));

    let degenerate = run(&[
        "gamma-test",
        "--model",
        r#"{"form":"rho","rho":0}"#,
        "--n",
        "20",
        "--variant",
        "original",
    ]);
    assert_eq!(degenerate.status.code(), Some(3));
    assert_eq!(stderr_json(&degenerate)["kind"], "numeric");

    let unwritable = run(&[
        "sample",
        "--model",
        LOGISTIC,
        "--n",
        "3",
        "--out",
        "/nonexistent-dir/out.csv",
    ]);
    assert_eq!(unwritable.status.code(), Some(4));
    let missing = run(&["hill", "--input", "/nonexistent-dir/in.csv"]);
    assert_eq!(missing.status.code(), Some(4));
}

#[test]
fn gamma_fn_matches_the_closed_form() {
    let out = run(&["gamma-fn", "--model", LOGISTIC, "--t-grid", "1:100:log", "--method", "numeric"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(2)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 50);
    for r in rows {
        let t = r[0];
        let exact = (1.0 / (1.0 + t * t)).sqrt() / t;
        assert!((r[1] - exact).abs() < 1e-9);
        assert!((r[2] - exact).abs() < 1e-9);
        assert!((r[3] - exact * t).abs() < 1e-9);
    }
    assert!(text.lines().nth(1).unwrap() == "t,gamma_plus,gamma_minus,norm_f_Et,norm_g_Dt");
}

#[test]
fn sample_pipes_into_hill_and_gamma_test() {
    let sample = run(&["sample", "--model", r#"{"form":"independent"}"#, "--n", "20000", "--seed", "4"]);
    assert!(sample.status.success());

    let hill = run_with_stdin(&["hill"], &sample.stdout);
    assert!(hill.status.success(), "{}", String::from_utf8_lossy(&hill.stderr));
    let h = json(&hill);
    assert_eq!(h["n"], 20000);
    assert_eq!(h["k"], 19);
    assert!((h["gamma_hat"].as_f64().unwrap() - 1.0).abs() < 0.6);
    let se = h["se_approx"].as_f64().unwrap();
    assert!((se - h["gamma_hat"].as_f64().unwrap() / 19f64.sqrt()).abs() < 1e-12);

    let test = run_with_stdin(&["gamma-test", "--level", "0.05"], &sample.stdout);
    assert!(test.status.success());
    let r = json(&test);
    assert_eq!(r["n"], 20000);
    assert_eq!(r["variant"], "modified");
    let stat = r["statistic"].as_f64().unwrap();
    let p = r["p_value"].as_f64().unwrap();
    assert!((p - (-stat).exp() * (1.0 + stat)).abs() < 1e-12);
    assert_eq!(r["reject"].as_bool().unwrap(), p < 0.05);
}

#[test]
fn hill_reads_one_column_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.csv");
    let e = std::f64::consts::E;
    std::fs::write(&path, format!("value\n1\n{}\n{}\n{}\n", e, e * e, e * e * e)).unwrap();
    let out = run(&["hill", "--input", path.to_str().unwrap(), "--k", "3"]);
    assert!(out.status.success());
    assert!((json(&out)["gamma_hat"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let bad_k = run(&["hill", "--input", path.to_str().unwrap(), "--k", "4"]);
    assert_eq!(bad_k.status.code(), Some(2));
}

#[test]
fn power_curve_writes_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("power.csv");
    let args = [
        "power-curve",
        "--rho-grid",
        "0.2:1.0:0.4",
        "--n",
        "20",
        "--reps",
        "400",
        "--level",
        "0.05",
        "--seed",
        "7",
        "--out",
        path.to_str().unwrap(),
    ];
    assert!(run(&args).status.success());
    let first = std::fs::read_to_string(&path).unwrap();
    assert!(run(&args).status.success());
    assert_eq!(first, std::fs::read_to_string(&path).unwrap());
    let lines: Vec<&str> = first.lines().collect();
    assert!(lines[0].starts_with("# {"));
    assert_eq!(lines[1], "rho,empirical_power,limit_power,reps");
    assert_eq!(lines.len(), 5);
    let row: Vec<f64> = lines[2].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row[0], 0.2);
    assert!((row[2] - 0.754_595_821).abs() < 1e-8);
    assert_eq!(row[3], 400.0);
}

#[test]
fn cdf_reports_values_and_norming() {
    let out = run(&[
        "cdf",
        "--model",
        r#"{"form":"rho","rho":0.3}"#,
        "--x",
        "1",
        "--y",
        "1",
        "--t",
        "2",
        "--norming-n",
        "100",
        "--side",
        "minus",
    ]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["conditional_cdf"].as_f64().unwrap() - (-0.3f64).exp()).abs() < 1e-15);
    assert!((v["ratio_joint"].as_f64().unwrap() - 1.0 / 1.15).abs() < 1e-15);
    assert!((v["gamma"].as_f64().unwrap() - 0.15).abs() < 1e-15);
    assert!((v["norming"]["kappa"].as_f64().unwrap() - 30.0).abs() < 1e-9);
    assert!((v["tail_dependence"].as_f64().unwrap() - 0.7).abs() < 1e-15);

    let seq = run(&[
        "cdf",
        "--model",
        r#"{"form":"independent"}"#,
        "--norming-n",
        "1000",
        "--u-n",
        "10",
    ]);
    assert!((json(&seq)["norming"]["kappa"].as_f64().unwrap() - 100.0).abs() < 1e-9);
}

#[test]
fn check_summarizes_models() {
    let out = run(&["check", "--model", r#"{"form":"swapped","of":{"form":"logistic","alpha":3}}"#]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["valid"], true);
    assert_eq!(v["ratio_tail_index_plus"], 3.0);
    assert!((v["tail_dependence"].as_f64().unwrap() - (2.0 - 2f64.powf(1.0 / 3.0))).abs() < 1e-9);
    let model_file = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(model_file.path(), r#"{"form":"mixed","k":0.5}"#).unwrap();
    let arg = format!("@{}", model_file.path().display());
    let from_file = run(&["check", "--model", &arg]);
    assert!(from_file.status.success());
    assert_eq!(json(&from_file)["ratio_tail_index_plus"], 1.0);
}
