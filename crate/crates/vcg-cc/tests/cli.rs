//! End-to-end checks of the command-line surface: formats, determinism,
//! and exit codes.

use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vcg-cc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn table_csv_shape_and_determinism() {
    let a = bin(&["table", "--n-max", "6"]);
    assert!(a.status.success());
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,t_n");
    assert_eq!(lines[1], "1,1");
    assert_eq!(lines[6], "6,3");
    // byte-identical on a repeat run
    let b = bin(&["table", "--n-max", "6"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn table_json_format() {
    let out = bin(&["table", "--n-max", "2", "--format", "json"]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows[0]["n"], 1);
    assert_eq!(rows[0]["t_n"], 1);
    assert_eq!(rows[1]["t_n"], 2);
}

#[test]
fn asymptotic_sweep_csv() {
    let out = bin(&[
        "asymptotic", "--lambda", "0", "--alpha", "1", "--gamma", "0.9999",
        "--sweep", "alpha", "--from", "0.2", "--to", "1.0", "--step", "0.2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,cc_infty");
    assert_eq!(lines.len(), 6);
    // below the 1/e participation gate the limit is zero
    assert!(lines[1].ends_with(",0.0000000000000000e0"), "{}", lines[1]);
}

#[test]
fn asymptotic_rejects_gamma_one() {
    let out = bin(&["asymptotic", "--lambda", "0", "--alpha", "1", "--gamma", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_error_is_exit_two() {
    let out = bin(&["cc", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn k_ceiling_is_exit_five() {
    let out = bin(&["cc", "--lambda", "0", "--n", "10", "--gamma", "1", "--k-ceiling", "2"]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn cc_json_result() {
    let out = bin(&["cc", "--lambda", "0", "--n", "3", "--gamma", "1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["k"], 2);
    assert_eq!(v["certified"], true);
}

#[test]
fn rev_from_curve_file() {
    let path = std::env::temp_dir().join(format!("curve-{}.csv", std::process::id()));
    std::fs::write(&path, "q,R\n0,0\n7/8,1\n1,1\n").unwrap();
    let out = bin(&["rev", "--curve", path.to_str().unwrap(), "--n", "3", "--m", "2", "--k", "1"]);
    std::fs::remove_file(&path).ok();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let vcg = v["rev_vcg"].as_f64().unwrap();
    assert!((vcg - 2.27734375).abs() < 1e-8, "{vcg}");
    let opt = v["rev_opt"].as_f64().unwrap();
    assert!((opt - 2.234375).abs() < 1e-8, "{opt}");
}

#[test]
fn rev_example11_and_output_file() {
    let path = std::env::temp_dir().join(format!("rev-{}.json", std::process::id()));
    let out = bin(&[
        "rev", "--example11", "--n", "3", "--k", "2",
        "--output", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let opt = v["rev_opt"].as_f64().unwrap();
    assert!((opt - 8.0 / 3.0).abs() < 1e-9, "{opt}");
    assert!(v["rev_vcg"].as_f64().unwrap() < 2.5);
}

#[test]
fn rev_requires_a_market() {
    let out = bin(&["rev", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn threads_option_keeps_output_identical() {
    let a = bin(&["rev", "--lambda", "0.5", "--r", "2", "--n", "6", "--m", "4",
                  "--mc-trials", "100000", "--seed", "9", "--threads", "1"]);
    let b = bin(&["rev", "--lambda", "0.5", "--r", "2", "--n", "6", "--m", "4",
                  "--mc-trials", "100000", "--seed", "9", "--threads", "3"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_fast_passes() {
    let out = bin(&["verify", "--suite", "fast"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 8);
}
