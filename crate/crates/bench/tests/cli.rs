use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn tfade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfade"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn soe_check_certifies_and_rejects() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("soe.csv");
    let out = tfade(&[
        "soe-check", "--alpha", "0.5", "--eps", "1e-10", "--t-min", "1e-4", "--t-max", "2", "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let err: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("max_rel_error "))
        .and_then(|l| l.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert!(err <= 1e-10);
    let text = read(&csv);
    let lines = data_lines(&text);
    assert_eq!(lines[0], "t,kernel,soe,rel_err");
    assert_eq!(lines.len(), 1001);

    assert_eq!(tfade(&["soe-check", "--alpha", "0.5", "--eps", "1e-16"]).status.code(), Some(1));
    let ok = tfade(&["soe-check", "--alpha", "0.25", "--eps", "1e-10", "--t-min", "1e-3", "--t-max", "2"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn convergence_table_layout() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("conv.csv");
    let out = tfade(&[
        "convergence", "--case", "1", "--alpha", "0.25", "--N", "16,32,64", "--M", "100", "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(&csv);
    assert!(text.starts_with("# case=1 alpha=0.25"));
    let lines = data_lines(&text);
    assert_eq!(lines[0], "knob,error,order,method,norm");
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("16,") && lines[1].ends_with(",,fast,l2"));
    assert!(lines[6].starts_with("64,") && lines[6].ends_with(",direct,l2"));
}

#[test]
fn space_sweep_uses_fixed_steps() {
    let dir = tempdir().unwrap();
    let csv = dir.path().join("space.csv");
    let out = tfade(&[
        "convergence", "--case", "2", "--method", "fast", "--N", "200", "--M", "10,20", "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = read(&csv);
    assert!(text.contains("# sweep=M fixed N=200"));
    assert_eq!(data_lines(&text).len(), 3);
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(tfade(&["convergence", "--N", ""]).status.code(), Some(1));
    assert_eq!(tfade(&["convergence", "--N", "16,32", "--M", "20,40"]).status.code(), Some(1));
    assert_eq!(tfade(&["convergence", "--bogus"]).status.code(), Some(1));
    assert_eq!(tfade(&["solve", "--method", "both"]).status.code(), Some(1));
    assert_eq!(tfade(&["bench", "--N", "16,32"]).status.code(), Some(1));
    assert_eq!(tfade(&["solve", "--case", "7"]).status.code(), Some(1));
    assert_eq!(tfade(&["--help"]).status.code(), Some(0));
}

#[test]
fn numerical_failure_exits_with_two() {
    // f overflows at this horizon
    let out = tfade(&["solve", "--case", "1", "--T", "1e200", "--N", "8", "--M", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_data_gives_zero_solution() {
    let out = tfade(&["solve", "--case", "0", "--N", "16", "--M", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines = data_lines(&text);
    assert_eq!(lines[0], "x,t,U,exact,abs_err");
    for l in &lines[1..] {
        assert_eq!(l.split(',').nth(2), Some("0e0"), "{l}");
    }
}

#[test]
fn solve_is_deterministic_with_zero_boundary() {
    let dir = tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = tfade(&["solve", "--case", "2", "--N", "64", "--M", "64", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let text = read(&a);
    assert_eq!(text, read(&b));
    for l in data_lines(&text).into_iter().skip(1) {
        let f: Vec<f64> = l.split(',').map(|v| v.parse().unwrap()).collect();
        assert!(f.iter().all(|v| v.is_finite()));
        if f[0] == 0.0 || f[0] == 1.0 {
            assert_eq!(f[2], 0.0);
        }
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "case = 3\nalpha = 0.25\nN = [32]\nM = [16]\n").unwrap();
    let out = tfade(&["solve", "--config", cfg.to_str().unwrap(), "--alpha", "0.75"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let head = text.lines().next().unwrap();
    assert!(head.contains("case=3") && head.contains("alpha=0.75") && head.contains("N=32"), "{head}");

    std::fs::write(&cfg, "alhpa = 0.25\n").unwrap();
    assert_eq!(tfade(&["solve", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn bench_reports_slopes() {
    let out = tfade(&["bench", "--N", "16,32,64,128,256", "--M", "8", "--repeats", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines = data_lines(&text);
    assert_eq!(lines[0], "N,wall_seconds_fast,wall_seconds_direct,n_exp");
    assert_eq!(lines.len(), 6);
    assert!(text.lines().last().unwrap().starts_with("# loglog slope fast="));
}
