use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn linksim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linksim"))
        .args(args)
        .output()
        .expect("run linksim")
}

fn simulate(dir: &Path, name: &str, extra: &[&str]) -> std::path::PathBuf {
    let out = dir.join(name);
    let mut args = vec!["simulate", "--frames", "4000", "--packets", "1", "--seed", "5"];
    args.extend_from_slice(extra);
    let out_s = out.to_str().unwrap().to_string();
    args.extend_from_slice(&["--out", &out_s]);
    let o = linksim(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn simulate_writes_curve_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = simulate(dir.path(), "tas.csv", &["--scheme", "tas-ostbc", "--snr", "0:2:10"]);
    let text = fs::read_to_string(path).unwrap();
    assert!(text.contains("# seed=5"));
    assert!(text.contains("\nscheme,snr_db,total_bits,bit_errors,ber,ci_low,ci_high\n"));
    assert_eq!(text.lines().filter(|l| l.starts_with("tas-ostbc,")).count(), 6);
}

#[test]
fn worker_count_does_not_change_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let common = ["--scheme", "irs-tas-ostbc-hbf", "--snr", "-12:3:0", "--lt", "8", "--nref", "4"];
    let mut one = common.to_vec();
    one.extend_from_slice(&["--workers", "1"]);
    let mut eight = common.to_vec();
    eight.extend_from_slice(&["--workers", "8"]);
    let a = simulate(dir.path(), "a.csv", &one);
    let b = simulate(dir.path(), "b.csv", &eight);
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "scheme=tas-ostbc-abf\nsnr=0:5:10\nlt=2\n").unwrap();
    let path = simulate(
        dir.path(),
        "abf.csv",
        &["--config", cfg.to_str().unwrap(), "--lt", "4"],
    );
    let text = fs::read_to_string(path).unwrap();
    assert!(text.contains("# lt=4"));
    assert!(text.contains("# scheme=tas-ostbc-abf"));
}

#[test]
fn validation_error_exit_code() {
    let o = linksim(&["simulate", "--scheme", "tas-ostbc-abf", "--lt", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lt"));

    let o = linksim(&["simulate", "--scheme", "nonsense"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn io_error_exit_code() {
    let o = linksim(&[
        "simulate", "--scheme", "siso", "--frames", "10", "--packets", "1", "--snr", "0:1:1",
        "--out", "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = linksim(&["gains", "--base", "/nonexistent.csv", "--curves", "/nonexistent.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gains_report_and_range_error() {
    let dir = tempfile::tempdir().unwrap();
    let base = simulate(dir.path(), "abf1.csv", &["--scheme", "tas-ostbc-abf", "--snr", "-6:1:12"]);
    let better = simulate(
        dir.path(),
        "abf4.csv",
        &["--scheme", "tas-ostbc-abf", "--lt", "4", "--snr", "-6:1:12"],
    );
    let csv = dir.path().join("gains.csv");
    let o = linksim(&[
        "gains",
        "--base",
        base.to_str().unwrap(),
        "--curves",
        base.to_str().unwrap(),
        better.to_str().unwrap(),
        "--ber",
        "1e-2",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(&csv).unwrap();
    let gains: Vec<f64> = table
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(gains[0], 0.0);
    assert!((gains[1] - 6.02).abs() < 0.5, "{gains:?}");

    let o = linksim(&[
        "gains",
        "--base",
        base.to_str().unwrap(),
        "--curves",
        better.to_str().unwrap(),
        "--ber",
        "1e-9",
    ]);
    assert_eq!(o.status.code(), Some(3));
}
