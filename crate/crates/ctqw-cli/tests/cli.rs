//! End-to-end tests of the binary: output correctness, byte-level
//! determinism, config/flag precedence, and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn ctqw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctqw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ctqw-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn evolve_reports_perfect_c4_transfer() {
    let out = ctqw(&[
        "evolve",
        "--n",
        "4",
        "--family",
        "delta",
        "--center",
        "0",
        "--times",
        "1.5707963267948966",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("time,vertex,probability\n"));
    assert!(text.contains("# tool=ctqw"));
    let row: Vec<&str> = text
        .lines()
        .find(|l| l.ends_with(",2,1.0000000000000000e0"))
        .expect("vertex 2 row with probability 1")
        .split(',')
        .collect();
    assert_eq!(row[1], "2");
}

#[test]
fn evolve_blocks_sum_to_one() {
    let out = ctqw(&[
        "evolve", "--n", "64", "--sigma0", "4", "--family", "logistic", "--times", "0,7.25",
    ]);
    assert!(out.status.success());
    let mut sums = std::collections::BTreeMap::<String, f64>::new();
    for line in stdout(&out).lines().skip(2) {
        let mut parts = line.split(',');
        let t = parts.next().unwrap().to_string();
        let _vertex = parts.next().unwrap();
        let p: f64 = parts.next().unwrap().parse().unwrap();
        *sums.entry(t).or_default() += p;
    }
    assert_eq!(sums.len(), 2);
    for (_, total) in sums {
        assert!((total - 1.0).abs() < 1e-9);
    }
}

#[test]
fn output_is_byte_identical_between_runs() {
    let args = ["fig5", "--n", "40", "--sigma0", "2"];
    let first = ctqw(&args);
    let second = ctqw(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn fig2_emits_rows_and_fit_comments() {
    let out = ctqw(&[
        "fig2",
        "--even-min",
        "4",
        "--even-max",
        "24",
        "--odd-min",
        "5",
        "--odd-max",
        "23",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("n,parity,tau,p_b_tau\n"));
    assert!(text.lines().any(|l| l.starts_with("4,even,")));
    assert!(text.lines().any(|l| l.starts_with("5,odd,")));
    assert!(text.contains("# fit parity=even"));
    assert!(text.contains("# fit tau_vs_n"));
}

#[test]
fn config_file_fills_defaults_and_flags_win() {
    let dir = temp_dir("config");
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "n = 40\nsigma0 = 2\n").unwrap();
    let from_config = ctqw(&["fig5", "--config", cfg.to_str().unwrap()]);
    assert!(from_config.status.success());
    assert!(stdout(&from_config).contains("n=40 sigma0=2"));
    let flag_wins = ctqw(&["fig5", "--config", cfg.to_str().unwrap(), "--n", "44"]);
    assert!(flag_wins.status.success());
    assert!(stdout(&flag_wins).contains("n=44 sigma0=2"));
}

#[test]
fn out_flag_writes_the_file() {
    let dir = temp_dir("out");
    let path = dir.join("trace.csv");
    let out = ctqw(&[
        "fig3",
        "--n",
        "40",
        "--sigma0s",
        "2",
        "--points",
        "50",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("sigma0,time,fidelity\n"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 51);
}

#[test]
fn dynamic_writes_stage_files() {
    let dir = temp_dir("stages");
    let out = ctqw(&[
        "dynamic",
        "--small-n",
        "8",
        "--outer-n",
        "6",
        "--sigma0",
        "0.8",
        "--probes-per-stage",
        "3",
        "--stages-dir",
        dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    for name in ["stage1", "stage2", "stage3"] {
        let text = std::fs::read_to_string(dir.join(name)).unwrap();
        assert!(text.starts_with("vertices 22\n"), "{name} header");
    }
    let text = stdout(&out);
    assert!(text.lines().nth(4).unwrap().contains("left_ring"));
    assert!(text.lines().last().unwrap().contains("right_ring"));
}

#[test]
fn invalid_family_exits_with_code_1() {
    let out = ctqw(&["evolve", "--n", "16", "--family", "cauchy"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("unknown distribution family"));
}

#[test]
fn invalid_cycle_size_exits_with_code_1() {
    let out = ctqw(&["evolve", "--n", "2", "--family", "delta"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn insufficient_fit_data_exits_with_code_2() {
    let out = ctqw(&[
        "fig2",
        "--even-min",
        "4",
        "--even-max",
        "10",
        "--odd-min",
        "5",
        "--odd-max",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("insufficient data"));
}

#[test]
fn unwritable_output_exits_with_code_3() {
    let out = ctqw(&[
        "fig5",
        "--n",
        "40",
        "--sigma0",
        "2",
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("/nonexistent-dir/x.csv"));
}

#[test]
fn bad_flag_exits_with_code_1() {
    let out = ctqw(&["fig5", "--does-not-exist"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_exits_cleanly() {
    let out = ctqw(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verify"));
}
