//! End-to-end checks of the command-line binary: exit codes, artifact
//! determinism, and failure localization on corrupted zero data.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_primerace")
}

fn work_dir(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests").join(name);
    // start from a clean slate: leftovers from an interrupted run (e.g. the
    // deliberately corrupted zero file below) must not leak between runs
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(dir: &PathBuf, args: &[&str]) -> Output {
    Command::new(bin())
        .arg("--zero-dir")
        .arg(dir.join("zeros"))
        .arg("--out-dir")
        .arg(dir.join("out"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn usage_errors_exit_2() {
    let dir = work_dir("usage");
    let out = run(&dir, &["density", "invert2", "--q", "8", "--classes", "1,3,5"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&dir, &["density", "mc", "--q", "99999999", "--classes", "1,2"]);
    assert_eq!(out.status.code(), Some(2));
    // clap-level error (unknown subcommand) also exits 2
    let out = run(&dir, &["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zeros_compute_verify_and_corruption() {
    let dir = work_dir("zeros");
    let out = run(&dir, &["zeros", "compute", "--q", "4", "--height", "50"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let file = dir.join("zeros").join("q4").join("chi3_T50.csv");
    assert!(file.exists());

    let out = run(&dir, &["zeros", "verify", "--q", "4", "--height", "50"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));

    // swap two ordinate lines: verify must fail (exit 1) and point at the
    // offending position; a data-consuming command must exit 3
    let text = std::fs::read_to_string(&file).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines.swap(1, 2);
    std::fs::write(&file, lines.join("\n") + "\n").unwrap();
    let out = run(&dir, &["zeros", "verify", "--q", "4", "--height", "50"]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL") && stdout.contains("position"), "{stdout}");
    let out = run(&dir, &["density", "invert2", "--q", "4", "--classes", "3,1", "--height", "50"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn density_runs_are_deterministic() {
    let dir = work_dir("density");
    let args = [
        "density", "all", "--q", "5", "--classes", "2,3", "--n", "20000", "--height", "50",
    ];
    let a = run(&dir, &args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let b = run(&dir, &args);
    assert_eq!(a.stdout, b.stdout, "identical config must give identical CSV");
    let table = String::from_utf8_lossy(&a.stdout);
    assert!(table.contains("monte-carlo"));
    assert!(table.contains("inversion-2way,0.5"));
    assert!(table.contains("config_hash="));
}

#[test]
fn race_artifacts() {
    let dir = work_dir("race");
    let out = run(&dir, &["race", "--q", "4", "--classes", "3,1", "--xmax", "1e5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let svg = std::fs::read_to_string(dir.join("out").join("race_q4_3-1.svg")).unwrap();
    assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
    let csv1 = std::fs::read(dir.join("out").join("race_q4_3-1.csv")).unwrap();
    let out = run(&dir, &["race", "--q", "4", "--classes", "3,1", "--xmax", "1e5"]);
    assert_eq!(out.status.code(), Some(0));
    let csv2 = std::fs::read(dir.join("out").join("race_q4_3-1.csv")).unwrap();
    assert_eq!(csv1, csv2);
}
