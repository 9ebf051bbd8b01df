use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use mcfse::report::read_report;

const BIN: &str = env!("CARGO_BIN_EXE_mcfse");

fn mcfse(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env("FSE_THREADS", "1").output().expect("spawn mcfse")
}

fn ok(args: &[&str]) -> String {
    let out = mcfse(args);
    assert!(
        out.status.success(),
        "mcfse {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const VIDEO: [&str; 4] = ["--width", "64", "--height", "64"];
const SOURCE: [&str; 8] = ["--synthetic", "--frames", "4", "--shift-x", "1.5", "--noise", "1", "--error-frames"];
const QUICK: [&str; 4] = ["--iterations", "30", "--d-max", "3"];

fn pipeline(dir: &Path, algos: &str) {
    let mut args = vec!["pipeline", "--out-dir", p(dir), "--algos", algos];
    args.extend(VIDEO);
    args.extend(SOURCE);
    args.push("2,3");
    args.extend(QUICK);
    ok(&args);
}

#[test]
fn pipeline_matches_the_chained_subcommands() {
    let tmp = tempfile::tempdir().unwrap();
    let (piped, chained) = (tmp.path().join("piped"), tmp.path().join("chained"));
    pipeline(&piped, "fse3d-od:half");

    fs::create_dir_all(&chained).unwrap();
    let (orig, lossy, mask) = (chained.join("o.yuv"), chained.join("c.yuv"), chained.join("m.bin"));
    let (out, rep, eval) = (chained.join("x.yuv"), chained.join("x.txt"), chained.join("e.txt"));
    let mut args = vec!["corrupt", "--original", p(&orig), "--output", p(&lossy), "--mask", p(&mask)];
    args.extend(VIDEO);
    args.extend(SOURCE);
    args.push("2,3");
    ok(&args);
    let mut args = vec!["conceal", "--input", p(&lossy), "--mask", p(&mask), "--output", p(&out), "--report", p(&rep)];
    args.extend(VIDEO);
    args.extend(["--algo", "fse3d-od", "--accuracy", "half"]);
    args.extend(QUICK);
    ok(&args);
    let mut args = vec!["evaluate", "--reference", p(&orig), "--test", p(&out), "--mask", p(&mask), "--report", p(&eval)];
    args.extend(VIDEO);
    ok(&args);

    let read = |path: &Path| fs::read(path).unwrap();
    assert_eq!(read(&orig), read(&piped.join("original.yuv")));
    assert_eq!(read(&lossy), read(&piped.join("corrupted.yuv")));
    assert_eq!(read(&mask), read(&piped.join("mask.bin")));
    assert_eq!(read(&out), read(&piped.join("fse3d-od-half.yuv")));
    assert_eq!(read(&rep), read(&piped.join("fse3d-od-half.conceal.txt")));
    assert_eq!(read(&eval), read(&piped.join("fse3d-od-half.evaluate.txt")));
}

#[test]
fn identical_pipeline_runs_write_identical_files() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    pipeline(&a, "mcfse:quarter,dmve");
    pipeline(&b, "mcfse:quarter,dmve");
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 10);
    for name in names {
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name:?}");
    }
}

#[test]
fn static_comparison_reports_every_algorithm() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let mut args = vec!["pipeline", "--out-dir", p(dir), "--algos", "tr,dmve,mcfse"];
    args.extend(VIDEO);
    args.extend(["--synthetic", "--frames", "3", "--error-frames", "2"]);
    args.extend(QUICK);
    let stdout = ok(&args);
    assert_eq!(stdout.lines().count(), 3);
    let report = read_report(dir.join("comparison.txt")).unwrap();
    let labels: Vec<_> = report.sections.iter().map(|s| s.label.as_str()).collect();
    assert_eq!(labels, ["tr-quarter", "dmve-quarter", "mcfse-quarter"]);
    for s in &report.sections[..2] {
        assert_eq!(s.region.as_ref().unwrap().psnr, 99.0, "{}", s.label);
    }
    assert!(report.sections[2].region.as_ref().unwrap().psnr > 30.0);
}

#[test]
fn missing_width_is_a_usage_error() {
    let out = mcfse(&["pipeline", "--height", "64", "--synthetic", "--out-dir", "unused"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--width"));
}

#[test]
fn bad_values_are_reported_without_panicking() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().to_str().unwrap();
    for extra in [["--gamma", "1.5"], ["--grid", "8x8x1"], ["--algos", "nope"]] {
        let mut args = vec!["pipeline", "--out-dir", dir];
        args.extend(VIDEO);
        args.push("--synthetic");
        args.extend(extra);
        let out = mcfse(&args);
        assert!(!out.status.success(), "{extra:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.starts_with("error:"), "{extra:?}: {err}");
        assert!(!err.contains("panicked"));
    }
    let out = mcfse(&["conceal", "--width", "64", "--height", "64", "--input", "/nonexistent.yuv", "--mask", "m", "--output", "o"]);
    assert!(!out.status.success());
}
