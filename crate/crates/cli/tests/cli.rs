use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ainfty(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ainfty")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn verify_suites_exit_zero() {
    let out = ainfty(&["verify", "braces", "--seed", "7", "--tuple-len", "5"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["ok"], true);
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["evaluated"].as_u64().unwrap() > 0));

    let out = ainfty(&["verify", "example", "--vars", "2", "--degree-cap", "4", "--s-order", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "0 1\n-1 zz\n").unwrap();
    assert_eq!(code(&ainfty(&["export", "m2", "--omega", bad.to_str().unwrap()])), 2);
    let sym = dir.path().join("sym.txt");
    fs::write(&sym, "0 1\n1 0\n").unwrap();
    assert_eq!(code(&ainfty(&["export", "m2", "--omega", sym.to_str().unwrap()])), 2);
    let ok = dir.path().join("ok.txt");
    fs::write(&ok, "0 1\n-1 0\n").unwrap();
    assert_eq!(code(&ainfty(&["export", "m2", "--omega", ok.to_str().unwrap(), "--vars", "4"])), 2);
    assert_eq!(code(&ainfty(&["export", "m2", "--param-cap", "q=2"])), 2);
    assert_eq!(code(&ainfty(&["export", "m2", "--param-cap", "s=5"])), 2);
    assert_eq!(code(&ainfty(&["export", "bogus"])), 2);
    assert_eq!(code(&ainfty(&["mc", "--a0", "mod:z"])), 2);
}

#[test]
fn flow_orders_match_exports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let common = ["--degree-cap", "3", "--tuple-len", "3", "--s-order", "2"];
    let run = |sub: &[&str], name: &str| {
        let out_dir = d.join(name);
        let mut args: Vec<&str> = sub.to_vec();
        args.extend(common);
        args.extend(["--out", out_dir.to_str().unwrap()]);
        let out = ainfty(&args);
        assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stderr));
        out_dir
    };
    let full = run(&["flow"], "flow");
    let minimal = run(&["flow", "--minimal"], "minimal");
    let family = run(&["export", "family"], "family");
    let m2 = run(&["export", "m2"], "m2");
    let first = run(&["export", "first-order"], "first");

    assert_eq!(read(&full, "flow_s0.txt"), read(&family, "family.txt"));
    assert_eq!(read(&minimal, "flow_s0.txt"), read(&m2, "m2.txt"));
    assert_eq!(read(&minimal, "flow_s1.txt"), read(&first, "first-order.txt"));
    for k in 0..=2 {
        assert!(full.join(format!("flow_s{k}.txt")).exists());
    }
    assert!(!full.join("flow_s3.txt").exists());

    let manifest: serde_json::Value = serde_json::from_str(&read(&full, "manifest.json")).unwrap();
    assert_eq!(manifest["command"], "flow");
    assert_eq!(manifest["caps"]["s"], 2);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 3);
    // no temporaries left behind
    assert!(fs::read_dir(&full).unwrap().all(|e| !e.unwrap().file_name().to_string_lossy().ends_with(".tmp")));
}

#[test]
fn reruns_are_byte_identical() {
    for args in [
        &["flow", "--tuple-len", "3", "--s-order", "2"][..],
        &["verify", "braces", "--seed", "3", "--tuple-len", "4"][..],
        &["export", "delta1", "--format", "json", "--tuple-len", "3"][..],
    ] {
        let a = ainfty(args);
        let b = ainfty(args);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn delta1_export_matches_golden() {
    let out = ainfty(&["export", "delta1", "--degree-cap", "3", "--tuple-len", "3"]);
    assert_eq!(code(&out), 0);
    let golden = include_str!("../../core/tests/golden/delta1_weyl2d3.txt");
    assert_eq!(stdout(&out), golden);
}

#[test]
fn mc_runs() {
    let out = ainfty(&["mc"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["element"], "0");
    assert_eq!(v["residual"]["failures"].as_array().unwrap().len(), 0);

    // a module monomial is a fixed point of the flow
    let v: serde_json::Value = serde_json::from_str(&stdout(&ainfty(&["mc", "--a0", "mod:x y"]))).unwrap();
    assert_eq!(v["element"], "mod:x y => 1");

    let v: serde_json::Value = serde_json::from_str(&stdout(&ainfty(&["mc", "--a0", "mod:1 => t"]))).unwrap();
    assert_eq!(v["element"], "mod:1 => 1 * t - 1 * t s + 1 * t s^2 - 1 * t s^3");

    // algebra elements have degree -1
    let out = ainfty(&["mc", "--a0", "alg:1"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("degree"));
}

#[test]
fn truncation_overflow_exits_three() {
    let out = ainfty(&["mc", "--a0", "mod:x => t"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("degree cap"));
    assert_eq!(code(&ainfty(&["mc", "--a0", "mod:x => t", "--truncate"])), 0);
}
