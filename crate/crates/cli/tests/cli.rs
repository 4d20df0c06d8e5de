use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_ckn-lab");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("CKN_LAB_THREADS")
        .output()
        .expect("binary runs")
}

fn json_line(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(text.lines().next().expect("one line")).expect("valid JSON")
}

#[test]
fn constants_record() {
    let out = run(&["constants", "--N", "5", "--alpha", "1", "--beta", "1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_line(&out);
    assert_eq!(v["p_star"], 6.0);
    assert_eq!(v["M"], 6.0);
    let s_r = v["s_r"].as_f64().unwrap();
    assert!((s_r / 221.688_267_419_792_82 - 1.0).abs() < 1e-13);
    assert_eq!(v["class"], "SymmetryBreaking");

    let v = json_line(&run(&[
        "constants",
        "--N",
        "5",
        "--alpha",
        "0",
        "--beta",
        "0",
        "--json",
    ]));
    assert!((v["s_r"].as_f64().unwrap() / 102.383_273_440_582_93 - 1.0).abs() < 1e-13);
}

#[test]
fn invalid_parameters_exit_2() {
    let out = run(&["constants", "--N", "4", "--alpha", "0", "--beta", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("N = 4"));
    assert_eq!(
        run(&["certify", "--N", "5", "--alpha", "1", "--beta", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["scan", "--N", "5", "--alpha", "2:1:3"]).status.code(), Some(2));
    assert_eq!(
        run(&["scan", "--N", "5", "--alpha", "1", "--outputs", "colour"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn certify_exit_codes() {
    let out = run(&["certify", "--N", "5", "--alpha", "1", "--beta", "1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_line(&out);
    assert_eq!(v["verdict"], "Breaking");
    assert_eq!(v["passed"], true);

    let out = run(&["certify", "--N", "5", "--alpha", "1", "--beta", "0.3", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_line(&out)["verdict"], "NotBreaking");

    let out = run(&["certify", "--N", "5", "--alpha", "1", "--beta", "1", "--tol", "1e30"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("lab.conf");
    std::fs::write(&cfg, "# corrupt the sign band\ncertify_tol = 1e30\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let base = ["certify", "--N", "5", "--alpha", "1", "--beta", "1", "--config", cfg];
    assert_eq!(run(&base).status.code(), Some(1));
    let mut with_flag = base.to_vec();
    with_flag.extend(["--tol", "1e-9"]);
    assert_eq!(run(&with_flag).status.code(), Some(0));

    std::fs::write(dir.path().join("bad.conf"), "colour = blue\n").unwrap();
    let bad = dir.path().join("bad.conf");
    let out = run(&[
        "constants",
        "--N",
        "5",
        "--alpha",
        "1",
        "--beta",
        "1",
        "--config",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let missing = dir.path().join("missing.conf");
    let out = run(&[
        "constants",
        "--N",
        "5",
        "--alpha",
        "1",
        "--beta",
        "1",
        "--config",
        missing.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unwritable_output_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("no/such/dir/out.csv");
    let out = run(&[
        "scan",
        "--N",
        "5",
        "--alpha",
        "1",
        "--beta",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn single_point_scan_matches_constants() {
    let out = run(&["scan", "--N", "5", "--alpha", "1", "--beta", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], ckn_lab::scan::CSV_HEADER);
    assert_eq!(lines.len(), 2);
    let cells: Vec<&str> = lines[1].split(',').collect();
    let c = json_line(&run(&[
        "constants",
        "--N",
        "5",
        "--alpha",
        "1",
        "--beta",
        "1",
        "--json",
    ]));
    assert_eq!(cells[3], c["class"]);
    assert_eq!(cells[5].parse::<f64>().unwrap(), c["s_r"].as_f64().unwrap());
    assert_eq!(cells[4].parse::<f64>().unwrap(), c["beta_fs"].as_f64().unwrap());
    assert_eq!(cells[8], "", "wall time stays blank without --timing");
}

#[test]
fn scan_rows_are_consistent() {
    let out = run(&[
        "scan", "--N", "5", "--alpha", "0.1:2:20", "--beta", "auto:20", "--jobs", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = 0;
    for line in text.lines().skip(1) {
        rows += 1;
        let c: Vec<&str> = line.split(',').collect();
        let (a, b): (f64, f64) = (c[1].parse().unwrap(), c[2].parse().unwrap());
        assert_eq!(c[3], ckn_lab::params::classify(5, a, b).as_str(), "{line}");
        if c[3] == "SymmetryBreaking" {
            assert!(c[6].parse::<f64>().unwrap() < 0.0, "{line}");
        }
    }
    assert_eq!(rows, 400);
}

#[test]
fn scan_json_lines_and_env_threads() {
    let out = Command::new(BIN)
        .args(["scan", "--N", "6", "--alpha", "0.5:1.5:3", "--beta", "auto:4", "--json"])
        .env("CKN_LAB_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let recs: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 12);
    for r in &recs {
        assert_eq!(r["N"], 6);
        assert!(r["s_r"].as_f64().is_some());
    }
    let bad = Command::new(BIN)
        .args(["scan", "--N", "5", "--alpha", "1", "--beta", "1"])
        .env("CKN_LAB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn scan_timing_fills_wall_time() {
    let out = run(&["scan", "--N", "5", "--alpha", "1", "--beta", "1", "--timing"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let last = text.lines().nth(1).unwrap().rsplit(',').next().unwrap();
    assert!(last.parse::<f64>().unwrap() >= 0.0);
}

#[test]
fn fs_curve_records() {
    let out = run(&["fs-curve", "--N", "5", "--alpha", "0.5:2:4", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    for l in text.lines() {
        let v: Value = serde_json::from_str(l).unwrap();
        assert!(v["abs_diff"].as_f64().unwrap() < 1e-4);
    }
    assert_eq!(run(&["fs-curve", "--N", "5", "--alpha", "-1"]).status.code(), Some(2));
}

#[test]
fn transform_check_passes_on_the_extremal() {
    for (n, a, b) in [("5", "1", "1"), ("7", "-3", "-4.5"), ("12", "6", "7.2")] {
        let out = run(&["transform-check", "--N", n, "--alpha", a, "--beta", b, "--json"]);
        assert_eq!(out.status.code(), Some(0), "{n} {a} {b}");
        let v = json_line(&out);
        assert!(v["max_residual"].as_f64().unwrap() < 1e-6);
    }
}

#[test]
fn verify_all_and_fault_hook() {
    let out = run(&["verify-all", "--level", "fast"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), ckn_lab::verify::check_names().len());
    assert!(text.lines().all(|l| l.starts_with("PASS")));

    let out = run(&["verify-all", "--level", "fast", "--inject-fault"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("extremality"));
}
