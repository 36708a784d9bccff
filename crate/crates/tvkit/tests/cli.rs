//! CLI contract: exit codes, report files, and byte-identical outputs
//! for identical configurations.

use std::path::Path;
use std::process::Command;

fn tvkit() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tvkit"))
}

fn run_in(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let out = tvkit()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn report_dirs(root: &Path) -> Vec<std::path::PathBuf> {
    let mut dirs: Vec<_> = std::fs::read_dir(root)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    dirs.sort();
    dirs
}

#[test]
fn exit_code_contract() {
    let tmp = tempdir("exit-codes");
    // malformed polynomial token -> 2, message names the token
    let (code, _, err) = run_in(&tmp, &["modulus", "--poly", "1,zap,3", "--out", "r"]);
    assert_eq!(code, 2, "stderr: {err}");
    assert!(
        err.contains("zap"),
        "message should name the offending token: {err}"
    );
    // malformed density -> 2
    let (code, _, _) = run_in(
        &tmp,
        &[
            "tv",
            "--f",
            "0,1",
            "--g",
            "0,2",
            "--density",
            "cauchy",
            "--out",
            "r",
        ],
    );
    assert_eq!(code, 2);
    // malformed grid -> 2
    let (code, _, _) = run_in(
        &tmp,
        &["modulus", "--poly", "0,1", "--u", "1:2", "--out", "r"],
    );
    assert_eq!(code, 2);
    // unknown suite -> 2
    let (code, _, _) = run_in(&tmp, &["experiment", "nope", "--out", "r"]);
    assert_eq!(code, 2);
    // lebesgue with a >= b -> 2
    let (code, _, _) = run_in(
        &tmp,
        &[
            "modulus",
            "--poly",
            "0,1",
            "--density",
            "lebesgue:1,0",
            "--out",
            "r",
        ],
    );
    assert_eq!(code, 2);
    // constant map cannot be decomposed -> 2
    let (code, _, _) = run_in(&tmp, &["modulus", "--poly", "5", "--out", "r"]);
    assert_eq!(code, 2);
    // --help exits 0
    let (code, _, _) = run_in(&tmp, &["--help"]);
    assert_eq!(code, 0);
}

#[test]
fn modulus_run_produces_expected_files_and_fit() {
    let tmp = tempdir("modulus-files");
    let (code, stdout, err) = run_in(
        &tmp,
        &[
            "modulus",
            "--poly",
            "0,0,1",
            "--density",
            "gauss",
            "--u",
            "1e-4:1:12",
            "--out",
            "runs",
        ],
    );
    assert_eq!(code, 0, "stderr: {err}\nstdout: {stdout}");
    let dirs = report_dirs(&tmp.join("runs"));
    assert_eq!(dirs.len(), 1);
    for f in ["report.json", "curve.csv", "plot.dat"] {
        assert!(dirs[0].join(f).exists(), "{f} missing");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dirs[0].join("report.json")).unwrap())
            .unwrap();
    // chi-squared shift modulus fits alpha ~ 0.5
    let alpha = report["slopes"][0]["slope"].as_f64().unwrap();
    assert!((alpha - 0.5).abs() < 0.05, "fitted alpha {alpha}");
    let csv = std::fs::read_to_string(dirs[0].join("curve.csv")).unwrap();
    assert!(csv.starts_with("u,delta\n"));
    assert_eq!(csv.lines().count(), 13); // header + 12 rows
}

#[test]
fn identical_configs_are_byte_identical() {
    let tmp = tempdir("determinism");
    let args = [
        "experiment",
        "gauss-poly",
        "--m",
        "2",
        "--deltas",
        "1e-3:1e-1:4",
        "--seed",
        "9",
        "--mc-samples",
        "40000",
        "--bins",
        "256",
        "--out",
    ];
    let mut a1 = args.to_vec();
    a1.push("run-a");
    let (code, _, err) = run_in(&tmp, &a1);
    assert_eq!(code, 0, "stderr: {err}");
    let mut a2 = args.to_vec();
    a2.push("run-b");
    let (code, _, _) = run_in(&tmp, &a2);
    assert_eq!(code, 0);
    let da = report_dirs(&tmp.join("run-a"));
    let db = report_dirs(&tmp.join("run-b"));
    for f in ["report.json", "curve.csv", "plot.dat"] {
        let ba = std::fs::read(da[0].join(f)).unwrap();
        let bb = std::fs::read(db[0].join(f)).unwrap();
        assert_eq!(ba, bb, "{f} differs between identical runs");
    }
}

#[test]
fn vandermonde_suite_reports_nonzero() {
    let tmp = tempdir("vandermonde");
    let (code, _, err) = run_in(
        &tmp,
        &["experiment", "vandermonde", "--n-max", "8", "--out", "v"],
    );
    assert_eq!(code, 0, "stderr: {err}");
    let dirs = report_dirs(&tmp.join("v"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dirs[0].join("report.json")).unwrap())
            .unwrap();
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    for row in rows {
        assert_eq!(row[1].as_f64().unwrap(), 1.0, "nonzero flag");
        assert_eq!(row[2].as_f64().unwrap(), 1.0, "dense agreement flag");
    }
    // big integers serialized as decimal strings
    assert_eq!(report["extra"][2]["delta"].as_str().unwrap(), "3110400");
}

#[test]
fn bound_command_chain_holds() {
    let tmp = tempdir("bound");
    let (code, _, err) = run_in(
        &tmp,
        &[
            "bound",
            "--f",
            "0,0,1",
            "--g",
            "0,0.1,1",
            "--density",
            "gauss",
            "--out",
            "b",
        ],
    );
    assert_eq!(code, 0, "stderr: {err}");
    let dirs = report_dirs(&tmp.join("b"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dirs[0].join("report.json")).unwrap())
            .unwrap();
    let row = report["rows"][0].as_array().unwrap();
    let (tv, d1, d2, d3, sum, clamped, l1) = (
        row[0].as_f64().unwrap(),
        row[1].as_f64().unwrap(),
        row[2].as_f64().unwrap(),
        row[3].as_f64().unwrap(),
        row[4].as_f64().unwrap(),
        row[5].as_f64().unwrap(),
        row[6].as_f64().unwrap(),
    );
    assert!((l1 - 0.0797884560803).abs() < 1e-9, "l1 = {l1}");
    assert!(tv <= sum + 1e-5, "tv {tv} vs decomposition {sum}");
    // columns are independently rounded to 12 significant digits
    assert!((d1 + d2 + d3 - sum).abs() < 1e-9);
    assert!(sum <= clamped + 1e-5);
}

fn tempdir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("tvkit-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
