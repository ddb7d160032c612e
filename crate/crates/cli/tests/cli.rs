use std::path::Path;
use std::process::{Command, Output};

use hyperpoincare::report::{compare_golden, ReportEnvelope};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hyperpoincare"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn hyperpoincare")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = run(&full);
    let v: Value = serde_json::from_slice(&out.stdout).expect("json on stdout");
    (out.status.code().unwrap(), v)
}

fn rows(v: &Value) -> &Vec<Value> {
    v["table"]["rows"].as_array().unwrap()
}

fn column(v: &Value, name: &str) -> usize {
    v["table"]["columns"]
        .as_array()
        .unwrap()
        .iter()
        .position(|c| c == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

fn lookup(v: &Value, name: &str) -> Value {
    rows(v).iter().find(|r| r[0] == name).unwrap()[1].clone()
}

#[test]
fn constants_thirteen_four() {
    let (code, v) = json(&["constants", "--N", "13", "--p", "4"]);
    assert_eq!(code, 0);
    assert_eq!(lookup(&v, "LambdaP").as_f64().unwrap(), 81.0);
    let c = lookup(&v, "C").as_f64().unwrap();
    assert!((c - 1.0 / (8.0 + 4.0 * 2f64.sqrt())).abs() < 1e-15);
    assert_eq!(v["params"]["N"], 13);
    assert_eq!(v["payload_kind"], "constants");
}

#[test]
fn two_dim_printed_form_fails_cross_check() {
    let (code, v) = json(&["constants", "--N", "2", "--p", "1.5"]);
    assert_eq!(code, 1);
    let pass = column(&v, "pass");
    let row = |name: &str| rows(&v).iter().find(|r| r[0] == name).unwrap()[pass].clone();
    assert_eq!(row("c_2p"), false);
    assert_eq!(row("c_2p_from_gamma"), true);
}

#[test]
fn verify_pgap_batch_is_deterministic() {
    let args = [
        "verify", "--kind", "pgap", "--N", "3", "--p", "2", "--trials", "100", "--seed", "7",
    ];
    let (code, v) = json(&args);
    assert_eq!(code, 0);
    assert_eq!(rows(&v).len(), 100);
    let pass = column(&v, "pass");
    assert!(rows(&v).iter().all(|r| r[pass] == true));
    assert_eq!(v["seed"], 7);
    let again = run(&args);
    let first = run(&args);
    assert_eq!(again.stdout, first.stdout);
}

#[test]
fn thread_count_does_not_change_output() {
    let args = [
        "verify", "--kind", "THM25", "--N", "7", "--p", "3", "--trials", "8", "--seed", "3",
    ];
    let one = bin()
        .args(args)
        .env("HYPERPOINCARE_THREADS", "1")
        .output()
        .unwrap();
    let four = bin()
        .args(args)
        .env("HYPERPOINCARE_THREADS", "4")
        .output()
        .unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    let bad = bin()
        .args(args)
        .env("HYPERPOINCARE_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn hypothesis_violation_exits_two() {
    let (code, v) = json(&[
        "verify", "--kind", "thm25", "--N", "3", "--p", "3", "--trials", "2",
    ]);
    assert_eq!(code, 2);
    assert_eq!(v["payload_kind"], "checks");
    assert_eq!(rows(&v)[0][0], "hypothesis");
    let diags = v["diagnostics"].as_array().unwrap();
    assert!(diags
        .iter()
        .any(|d| d.as_str().unwrap().contains("N >= 1 + p(p-1)")));
}

#[test]
fn invalid_combinations_rejected() {
    let out = run(&[
        "verify", "--kind", "pgap", "--N", "3", "--p", "2", "--l", "1.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "verify",
        "--kind",
        "hardy1d",
        "--N",
        "3",
        "--p",
        "2",
        "--allow-origin",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["sharpness", "--kind", "thm23", "--N", "3", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["rp-scan", "--N", "13", "--p", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["constants", "--N", "1", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["verify", "--kind", "nope", "--N", "3", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_lists_kind_tags() {
    let out = run(&["verify", "--help"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for tag in [
        "PGAP", "PROP11", "THM23", "THM25", "COR27", "THM29", "THM32", "THM72", "HARDY1D",
    ] {
        assert!(text.contains(tag), "{tag} missing from help");
    }
}

#[test]
fn figure1_curve_and_marker() {
    let out = run(&["figure1", "--N", "13", "--p", "4"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,Hp,is_ge_one"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let (marker, curve) = rows.split_last().unwrap();
    assert_eq!(marker[2], "r_p");
    let rp: f64 = marker[0].parse().unwrap();
    assert!((rp - 1.16833149).abs() < 1e-7);
    let hp_rp: f64 = marker[1].parse().unwrap();
    assert!((hp_rp - 1.0).abs() < 1e-12);
    assert_eq!(curve.len(), 1500);
    for r in curve {
        let x: f64 = r[0].parse().unwrap();
        assert_eq!(r[2] == "true", x <= rp, "at r = {x}");
    }
    // The first sample past r_p is where the curve drops below one.
    let crossing = curve.iter().position(|r| r[2] == "false").unwrap();
    let x: f64 = curve[crossing][0].parse().unwrap();
    assert!(x > rp && x - rp <= 0.01);
}

#[test]
fn rp_scan_both_directions() {
    let (code, v) = json(&["rp-scan", "--p", "3", "--n-values", "7,13,40"]);
    assert_eq!(code, 0);
    let rp = column(&v, "rp");
    let r: Vec<f64> = rows(&v).iter().map(|x| x[rp].as_f64().unwrap()).collect();
    assert!(r.windows(2).all(|w| w[1] > w[0]));
    let (code, v) = json(&["rp-scan", "--N", "13", "--p-values", "2.5,3,4"]);
    assert_eq!(code, 0);
    let (fd, imp) = (column(&v, "slope_fd"), column(&v, "slope_implicit"));
    for row in rows(&v) {
        let (a, b) = (row[fd].as_f64().unwrap(), row[imp].as_f64().unwrap());
        assert!((a - b).abs() < 1e-6 * b.abs());
    }
    let (code, _) = json(&["rp-scan", "--N", "13", "--p-values", "5"]);
    assert_eq!(code, 2);
}

#[test]
fn sharpness_and_proofcheck_pass() {
    let (code, _) = json(&["sharpness", "--kind", "pgap", "--N", "4", "--p", "2.5"]);
    assert_eq!(code, 0);
    let (code, v) = json(&[
        "sharpness",
        "--kind",
        "HARDY1D",
        "--N",
        "4",
        "--p",
        "3",
        "--schedule",
        "0.1,0.01",
    ]);
    assert_eq!(code, 0);
    assert_eq!(rows(&v).len(), 2);
    let (code, v) = json(&["proofcheck", "--N", "13", "--p", "4", "--trials", "2000"]);
    assert_eq!(code, 0);
    assert_eq!(rows(&v).len(), 5);
    let (code, _) = json(&[
        "sharpness",
        "--kind",
        "pgap",
        "--N",
        "4",
        "--p",
        "2.5",
        "--schedule",
        "0.01,0.1",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn weights_grid() {
    let (code, v) = json(&[
        "weights",
        "--N",
        "5",
        "--p",
        "3",
        "--r-max",
        "4",
        "--samples",
        "8",
    ]);
    assert_eq!(code, 0);
    assert_eq!(rows(&v).len(), 8);
    let w = column(&v, "W");
    assert!(rows(&v).iter().all(|r| r[w].as_f64().unwrap() > 0.0));
}

#[test]
fn output_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rp.json");
    let out = run(&[
        "rp",
        "--N",
        "13",
        "--p",
        "4",
        "--format",
        "json",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let env = ReportEnvelope::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(env.command, "rp");
    let missing = dir.path().join("no/such/dir/out.csv");
    let out = run(&[
        "rp",
        "--N",
        "13",
        "--p",
        "4",
        "--output",
        missing.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

fn golden(name: &str, args: &[&str]) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let out = run(&full);
    let env = ReportEnvelope::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    let diff = compare_golden(&path, &env, 1e-9).unwrap();
    assert!(diff.is_empty(), "{diff:?}");
}

#[test]
fn golden_rp() {
    golden("rp_13_4.json", &["rp", "--N", "13", "--p", "4"]);
}

#[test]
fn golden_constants() {
    golden(
        "constants_13_4.json",
        &["constants", "--N", "13", "--p", "4"],
    );
}

#[test]
fn golden_verify() {
    golden(
        "verify_thm29_13_4.json",
        &[
            "verify", "--kind", "thm29", "--N", "13", "--p", "4", "--trials", "5", "--seed", "11",
        ],
    );
}
