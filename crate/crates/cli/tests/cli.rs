use std::process::{Command, Output};

use serde_json::Value;

fn qswitch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qswitch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = qswitch(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn run_demo_point_is_maximally_entangled() {
    let report = json(&[
        "run", "--omega-z", "0.5", "--chi-ma", "1", "--chi-nb", "1", "--t", "2", "--initial", "00",
        "--sign", "minus", "--check", "maximal-entanglement", "--check", "psi-minus",
    ]);
    assert!((num(&report["concurrence"]) - 1.0).abs() < 1e-8);
    assert_eq!(report["sign"], "minus");
    assert_eq!(report["initial"], "00");
    for check in report["checks"].as_array().unwrap() {
        assert_eq!(check["passed"], true, "{check}");
    }
    assert_eq!(report["reduced_state_re"].as_array().unwrap().len(), 16);
}

#[test]
fn run_numbers_round_trip_through_text() {
    let out = qswitch(&["--format", "json", "run", "--t", "1.2345678901234567"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let report: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(num(&report["params"]["t"]), 1.2345678901234567);
    // Every number is printed with enough digits to parse back exactly.
    let p = num(&report["probability"]);
    assert!(text.contains(&qswitch::sweep::format_sig17(p)));
    let re: Vec<f64> = report["reduced_state_re"].as_array().unwrap().iter().map(num).collect();
    let trace = re[0] + re[5] + re[10] + re[15];
    assert!((trace - 1.0).abs() < 1e-12);
}

#[test]
fn run_empty_branch_exits_3() {
    let out = qswitch(&["run", "--chi-ma", "0", "--chi-nb", "0", "--t", "1", "--sign", "minus"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("threshold 1e-12"), "{err}");
}

#[test]
fn run_at_zero_time_returns_initial_state() {
    let report = json(&["run", "--t", "0", "--sign", "plus", "--initial", "10"]);
    assert!((num(&report["probability"]) - 1.0).abs() < 1e-12);
    let re: Vec<f64> = report["reduced_state_re"].as_array().unwrap().iter().map(num).collect();
    let im: Vec<f64> = report["reduced_state_im"].as_array().unwrap().iter().map(num).collect();
    for k in 0..16 {
        let want = if k == 10 { 1.0 } else { 0.0 };
        assert!((re[k] - want).abs() < 1e-12 && im[k].abs() < 1e-12, "entry {k}");
    }
}

#[test]
fn bad_flags_exit_2() {
    for args in [
        vec!["run", "--t", "nan"],
        vec!["run", "--omega-z", "inf"],
        vec!["run", "--initial", "02"],
        vec!["run", "--sign", "sideways"],
        vec!["gcurve", "--points", "0"],
        vec!["gcurve", "--t-max", "-1"],
        vec!["sweep"],
        vec!["sweep", "--out", "x.csv", "--grid-n", "1"],
        vec!["--format", "yaml", "table1"],
    ] {
        assert_eq!(qswitch(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn failed_check_is_nonzero() {
    let out = qswitch(&["run", "--check", "phi-plus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gcurve_columns() {
    let report = json(&["gcurve", "--omega-z", "0.5", "--chi-ma", "1", "--t-max", "40", "--points", "200"]);
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 200);
    assert!(num(&rows[0]["g"]) < 1e-3);
    assert!(num(&report["max_abs_diff"]) <= 1e-8);
    assert_eq!(num(&rows[199]["t"]), 40.0);

    let printed = json(&["gcurve", "--as-printed", "--points", "200"]);
    assert_eq!(printed["form"], "as-printed");
    assert!(num(&printed["max_abs_diff"]) > 1.0);

    let zero = json(&["gcurve", "--chi-ma", "0", "--points", "10"]);
    for row in zero["rows"].as_array().unwrap() {
        assert_eq!(num(&row["g"]), 0.0);
        assert!(num(&row["p_sim"]).abs() < 1e-15);
    }
}

#[test]
fn gcurve_text_has_four_columns() {
    let out = qswitch(&["gcurve", "--points", "5"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(data.len(), 5);
    for line in data {
        let cols: Vec<f64> = line.split_whitespace().map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 4);
        assert!(((cols[1] - cols[2]).abs() - cols[3]).abs() < 1e-15);
    }
}

#[test]
fn gcurve_writes_discrepancy_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.txt");
    let out = qswitch(&["gcurve", "--points", "20", "--report", path.to_str().unwrap()]);
    assert!(out.status.success());
    let report = std::fs::read_to_string(&path).unwrap();
    assert!(report.contains("verdict"));
}

#[test]
fn table1_reports_every_row() {
    let out = qswitch(&["--format", "json", "table1"]);
    let rows: Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let by_label = |l: &str| rows.iter().find(|r| r["row"] == l).unwrap();
    assert_eq!(by_label("A")["passed"], true);
    assert_eq!(by_label("B")["passed"], true);
    for l in ["C", "D"] {
        assert!(by_label(l)["phi"].is_number());
    }
    let all_pass = rows.iter().all(|r| r["passed"] == true);
    assert_eq!(out.status.success(), all_pass);
}

#[test]
fn table1_wrong_ratio_fails_row_a() {
    let out = qswitch(&["table1", "--ratio", "2"]);
    assert_ne!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("row A [FAIL]")), "{text}");
}

#[test]
fn sweep_writes_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let run = |path: &std::path::Path, workers: &str| {
        let out = qswitch(&[
            "sweep", "--out", path.to_str().unwrap(), "--grid-n", "3", "--t-max", "30", "--workers", workers,
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    };
    run(&a, "1");
    run(&b, "3");
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    let text = String::from_utf8(bytes).unwrap();
    assert!(text.ends_with('\n'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,k,t_star,p_star,concurrence");
    assert_eq!(lines.len(), 10);
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 5);
    }
}

#[test]
fn sweep_unwritable_path_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let out = qswitch(&["sweep", "--out", path.to_str().unwrap(), "--grid-n", "2"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn sweep_json_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let summary = json(&["sweep", "--out", path.to_str().unwrap(), "--grid-n", "2", "--t-max", "20"]);
    assert_eq!(summary["rows"], 4);
}

#[test]
fn sweep_default_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("default.csv");
    let out = qswitch(&["sweep", "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4096);
    let stripe: Vec<f64> = rows
        .iter()
        .filter(|r| r[0].parse::<f64>().unwrap() == 1.0)
        .map(|r| r[4].parse().unwrap())
        .collect();
    assert_eq!(stripe.len(), 64);
    assert!(stripe.iter().all(|&c| c >= 0.99));
}
