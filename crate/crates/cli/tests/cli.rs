use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn netcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netcap")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn analyze_counts_dense_parameters() {
    let arch = fixture("dense_2_3_1.json");
    let out = netcap(&["analyze", "--arch", arch.to_str().unwrap(), "--eps", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    assert_eq!(r["payload"]["architecture"]["free_param_count"], 14);
    assert_eq!(r["payload"]["covering"].as_array().unwrap().len(), 1);
    assert_eq!(r["seed"], 0);
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["input_digest"].as_str().unwrap().len(), 64);
    assert_eq!(r["command"][1], "analyze");
}

#[test]
fn analyze_payload_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let arch = fixture("tiny_1_1_1.json");
    let mut payloads = Vec::new();
    for sub in ["a", "b"] {
        let d = dir.path().join(sub);
        let out = netcap(&["analyze", "--arch", arch.to_str().unwrap(), "--eps", "0.5,0.25", "--out", d.to_str().unwrap(), "--quiet"]);
        assert_eq!(out.status.code(), Some(0));
        let r: Value = serde_json::from_str(&std::fs::read_to_string(d.join("report.json")).unwrap()).unwrap();
        payloads.push(serde_json::to_string(&r["payload"]).unwrap());
        let csv = std::fs::read_to_string(d.join("covering.csv")).unwrap();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("epsilon,log2_tight,log2_relaxed,log2_chain"));
    }
    assert_eq!(payloads[0], payloads[1]);
}

#[test]
fn analyze_input_errors_exit_two() {
    let arch = fixture("dense_2_3_1.json");
    let out = netcap(&["analyze", "--arch", arch.to_str().unwrap(), "--eps", ""]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("ε list is empty"));

    let bad = fixture("malformed.json");
    let out = netcap(&["analyze", "--arch", bad.to_str().unwrap(), "--eps", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("parse error") && stderr(&out).contains("line 3"));

    let out = netcap(&["analyze", "--arch", "/nonexistent/arch.json", "--eps", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corrupted_fixture_names_the_violation() {
    let bad = fixture("corrupted_radius.json");
    let out = netcap(&["verify", "--arch", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert!(msg.contains("validation error") && msg.contains("outside [-R, R]"), "{msg}");
}

#[test]
fn default_verify_passes_on_shipped_fixtures() {
    let out = netcap(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    assert_eq!(r["pass"], true);
    let suites = r["payload"]["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 6);
    assert!(suites.iter().all(|s| s["pass"] == true), "{suites:?}");
}

#[test]
fn verify_honours_suite_selection() {
    let out = netcap(&["verify", "--suite", "separation,codes"]);
    assert_eq!(out.status.code(), Some(0));
    let names: Vec<String> = report(&out)["payload"]["suites"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["name"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(names, ["codes", "separation"]);
    assert_eq!(netcap(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn hard_instance_small_family_passes() {
    let out = netcap(&["hard-instance", "--d", "1", "--r", "1", "--c0", "8", "--nstar", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let p = &report(&out)["payload"];
    assert!(p["separation"]["min_distance"].as_f64().unwrap() >= 0.25 - p["separation"]["est_tolerance"].as_f64().unwrap());
    assert_eq!(p["membership"]["pass"], true);
    assert_eq!(p["localization"]["pass"], true);
}

#[test]
fn single_cell_family_is_plus_minus_bump() {
    let out = netcap(&["hard-instance", "--d", "1", "--r", "1", "--c0", "8", "--nstar", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let p = &report(&out)["payload"];
    assert_eq!(p["members"], 2);
    let mut words: Vec<i64> = p["family"]["code"]["words"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w[0].as_i64().unwrap())
        .collect();
    words.sort();
    assert_eq!(words, [-1, 1]);
    assert_eq!(p["separation"]["violation"], false);
}

#[test]
fn same_seed_same_code_words() {
    let args = ["hard-instance", "--d", "2", "--r", "0.5", "--c0", "100", "--nstar", "5", "--seed", "3", "--pairs", "10", "--members", "1", "--holder-pairs", "100"];
    let a = report(&netcap(&args));
    let b = report(&netcap(&args));
    assert_eq!(a["payload"]["family"]["code"], b["payload"]["family"]["code"]);
    assert_eq!(a["payload"], b["payload"]);
    assert_eq!(a["seed"], 3);
}

#[test]
fn infeasible_bump_reports_minimal_c0() {
    let out = netcap(&["hard-instance", "--d", "1", "--r", "1", "--c0", "0.1", "--nstar", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("minimal admissible c0"));
}

#[test]
fn oversized_families_are_input_errors() {
    for args in [
        ["hard-instance", "--d", "1", "--r", "1", "--c0", "8", "--n", "4"],
        ["hard-instance", "--d", "2", "--r", "1", "--c0", "100", "--n", "100000"],
    ] {
        let out = netcap(&args);
        assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
        assert!(stderr(&out).contains("size limit"));
    }
}

#[test]
fn gap_tables() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = netcap(&["gap", "--r", "1", "--d", "2", "--L", "3", "--n-range", "16:1024", "--out", d, "--quiet"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("gap.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 7 * 5);
    for row in rows.iter().take(5) {
        let cols: Vec<&str> = row.split(',').collect();
        if cols[3] == "false" {
            assert_eq!(cols[2].parse::<f64>().unwrap(), 1.0);
        }
    }

    let out = netcap(&["gap", "--r", "1", "--d", "1", "--L", "2", "--n-range", "64"]);
    assert_eq!(report(&out)["payload"]["rows"].as_array().unwrap().len(), 1);
    assert_eq!(netcap(&["gap", "--r", "1", "--d", "1", "--L", "2", "--n-range", "9:3"]).status.code(), Some(2));
}

#[test]
fn bounds_reproduce_reference_constants() {
    let out = netcap(&["bounds", "--r", "1", "--d", "1", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let p = &report(&out)["payload"];
    assert_eq!(p["relation"]["n_star"], 3524);
    let c = p["relation"]["constant"].as_f64().unwrap();
    assert!((c / 2.493_492_180_367_697e-4 - 1.0).abs() < 1e-12);
    assert_eq!(netcap(&["bounds", "--r", "1", "--d", "1", "--n", "1"]).status.code(), Some(2));
}

#[test]
fn replay_reproduces_payload() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("run");
    let arch = fixture("shared_d2.json");
    let out = netcap(&["analyze", "--arch", arch.to_str().unwrap(), "--eps", "0.5", "--out", d.to_str().unwrap(), "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = d.join("report.json");
    let out = netcap(&["replay", rep.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(report(&out)["payload"]["payload_match"], true);

    // a tampered payload no longer replays
    let mut r: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    r["payload"]["architecture"]["free_param_count"] = 99.into();
    std::fs::write(&rep, serde_json::to_string(&r).unwrap()).unwrap();
    let out = netcap(&["replay", rep.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
