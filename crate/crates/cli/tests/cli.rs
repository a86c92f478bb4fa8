use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn relcyc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relcyc")).args(args).env_remove("RELCYC_MAX_DIM").output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn comparable(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn compute_dual_numbers() {
    let path = data("dual.json");
    let out = relcyc(&["compute", "--hh", "--hc", "--nmax", "5", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let t = &r["tables"];
    assert_eq!(t["hh"], serde_json::json!([1, 1, 1, 1, 1, 1]));
    assert_eq!(t["hc"], serde_json::json!([1, 0, 1, 0, 1, 0]));
    assert_eq!(t["hh"], t["hh_oracle"]);
    assert_eq!(t["hc"], t["hc_oracle"]);
    assert_eq!(r["certificates"][0]["name"], "oracle_match");
    assert_eq!(r["passed"], true);
}

#[test]
fn hc_only_table() {
    let path = data("dual.json");
    let r = report(&relcyc(&["compute", "--hc", "--nmax", "2", path.to_str().unwrap()]));
    assert!(r["tables"].get("hh").is_none());
    assert_eq!(r["tables"]["hc"], serde_json::json!([1, 0, 1]));
}

#[test]
fn identities_suite_on_quartic() {
    let path = data("quartic.json");
    let out = relcyc(&["verify", "--suite", "identities", "--vmax", "8", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let certs = r["certificates"].as_array().unwrap();
    assert_eq!(certs.len(), 1);
    let records = certs[0]["ledger"]["records"].as_array().unwrap();
    assert!(records.len() > 10);
    assert!(records.iter().all(|x| x["holds"] == true));
}

#[test]
fn split_ideal_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let emitted = dir.path().join("split.json");
    let path = data("quartic.json");
    let out = relcyc(&["split-ideal", "--out", emitted.to_str().unwrap(), path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&emitted).unwrap()).unwrap();
    assert_eq!(doc["basis"].as_array().unwrap().len(), 2);
    assert_eq!(doc["bimodule"]["basis"].as_array().unwrap().len(), 2);
    assert!(doc.get("cocycle").is_some());
    assert!(doc.get("ideal").is_none());

    let via_split = report(&relcyc(&["compute", "--nmax", "3", emitted.to_str().unwrap()]));
    let via_ideal = report(&relcyc(&["compute", "--nmax", "3", path.to_str().unwrap()]));
    assert_eq!(via_split["tables"], via_ideal["tables"]);
}

#[test]
fn reports_are_deterministic() {
    let path = data("quartic.json");
    let args = ["compute", "--nmax", "3", path.to_str().unwrap()];
    assert_eq!(comparable(report(&relcyc(&args))), comparable(report(&relcyc(&args))));
}

#[test]
fn text_output() {
    let path = data("dual.json");
    let out = relcyc(&["compute", "--nmax", "3", "--text", path.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("HC bar       1     0     1     0"), "{text}");
    assert!(text.contains("[PASS] oracle_match"));
}

#[test]
fn out_file_holds_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let path = data("dual.json");
    let out = relcyc(&["validate", "--out", target.to_str().unwrap(), path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(r["output"]["kind"], "split_extension");
}

#[test]
fn non_associative_input_exits_2() {
    let path = data("bad.json");
    let out = relcyc(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("associativity"));
}

#[test]
fn unknown_fields_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x.json");
    std::fs::write(&p, r#"{"basis":["1"],"mult":[[["1"]]],"units":0}"#).unwrap();
    let out = relcyc(&["validate", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
}

#[test]
fn memory_budget_is_enforced() {
    let path = data("quartic.json");
    let out = Command::new(env!("CARGO_BIN_EXE_relcyc"))
        .args(["compute", "--nmax", "6", path.to_str().unwrap()])
        .env("RELCYC_MAX_DIM", "1000")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the budget 1000"));
}

#[test]
fn failed_certificate_exits_1() {
    // M = (x^2) in Q[x]/(x^8) has M^2 != 0, so m = 1 does not apply
    let path = data("octic.json");
    let out = relcyc(&["nilpotence", "--m", "1", "--nmax", "0", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["passed"], false);
}

#[test]
fn goodwillie_on_dual_numbers() {
    let path = data("dual.json");
    let out = relcyc(&["goodwillie", "--nmax", "5", "--vmax", "8", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["certificates"][0]["details"]["hp_relative"], serde_json::json!([0, 0, 0, 0, 0, 0]));
}
