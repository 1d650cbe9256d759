use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strongmech"))
        .args(args)
        .env("RUST_LOG", "off")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn verify_two_agents_passes() {
    let path = scenario("two_agents.json");
    let out = run(&["verify", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["meta"]["command"], "verify");
    assert_eq!(doc["meta"]["scenario_hash"].as_str().unwrap().len(), 64);
    let body = &doc["body"];
    assert_eq!(body["pass"], true);
    assert_eq!(body["hypothesis_holds"], true);
    assert_eq!(body["eta_bound"].as_f64().unwrap(), 4.0 * 0.5 * 4.0 * 0.0014 / 0.5);
}

#[test]
fn spite_outside_hypothesis_exits_zero() {
    let path = scenario("spite.json");
    let out = run(&["verify", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["body"]["hypothesis_holds"], false);
}

#[test]
fn unknown_field_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"extra": 1}"#).unwrap();
    let out = run(&["verify", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = &json(&out)["error"];
    assert_eq!(err["kind"], "validation");
    assert_eq!(err["path"], "extra");
}

#[test]
fn unbounded_rule_is_rejected() {
    let out = run(&["convert", "--rule", "logarithmic"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_overflow_reports_size() {
    let path = scenario("two_agents.json");
    let out = run(&["verify", "--scenario", path.to_str().unwrap(), "--grid-step", "0.0001"]);
    assert_eq!(out.status.code(), Some(3));
    let err = &json(&out)["error"];
    assert_eq!(err["kind"], "budget");
    // 10001 own bids, 10001 opponent bids, 2 opponent value corners, 2 agents
    assert_eq!(err["required"].as_u64().unwrap(), 10001 * 10001 * 2 * 2);
}

#[test]
fn embedded_scenario_round_trips() {
    let path = scenario("three_agents.json");
    let first = json(&run(&["run", "--scenario", path.to_str().unwrap()]));
    let dir = tempfile::tempdir().unwrap();
    let copy = dir.path().join("copy.json");
    std::fs::write(&copy, serde_json::to_string(&first["scenario"]).unwrap()).unwrap();
    let second = json(&run(&["run", "--scenario", copy.to_str().unwrap()]));
    assert_eq!(first["meta"]["scenario_hash"], second["meta"]["scenario_hash"]);
    assert_eq!(first["scenario"], second["scenario"]);
    assert_eq!(first["body"], second["body"]);
}

#[test]
fn expected_run_matches_hand_computation() {
    let path = scenario("two_agents.json");
    let doc = json(&run(&["run", "--scenario", path.to_str().unwrap()]));
    let u = doc["body"]["expectation"]["expected_utility"].as_array().unwrap();
    // VCG 0.4 and 0; linear TE v b - b^2 / 2 with truthful bids
    let agent1 = 0.5 * 0.4 + 0.25 * (0.81 - 0.405);
    let agent2 = 0.25 * (0.25 - 0.125);
    assert!((u[0].as_f64().unwrap() - agent1).abs() < 1e-12);
    assert!((u[1].as_f64().unwrap() - agent2).abs() < 1e-12);
}

#[test]
fn sampling_is_reproducible_and_writes_out() {
    let path = scenario("two_agents.json");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sample.json");
    let args = |o: &str| {
        run(&["run", "--scenario", path.to_str().unwrap(), "--mode", "sample", "--samples", "2000", "--seed", "7", "--out", o])
    };
    assert_eq!(args(out.to_str().unwrap()).status.code(), Some(0));
    let a: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    args(out.to_str().unwrap());
    let b: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(a["body"], b["body"]);
    let draws = a["body"]["vcg_draws"].as_u64().unwrap()
        + a["body"]["te_draws"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).sum::<u64>();
    assert_eq!(draws, 2000);
}

#[test]
fn sweep_rows_carry_exact_bounds() {
    let path = scenario("two_agents.json");
    let out = run(&[
        "sweep", "--scenario", path.to_str().unwrap(), "--param", "gamma", "--range", "0,0.002", "--steps", "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 5);
    for row in &rows {
        let gamma: f64 = row[col("gamma")].parse().unwrap();
        let eta: f64 = row[col("eta_bound")].parse().unwrap();
        assert_eq!(eta, 4.0 * (1.0 - 0.5) * 4.0 * gamma / 0.5);
        let holds = &row[col("hypothesis_holds")] == "true";
        assert_eq!(holds, gamma < 0.05 * 0.5 / (8.0 * 0.25 * 8.0));
    }
}

#[test]
fn analyze_linear_mechanism_is_optimal() {
    let out = run(&["analyze-mech", "--mech", r#"{"kind":"linear","L":1,"H":3}"#]);
    assert_eq!(out.status.code(), Some(0));
    let body = &json(&out)["body"];
    assert_eq!(body["monotone"]["pass"], true);
    let ratio = body["modulus"]["ratio_to_optimal"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() < 1e-6);
}

#[test]
fn malformed_descriptor_points_at_mech() {
    let out = run(&["analyze-mech", "--mech", r#"{"kind":"linear","L":2,"H":1}"#]);
    assert_eq!(out.status.code(), Some(2));
}
