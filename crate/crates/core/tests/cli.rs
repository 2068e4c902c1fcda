use std::path::Path;
use std::process::{Command, Output};

use switchsched::model::{validate_schedule, Instance, IntegralSchedule};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_switchsched")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Vec<u8> {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_then_solve_mrt_validates_with_overload_budget() {
    let dir = tempfile::tempdir().unwrap();
    let inst_path = dir.path().join("inst.json");
    ok(&["gen", "--m", "4", "--n", "6", "--d-max", "2", "--seed", "1", "-o", path_str(&inst_path)]);
    let inst = Instance::from_json(&std::fs::read_to_string(&inst_path).unwrap()).unwrap();
    assert_eq!(inst.len(), 6);

    let out: serde_json::Value = serde_json::from_slice(&ok(&["solve-mrt", "-i", path_str(&inst_path)])).unwrap();
    let budget = out["budget"].as_u64().unwrap();
    assert_eq!(budget, 2 * inst.max_demand() as u64 - 1);
    let sched: IntegralSchedule = serde_json::from_value(out["schedule"].clone()).unwrap();
    assert!(validate_schedule(&inst, &sched, budget).unwrap().is_valid());
    assert!(out["max_overload"].as_u64().unwrap() <= budget);
}

#[test]
fn simulate_writes_one_row_per_policy_and_seed() {
    let csv = ok(&["simulate", "--m", "4", "--rate", "2", "--horizon", "5", "--seeds", "10"]);
    let text = String::from_utf8(csv).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("policy,m,M,T,seed"));
    assert_eq!(lines.count(), 3 * 10);
}

#[test]
fn report_aggregates_simulator_output() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim.csv");
    ok(&["simulate", "--m", "3", "--rate", "1,2", "--horizon", "4", "--seeds", "2", "--policy", "MinRTime", "--lp-bounds", "-o", path_str(&sim)]);
    let text = String::from_utf8(ok(&["report", path_str(&sim)])).unwrap();
    assert_eq!(text.lines().count(), 1 + 2);
}

#[test]
fn empty_instance_costs_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let inst_path = dir.path().join("empty.json");
    ok(&["gen", "--m", "2", "--n", "0", "-o", path_str(&inst_path)]);
    let art: serde_json::Value = serde_json::from_slice(&ok(&["solve-art", "-i", path_str(&inst_path)])).unwrap();
    assert_eq!(art["total_response"], 0);
    assert_eq!(art["lp_lower_bound"].as_f64(), Some(0.0));
    let bound: serde_json::Value = serde_json::from_slice(&ok(&["bound", "-i", path_str(&inst_path)])).unwrap();
    assert_eq!(bound["flows"], 0);
}

#[test]
fn timetable_input_is_reduced() {
    let dir = tempfile::tempdir().unwrap();
    let rtt = dir.path().join("rtt.json");
    std::fs::write(&rtt, r#"{"T": [[1, 2], [1, 2]], "g": [[0, 1], [0, 1]]}"#).unwrap();
    let inst = Instance::from_json(&String::from_utf8(ok(&["gen", "--rtt", path_str(&rtt)])).unwrap()).unwrap();
    // Four lessons, three blockers per class, one gadget per teacher.
    assert_eq!(inst.len(), 4 + 6 + 2 * 4);
}

#[test]
fn errors_are_reported_as_json() {
    let usage = run(&["solve-mrt"]);
    assert_eq!(usage.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&usage.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "usage");

    let missing = run(&["bound", "-i", "/nonexistent/instance.json"]);
    assert_eq!(missing.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&missing.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "io");

    assert!(run(&["--help"]).status.success());
}
