//! End-to-end runs of the command-line binary.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_periodic-hall-cli"));
    cmd.args(args);
    if let Some(dir) = cache {
        cmd.env("PERIODIC_HALL_CACHE_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn one_periodic_square() {
    let o = run(&["mult", "--t", "1", "U:S@0", "U:S@0"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "1/2·U[S⊕S] + 1/2·K[(1)]");
}

#[test]
fn unit_is_echoed() {
    let o = run(&["mult", "--t", "3", "1", "U:P1@2"], None);
    assert_eq!(stdout(&o).trim(), "U[P1@2]");
    let o = run(&["mult", "--t", "3", "Z:S1@1", "1"], None);
    assert_eq!(stdout(&o).trim(), "Z[S1@1]");
}

#[test]
fn derived_adjacent_pair_matches_relation() {
    let o = run(&["mult", "--t", "3", "--engine", "both", "Z:S2@0", "Z:S1@1"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("dh-adjacent"), "{}", out);
    assert!(out.contains("verdict: equal"), "{}", out);
}

#[test]
fn both_engines_agree_and_json_is_exact() {
    let o = run(&["mult", "--t", "3", "--engine", "both", "--json", "U:S1@0", "U:S2@1"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "equal");
    assert_eq!(v["quiver"], "a2");
    let terms = v["result"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["coeff"], serde_json::json!(["1/1", "0/1", "0/1", "0/1"]));
}

#[test]
fn two_periodic_products_use_the_hall_product() {
    let o = run(&["mult", "--t", "2", "U:S@0", "U:S@1"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "U[S@1]⋄U[S@0] + K[(1)@1] - K[(1)@0]");
    let o = run(&["mult", "--t", "2", "--engine", "rewrite", "U:S@0", "U:S@1"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("t=2"), "{}", stderr(&o));
}

#[test]
fn square_root_torus_factors() {
    let o = run(&["mult", "--t", "3", "sqrtK:-1,0@1", "U:S1@1"], None);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "sqrtK[(-1,0)@1]⋄U[S1@1]");
}

#[test]
fn parse_errors_report_a_position() {
    let o = run(&["mult", "--t", "1", "K:1,x@0", "U:S"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("position 4"), "{}", stderr(&o));
    let o = run(&["mult", "--t", "1", "U:T@0", "U:S"], None);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn enumerate_writes_then_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["enumerate", "--quiver", "a2", "--q", "2", "--bound", "3"], Some(dir.path()));
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("13 classes"), "{}", stdout(&o));
    let file = dir.path().join("a2-q2-b3.json");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(v["classes"].as_array().unwrap().len(), 13);
    assert_eq!(v["quiver"]["arrows"], serde_json::json!([[0, 1]]));
    let o = run(&["enumerate", "--quiver", "a2", "--q", "2", "--bound", "3"], Some(dir.path()));
    assert!(stdout(&o).contains("verified, unchanged"), "{}", stdout(&o));
}

#[test]
fn corrupt_cache_is_reported_with_a_diff() {
    let dir = tempfile::tempdir().unwrap();
    run(&["enumerate", "--quiver", "a1", "--bound", "2"], Some(dir.path()));
    let file = dir.path().join("a1-q2-b2.json");
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    v["classes"][1]["aut"] = serde_json::json!(5);
    std::fs::write(&file, serde_json::to_string(&v).unwrap()).unwrap();
    let o = run(&["enumerate", "--quiver", "a1", "--bound", "2"], Some(dir.path()));
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("/classes/1/aut"), "{}", stdout(&o));
}

#[test]
fn zero_bound_cache_has_one_class() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["enumerate", "--quiver", "a1", "--bound", "0"], Some(dir.path()));
    assert!(o.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a1-q2-b0.json")).unwrap()).unwrap();
    assert_eq!(v["classes"].as_array().unwrap().len(), 1);
}

#[test]
fn verify_euler_two_periodic() {
    let o = run(&["verify", "--suite", "euler", "--q", "2", "--t", "2"], None);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("verdict: pass"));
}

#[test]
fn verify_embedding_three_periodic() {
    let o = run(&["verify", "--suite", "embedding", "--t", "3", "--q", "2"], None);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("embedding-multiplicative"));
}

#[test]
fn empty_selection_passes_with_empty_report() {
    let o = run(&["verify", "--suite", "", "--json"], None);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["cases"], serde_json::json!([]));
    assert_eq!(v["passed"], true);
}

#[test]
fn odd_only_suites_reject_even_periods() {
    let o = run(&["verify", "--suite", "derived", "--t", "2"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("odd period"), "{}", stderr(&o));
}

#[test]
fn report_json_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = run(&["verify", "--suite", "assoc,derived", "--t", "3", "--output", p.to_str().unwrap()], None);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn exhausted_budget_exits_with_resource_status() {
    let o = Command::new(env!("CARGO_BIN_EXE_periodic-hall-cli"))
        .args(["verify", "--suite", "euler", "--t", "2", "--quiver", "a1"])
        .env("PERIODIC_HALL_COMPLEX_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_periodic-hall-cli"))
        .args(["mult", "--t", "1", "U:S", "U:S"])
        .env("PERIODIC_HALL_TUPLE_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn help_exits_zero() {
    assert!(run(&["--help"], None).status.success());
    assert_eq!(run(&["frobnicate"], None).status.code(), Some(1));
}
