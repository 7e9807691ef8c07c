use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn sunrot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sunrot")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn rotset_s1_json() {
    let s1 = fixture("s1.json");
    let out = sunrot(&["rotset", s1.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["schema"], "sunrot/1");
    assert_eq!(v["rot_R"]["lo"], "1/3");
    assert_eq!(v["rot_R"]["hi"], "1/3");
    assert_eq!(v["rot_R"]["rigor"], "rigorous-enclosure");
    assert_eq!(v["components"][0]["lo"], "1");
    assert_eq!(v["components"][0]["hi"], "1");
    assert_eq!(v["merged"], serde_json::json!([["1/3", "1/3"], ["1", "1"]]));
    assert_eq!(v["rigor"], "rigorous");
}

#[test]
fn json_output_is_byte_deterministic() {
    let f = fixture("three_cells.json");
    let a = sunrot(&["rotset", f.to_str().unwrap(), "--json"]);
    let b = sunrot(&["rotset", f.to_str().unwrap(), "--json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn digests_agree_across_commands() {
    let f = fixture("leaky_tail.json");
    let p = f.to_str().unwrap();
    let rot = json_of(&sunrot(&["rotset", p, "--json"]));
    let part = json_of(&sunrot(&["partition", p, "--json"]));
    let graph = json_of(&sunrot(&["covgraph", p, "--json"]));
    assert_eq!(rot["partition_digest"], part["digest"]);
    assert_eq!(rot["graph_digest"], graph["digest"]);
}

#[test]
fn partition_cells() {
    let out = sunrot(&["partition", fixture("s1.json").to_str().unwrap(), "--json"]);
    let v = json_of(&out);
    assert_eq!(v["cells"], serde_json::json!([{"branch": 0, "a": "1/4", "b": "3/4", "ell": 0, "p": 1}]));
}

#[test]
fn periodic_s1() {
    let out = sunrot(&["periodic", fixture("s1.json").to_str().unwrap(), "--rho", "1", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["point"], serde_json::json!({"B": [0, "1/3", 0]}));
    assert_eq!((v["q"].as_u64(), v["p"].as_i64()), (Some(1), Some(1)));
    assert_eq!(v["rho"], "1");
    assert_eq!(v["verified"]["passed"], true);
}

#[test]
fn periodic_from_tail_and_missing_value() {
    let f = fixture("swap_tail.json");
    let out = sunrot(&["periodic", f.to_str().unwrap(), "--rho", "1/2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["verified"]["passed"], true);
    let out = sunrot(&["periodic", f.to_str().unwrap(), "--rho", "1/5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn broken_map_exits_one_with_chart_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(
        &path,
        r#"{ "branches": [{"attach": "0", "length": "1"}],
             "line": [["0", {"R": "0"}], ["1/2", {"B": [0, "1", 0]}], ["1", {"R": "1"}]],
             "branch_maps": [[["0", {"R": "0"}], ["1", {"R": "0"}]]] }"#,
    )
    .unwrap();
    let out = sunrot(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("ChartPair"), "{text}");
    // later stages refuse the map with the same status
    let out = sunrot(&["rotset", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("validate"));
}

#[test]
fn schema_and_io_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{ "line": 3 }"#).unwrap();
    assert_eq!(sunrot(&["partition", path.to_str().unwrap()]).status.code(), Some(3));
    let missing = dir.path().join("missing.json");
    assert_eq!(sunrot(&["partition", missing.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn covgraph_writes_dot() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("g.dot");
    let out = sunrot(&["covgraph", fixture("s1.json").to_str().unwrap(), "--dot", dot.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dot).unwrap();
    assert!(text.starts_with("digraph"));
    assert!(text.contains("w=1"));
}

#[test]
fn orbit_text_and_json() {
    let f = fixture("s1.json");
    let out = sunrot(&["orbit", f.to_str().unwrap(), "--x", "B:0,1/3,0", "--steps", "5", "--json"]);
    let v = json_of(&out);
    assert_eq!(v["rho"], "1");
    assert_eq!(v["itinerary"], serde_json::json!([0, 0, 0, 0, 0, 0]));
    let out = sunrot(&["orbit", f.to_str().unwrap(), "--x", "R:0", "--steps", "3"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("empirical rho 1"));
}

#[test]
fn capped_run_is_approximate() {
    let f = fixture("creeping_tail.json");
    let v = json_of(&sunrot(&["rotset", f.to_str().unwrap(), "--json", "--h-max", "16"]));
    assert_eq!(v["rigor"], "approximate");
    assert_eq!(v["undetermined"], serde_json::json!([0]));
}

#[test]
fn human_mode_shows_approximations() {
    let out = sunrot(&["rotset", fixture("s1.json").to_str().unwrap()]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("1/3 (≈0.333333)"), "{text}");
    assert!(text.contains("Rot(F) = {1/3 (≈0.333333)} ∪ {1}"), "{text}");
}

#[test]
fn bad_flags_are_rejected() {
    // clap usage errors keep clap's own status; value checks happen in the binary
    let f = fixture("s1.json");
    assert_eq!(sunrot(&["rotset", f.to_str().unwrap(), "--h-max", "0"]).status.code(), Some(1));
    assert_eq!(sunrot(&["rotset", f.to_str().unwrap(), "--tol=-1"]).status.code(), Some(1));
}
