use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn qbnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbnet")).args(args).output().unwrap()
}

fn report(args: &[&str]) -> Value {
    let out = qbnet(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn bound_upper_reports_argmin_and_provenance() {
    let r = report(&["bound-upper", "--network", &data("fig1.json"), "--family", "S1", "--strategy", "exhaustive"]);
    assert_eq!(r["tool"], "qbnet");
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    let fams = r["result"]["families"].as_array().unwrap();
    assert_eq!(fams.len(), 1);
    let b = &fams[0]["bound"];
    assert_eq!(b["family"], "S1");
    assert!(b["value"].as_f64().unwrap() > 0.0);
    assert!(b["partition_text"].as_str().unwrap().contains('|'));
}

#[test]
fn bound_upper_region_and_joint_requirement() {
    let r = report(&["bound-upper", "--network", &data("bottleneck.json"), "--region", "--require", "AB=2", "--require", "CD=2"]);
    assert_eq!(r["result"]["region"].as_array().unwrap().len(), 3);
    assert!((r["result"]["joint"]["rhs"].as_f64().unwrap() - 3.0).abs() < 1e-9);
}

#[test]
fn epsilon_flags_go_together() {
    let out = qbnet(&["bound-upper", "--network", &data("star.json"), "--epsilon", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&["bound-upper", "--network", &data("star.json"), "--epsilon", "0.1", "--b", "1", "--g", "0"]);
    let v = r["result"]["families"][0]["bound_with_epsilon"].as_f64().unwrap();
    assert!((v - 2.0 / 0.9 / 2.0).abs() < 1e-12);
}

#[test]
fn bound_lower_star_has_one_tree() {
    let r = report(&["bound-lower", "--network", &data("star.json"), "--family", "ABC", "--method", "exact"]);
    let f = &r["result"]["families"][0];
    assert_eq!(f["achievable"], 1);
    assert_eq!(f["packing"]["trees"][0]["edge_ids"][0], "b#0");
}

#[test]
fn bound_lower_needs_copies_for_noisy_edges() {
    assert_eq!(qbnet(&["bound-lower", "--network", &data("fig1.json")]).status.code(), Some(2));
    let r = report(&["bound-lower", "--network", &data("fig1.json"), "--copies", &data("fig1_copies.json")]);
    assert_eq!(r["inputs"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_entropic_counts() {
    let r = report(&["verify", "--suite", "entropic", "--seed", "7"]);
    assert_eq!(r["seed"], 7);
    assert_eq!(r["result"]["all_passed"], true);
    for s in r["result"]["suites"].as_array().unwrap() {
        assert_eq!(s["checks"], s["passed"]);
    }
}

#[test]
fn simulate_script_and_extraction() {
    let r = report(&["simulate", "--network", &data("chain.json"), "--script", &data("scripts/chain_swap.json"), "--partition", "A|v|B"]);
    let t = &r["result"]["traces"][0];
    assert_eq!(t["violations"], 0);
    assert!((t["final_value"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    let r = report(&["simulate", "--network", &data("fig1.json"), "--family", "S2", "--copies", &data("fig1_copies.json")]);
    assert!((r["result"]["extractions"][0]["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn export_dot_and_report_file() {
    let path = std::env::temp_dir().join(format!("qbnet-dot-{}.dot", std::process::id()));
    let out = qbnet(&["export-dot", "--network", &data("star.json"), "--partition", "{s,A}|{B}|{C}", "--report", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(text.contains("\"he_b\""));
    assert!(text.contains("cluster_p2"));
}

#[test]
fn threads_flag_and_env() {
    let a = qbnet(&["--threads", "1", "bound-upper", "--network", &data("star.json")]);
    let b = Command::new(env!("CARGO_BIN_EXE_qbnet"))
        .env("QBNET_THREADS", "3")
        .args(["bound-upper", "--network", &data("star.json")])
        .output()
        .unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn invalid_input_exits_2() {
    let bad = std::env::temp_dir().join(format!("qbnet-bad-{}.json", std::process::id()));
    std::fs::write(&bad, r#"{"vertices": ["A"], "edges": [{"id": "e", "tail": "A", "heads": ["Z"], "channel": {"kind": "ideal_broadcast", "dim": 2}, "avg_uses": 1}], "families": []}"#).unwrap();
    let out = qbnet(&["bound-upper", "--network", bad.to_str().unwrap()]);
    std::fs::remove_file(&bad).ok();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Z"));
    assert_eq!(qbnet(&["bound-upper", "--network", "/nonexistent.json"]).status.code(), Some(2));
}
