//! End-to-end checks of the `rsp` binary: document shapes, determinism and
//! exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

fn rsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rsp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rsp-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

#[test]
fn help_and_usage_exit_codes() {
    assert_eq!(rsp(&["--help"]).status.code(), Some(0));
    assert_eq!(rsp(&[]).status.code(), Some(2));
    assert_eq!(rsp(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn network_document_shape() {
    let doc = stdout_json(&rsp(&["network"]));
    assert_eq!(doc["version"], 1);
    assert_eq!(doc["nodes"].as_array().unwrap().len(), 3);
    assert_eq!(doc["cycles"].as_array().unwrap().len(), 5);
    let connections = doc["connections"].as_array().unwrap();
    assert_eq!(connections.len(), 6);
    let first = connections
        .iter()
        .find(|c| c["from"] == "xi0" && c["to"] == "xi1")
        .expect("winning connection present");
    assert_eq!(first["representative"], serde_json::json!(["RP", "SP"]));
    assert_eq!(first["moving_player"], "x");
}

#[test]
fn composite_matrix_at_zero_ties() {
    let doc = stdout_json(&rsp(&[
        "maps", "--cycle", "C0", "--node", "xi0", "--kind", "composite", "--eps-x", "0",
        "--eps-y", "0",
    ]));
    assert_eq!(doc["version"], 1);
    assert_eq!(doc["kind"], "composite");
    let expected = [[-0.25, 0.5, 1.0], [0.75, -0.5, 0.0], [0.5, 1.0, 0.0]];
    let rows = doc["rows"].as_array().unwrap();
    for (row, want) in rows.iter().zip(&expected) {
        for (value, w) in row.as_array().unwrap().iter().zip(want) {
            assert!((value.as_f64().unwrap() - w).abs() < 1e-12);
        }
    }
}

#[test]
fn maps_rejects_nodes_off_the_cycle() {
    let out = rsp(&[
        "maps", "--cycle", "C1", "--node", "xi0", "--eps-x", "0.1", "--eps-y", "0.1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn indices_json_schema() {
    let doc = stdout_json(&rsp(&["indices", "--eps-x", "-0.3", "--eps-y", "-0.3"]));
    assert_eq!(doc["version"], 1);
    let results = doc["results"].as_array().unwrap();
    assert_eq!(results.len(), 5);
    let c0 = &results[0];
    assert_eq!(c0["cycle"], "C0");
    assert_eq!(c0["path"], "closed");
    assert_eq!(c0["classification"], "EAS");
    let sigma = c0["sigma"].as_object().unwrap();
    assert!((sigma["xi0"].as_f64().unwrap() - 1.2071428571428573).abs() < 1e-12);
    let c3 = &results[3];
    assert_eq!(c3["classification"], "CU");
    assert_eq!(c3["sigma"]["xi0"], "-inf");
}

#[test]
fn indices_boundary_points_have_empty_sigma() {
    let doc = stdout_json(&rsp(&[
        "indices", "--eps-x", "0.2", "--eps-y", "-0.2", "--cycle", "C0",
    ]));
    let c0 = &doc["results"][0];
    assert_eq!(c0["classification"], "Boundary");
    assert!(c0["sigma"].as_object().unwrap().is_empty());
}

#[test]
fn indices_csv_layout() {
    let out = rsp(&["indices", "--eps-x", "-0.3", "--eps-y", "-0.3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "cycle,path,eps_x,eps_y,node,sigma,classification");
    // One row per node: two each for C0..C2, three each for C3, C4.
    assert_eq!(lines.len(), 1 + 2 + 2 + 2 + 3 + 3);
    assert!(lines[1].starts_with("C0,closed,"));
    assert!(lines[1].ends_with(",EAS"));
}

#[test]
fn regions_rejects_coarse_grids() {
    let out = rsp(&["regions", "--resolution", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least 11"));
}

#[test]
fn regions_output_is_deterministic() {
    let a = rsp(&["regions", "--resolution", "15"]);
    let b = rsp(&["regions", "--resolution", "15"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "eps_x,eps_y,C0,C1,C2,C3,C4");
    assert_eq!(lines.len(), 1 + 15 * 15);
}

#[test]
fn simulate_writes_both_artifacts() {
    let dir = scratch_dir("simulate");
    let prefix = dir.join("run");
    let out = rsp(&[
        "simulate", "--eps-x", "-0.3", "--eps-y", "-0.3", "--initial",
        "0.25,0.5,0.25,0.2,0.3,0.5", "--t-max", "5", "--out",
        prefix.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let traj = std::fs::read_to_string(dir.join("run.trajectory.csv")).unwrap();
    let itin = std::fs::read_to_string(dir.join("run.itinerary.csv")).unwrap();
    assert!(traj.starts_with("t,x1,x2,x3,y1,y2,y3\n"));
    assert_eq!(traj.lines().count(), 1 + 5001);
    assert!(itin.starts_with("label,entry,exit\n"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn simulate_rejects_malformed_initial_states() {
    let bad_arity = rsp(&[
        "simulate", "--eps-x", "0.1", "--eps-y", "0.1", "--initial", "0.5,0.5,0,0.5",
        "--out", "/tmp/unused",
    ]);
    assert_eq!(bad_arity.status.code(), Some(2));
    let off_simplex = rsp(&[
        "simulate", "--eps-x", "0.1", "--eps-y", "0.1", "--initial",
        "0.9,0.9,0.9,0.2,0.3,0.5", "--out", "/tmp/unused",
    ]);
    assert_eq!(off_simplex.status.code(), Some(2));
}

#[test]
fn basin_document_is_deterministic() {
    let args = [
        "basin", "--cycle", "C0", "--eps-x", "-0.3", "--eps-y", "-0.3", "--samples",
        "100", "--horizon", "60", "--seed", "7",
    ];
    let a = rsp(&args);
    let b = rsp(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let doc: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["version"], 1);
    assert_eq!(doc["samples"], 100);
    let fraction = doc["fraction"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&fraction));
}

#[test]
fn io_failures_use_their_own_exit_code() {
    let dir = scratch_dir("io-error");
    let file = dir.join("occupied");
    std::fs::write(&file, "x").unwrap();
    // Using an existing file as a directory component forces an IO error.
    let target = file.join("out.json");
    let out = rsp(&[
        "basin", "--cycle", "C0", "--eps-x", "-0.3", "--eps-y", "-0.3", "--samples",
        "100", "--horizon", "60", "--out", target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let _ = std::fs::remove_dir_all(&dir);
}
