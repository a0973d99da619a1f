use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rggres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rggres"))
        .args(args)
        .env_remove("RUST_BACKTRACE")
        .output()
        .expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = rggres(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn generate(dir: &Path, extra: &[&str]) -> String {
    let path = dir.join("graph.json").display().to_string();
    let mut args = vec!["generate", "--out", path.as_str()];
    args.extend_from_slice(extra);
    json_ok(&args);
    path
}

#[test]
fn critical_q_at_twice_the_critical_density() {
    let v = json_ok(&["theory", "critical-q", "--lambda", "2.87"]);
    assert!((v["q_c"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn critical_phi_at_ten_is_zero() {
    let v = json_ok(&["theory", "critical-phi", "--lambda", "10"]);
    assert_eq!(v["phi"], 0);
}

#[test]
fn csv_output_has_header_and_row() {
    let out = rggres(&["theory", "k0", "--lambda", "1", "--d", "6", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let header: Vec<&str> = lines[0].split(',').collect();
    let values: Vec<&str> = lines[1].split(',').collect();
    let k0 = header.iter().position(|h| *h == "k0").unwrap();
    assert_eq!(values[k0].parse::<f64>().unwrap(), 110.0);
}

#[test]
fn generate_then_attack() {
    let dir = tempfile::tempdir().unwrap();
    let graph = generate(dir.path(), &["--nodes", "1600", "--width", "25", "--seed", "5"]);
    let v = json_ok(&["fail", "--graph", &graph, "--rule", "attack:4", "--seed", "1", "--mask"]);
    assert_eq!(v["nodes"], 1600);
    let alive = v["alive"].as_array().unwrap();
    let operational = alive.iter().filter(|a| a.as_bool().unwrap()).count();
    assert_eq!(v["operational"].as_u64().unwrap() as usize, operational);
    assert!(v["largest_component"].as_u64().unwrap() <= 160);
    assert_eq!(v["seed"], 1);
}

#[test]
fn same_seed_same_output() {
    let dir = tempfile::tempdir().unwrap();
    let graph = generate(dir.path(), &["--lambda", "3", "--width", "12", "--seed", "9"]);
    let args = [
        "cascade",
        "--graph",
        &graph,
        "--distribution",
        "uniform",
        "--seed",
        "4",
        "--rounds",
    ];
    assert_eq!(json_ok(&args), json_ok(&args));
}

#[test]
fn missing_seed_is_reported() {
    let out = rggres(&["generate", "--lambda", "1", "--width", "3"]);
    assert!(out.status.success());
    assert!(stderr(&out).starts_with("seed: "), "{}", stderr(&out));
}

#[test]
fn subcritical_density_warns() {
    let out = rggres(&["theory", "nondecreasing", "--lambda", "1", "--rule", "indep:0.1"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("warning"));
}

#[test]
fn wrong_monotonicity_is_an_error() {
    let out = rggres(&["theory", "nondecreasing", "--lambda", "2", "--rule", "table:0.9,0.1;tail=0"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("non-decreasing"), "{}", stderr(&out));
}

#[test]
fn malformed_inputs_fail_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{").unwrap();
    let out = rggres(&["fail", "--graph", bad.to_str().unwrap(), "--rule", "attack:4"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("malformed JSON"), "{}", stderr(&out));

    std::fs::write(
        &bad,
        r#"{"region":{"width":2,"height":2},"radius":1,"points":[[0.5,0.5],[2.5,1.0]]}"#,
    )
    .unwrap();
    let out = rggres(&["fail", "--graph", bad.to_str().unwrap(), "--rule", "attack:4"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("points[1]"), "{}", stderr(&out));

    let out = rggres(&["fail", "--graph", "/no/such/file.json", "--rule", "attack:4"]);
    assert!(!out.status.success());

    let out = rggres(&["theory", "critical-q", "--lambda", "1.0"]);
    assert!(!out.status.success());

    let out = rggres(&["theory", "no-cascade", "--lambda", "1", "--distribution", "pieces:0,1,2"]);
    assert!(!out.status.success());
}

#[test]
fn missing_boundary_warns_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    std::fs::write(
        &path,
        r#"{"region":{"width":3,"height":3},"radius":1,"points":[[0.5,0.5],[1.2,0.5]]}"#,
    )
    .unwrap();
    let out = rggres(&["fail", "--graph", path.to_str().unwrap(), "--rule", "indep:0", "--seed", "1"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("open-box"));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["largest_component"], 2);
}

#[test]
fn sweep_runs_a_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(
        &config,
        r#"{"kind":"failure-sweep","region":{"width":8,"height":8},"lambdas":[3],
            "rules":["indep:0","indep:1"],"trials":4,"base_seed":2}"#,
    )
    .unwrap();
    let v = json_ok(&["sweep", "--config", config.to_str().unwrap()]);
    assert_eq!(v["config"]["base_seed"], 2);
    assert_eq!(v["points"][1]["estimate"], 0.0);
    assert!(v["version"].is_string());

    let out = rggres(&["sweep", "--config", config.to_str().unwrap(), "--format", "csv", "--seed", "3"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3);
}

#[test]
fn circuits_report_count_and_bound() {
    let v = json_ok(&["theory", "circuits", "--m", "3"]);
    assert_eq!(v["count"], 4);
    assert_eq!(v["bound"], "216");
}
