use rgg_resilience::experiments::{recipes, Bisection};
use rgg_resilience::io::{load_config, load_graph, result_to_json, save_graph, write_result_csv};
use rgg_resilience::{
    estimate_lambda_c, generate_poisson, run_sweep, Boundary, ExperimentConfig, ExperimentError,
    ExperimentKind, Proxy, Region, SpatialGraph, SweepResult,
};

fn sweep(kind: ExperimentKind) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(kind, Region::square(12.0, Boundary::OpenBox).unwrap(), 40, 2024);
    c.lambdas = vec![0.8, 1.6, 2.4, 3.2];
    c
}

#[test]
fn percolation_is_monotone_in_density() {
    let r = run_sweep(&sweep(ExperimentKind::PercolationSweep)).unwrap();
    for w in r.points.windows(2) {
        let slack = 3.0 * (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
        assert!(w[1].estimate + slack >= w[0].estimate, "{} then {}", w[0].estimate, w[1].estimate);
    }
    assert!(r.points[0].estimate < r.points[3].estimate);
}

#[test]
fn stronger_failures_percolate_less() {
    let mut c = sweep(ExperimentKind::FailureSweep);
    c.lambdas = vec![3.0];
    c.rules = ["indep:0", "indep:0.2", "indep:0.4", "indep:0.6"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let r = run_sweep(&c).unwrap();
    for w in r.points.windows(2) {
        let slack = 3.0 * (w[0].stderr.powi(2) + w[1].stderr.powi(2)).sqrt();
        assert!(w[1].estimate <= w[0].estimate + slack);
    }
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let mut c = sweep(ExperimentKind::FailureSweep);
    c.rules = vec!["attack:5".parse().unwrap(), "margin".parse().unwrap()];
    c.proxy = Proxy::GiantFraction { theta: 0.2 };
    let r = run_sweep(&c).unwrap();
    let mut buf = Vec::new();
    write_result_csv(&r, &mut buf).unwrap();
    let mut rows = csv::Reader::from_reader(buf.as_slice());
    let headers = rows.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let back: SweepResult = serde_json::from_str(&result_to_json(&r)).unwrap();
    assert_eq!(back, r);
    let records: Vec<_> = rows.records().map(|r| r.unwrap()).collect();
    assert_eq!(records.len(), r.points.len());
    for (row, p) in records.iter().zip(&back.points) {
        assert_eq!(row[col("estimate")].parse::<f64>().unwrap(), p.estimate);
        assert_eq!(row[col("stderr")].parse::<f64>().unwrap(), p.stderr);
        assert_eq!(row[col("lambda")].parse::<f64>().unwrap(), p.lambda.unwrap());
        assert_eq!(&row[col("rule")], p.rule.as_deref().unwrap());
    }
}

#[test]
fn cascade_records_are_complete() {
    let mut c = recipes::spreading_cascade(6, 8);
    c.nodes = Some(400);
    c.region = Region::square(8.0, Boundary::OpenBox).unwrap();
    let r = run_sweep(&c).unwrap();
    let p = &r.points[0];
    assert_eq!(p.records.len(), 6);
    for rec in &p.records {
        let cas = rec.cascade.as_ref().unwrap();
        assert_eq!(rec.nodes, 400);
        assert_eq!(rec.operational + cas.failed_count, 400);
        assert!(cas.largest_failed_fraction <= cas.failed_fraction);
        assert!(cas.max_isolated_reliable_neighbors <= 6);
        assert_eq!(cas.feasible, cas.seed_node.is_some());
    }
}

#[test]
fn config_and_graph_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("config.json");
    let config = recipes::stubborn_cascade(10, 3);
    std::fs::write(&cfg_path, serde_json::to_string_pretty(&config).unwrap()).unwrap();
    assert_eq!(load_config(&cfg_path).unwrap(), config);

    let graph_path = dir.path().join("graph.json");
    let region = Region::square(7.0, Boundary::Torus).unwrap();
    let g = SpatialGraph::build(generate_poisson(2.0, region, 5).unwrap(), 1.2).unwrap();
    save_graph(&g, &graph_path).unwrap();
    let back = load_graph(&graph_path).unwrap();
    assert_eq!(back.graph.points(), g.points());
    assert_eq!(back.graph.radius(), 1.2);
    assert_eq!(back.graph.degrees(), g.degrees());
}

#[test]
fn bad_config_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"kind":"failure-sweep","region":{"width":5,"height":5},"trials":3,"base_seed":1}"#)
        .unwrap();
    let err = load_config(&path).unwrap_err().to_string();
    assert!(err.contains("at least one rule"), "{err}");
    std::fs::write(&path, r#"{"kind":"nonsense"}"#).unwrap();
    assert!(load_config(&path).is_err());
    assert!(load_config(dir.path().join("missing.json")).is_err());
}

#[test]
fn lambda_c_estimate_rejects_small_regions_and_bad_brackets() {
    let mut c = recipes::critical_density(4, 1);
    c.region = Region::square(20.0, Boundary::OpenBox).unwrap();
    assert!(matches!(estimate_lambda_c(&c), Err(ExperimentError::Config(_))));
    let mut c = recipes::critical_density(4, 1);
    c.bisection = Some(Bisection {
        lo: 3.0,
        hi: 4.0,
        width: 0.02,
    });
    assert!(matches!(estimate_lambda_c(&c), Err(ExperimentError::NotBracketing { .. })));
}
