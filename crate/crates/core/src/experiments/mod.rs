//! Monte Carlo experiment harness.
//!
//! An [`ExperimentConfig`] describes a grid of parameter points and a number
//! of trials per point. Trial `t` at point `p` is seeded with
//! `derive_seed(base_seed, [p, t])`, so results depend only on the config and
//! not on thread count or scheduling.

mod bisection;
pub mod recipes;
mod trials;

pub use bisection::{estimate_lambda_c, estimate_qc, Bisection, CriticalInterval, Evaluation};
pub use trials::{
    choose_seed_node, failure_seed, measure, run_cascade_trial, run_failure_trial,
    CascadeTrialRecord, GraphSpec, NodeCount, Proxy, RuleSpec, Seeding, TrialRecord,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::ThresholdDistribution;
use crate::error::ExperimentError;
use crate::geometry::{Boundary, Region};
use crate::seed::derive_seed;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Proxy probability of the full graph over `lambdas`.
    PercolationSweep,
    /// Proxy probability after failures, over `lambdas x rules`.
    FailureSweep,
    /// Cascades over `lambdas x distributions`; the proxy applies to the
    /// failed set.
    CascadeTrial,
    /// Bisection for the critical density.
    LambdaCEstimate,
}

fn default_radius() -> f64 {
    1.0
}

/// Full description of an experiment; serialized into every result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub region: Region,
    #[serde(default = "default_radius")]
    pub radius: f64,
    /// Poisson densities. Ignored when `nodes` is set.
    #[serde(default)]
    pub lambdas: Vec<f64>,
    /// Fixed node count instead of a Poisson process.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(default)]
    pub rules: Vec<RuleSpec>,
    #[serde(default)]
    pub distributions: Vec<ThresholdDistribution>,
    #[serde(default)]
    pub seeding: Seeding,
    #[serde(default)]
    pub proxy: Proxy,
    pub trials: usize,
    pub base_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bisection: Option<Bisection>,
}

impl ExperimentConfig {
    /// A config with no grid; fill in the fields the kind needs.
    pub fn new(kind: ExperimentKind, region: Region, trials: usize, base_seed: u64) -> Self {
        Self {
            kind,
            region,
            radius: 1.0,
            lambdas: Vec::new(),
            nodes: None,
            rules: Vec::new(),
            distributions: Vec::new(),
            seeding: Seeding::default(),
            proxy: Proxy::default(),
            trials,
            base_seed,
            bisection: None,
        }
    }

    pub fn trial_seed(&self, point: usize, trial: usize) -> u64 {
        derive_seed(self.base_seed, &[point as u64, trial as u64])
    }

    pub(crate) fn validate_common(&self) -> Result<(), ExperimentError> {
        self.region.validate()?;
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(ExperimentError::Config(format!(
                "radius must be positive, got {}",
                self.radius
            )));
        }
        if self.trials == 0 {
            return Err(ExperimentError::Config("trials must be at least 1".into()));
        }
        if self.proxy == Proxy::Crossing && self.region.boundary == Boundary::Torus {
            return Err(ExperimentError::Config(
                "the crossing proxy needs an open-box region; use giant-fraction on a torus".into(),
            ));
        }
        if let Proxy::GiantFraction { theta } = self.proxy {
            if !(theta > 0.0 && theta <= 1.0) {
                return Err(ExperimentError::Config(format!(
                    "giant-fraction theta must lie in (0, 1], got {theta}"
                )));
            }
        }
        if let Some(bad) = self.lambdas.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
            return Err(ExperimentError::Config(format!("invalid density {bad}")));
        }
        Ok(())
    }

    /// Checks that the grid for this kind is non-empty and well formed.
    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.validate_common()?;
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(ExperimentError::Config(format!(
                    "{} experiments need {what}",
                    kind_name(self.kind)
                )))
            }
        };
        match self.kind {
            ExperimentKind::PercolationSweep => need(!self.lambdas.is_empty(), "at least one density"),
            ExperimentKind::FailureSweep => {
                need(!self.rules.is_empty(), "at least one rule")?;
                need(self.nodes.is_some() || !self.lambdas.is_empty(), "densities or a node count")
            }
            ExperimentKind::CascadeTrial => {
                need(!self.distributions.is_empty(), "at least one threshold distribution")?;
                need(self.nodes.is_some() || !self.lambdas.is_empty(), "densities or a node count")
            }
            ExperimentKind::LambdaCEstimate => Ok(()),
        }
    }

    fn graph_specs(&self) -> Vec<GraphSpec> {
        let spec = |nodes| GraphSpec {
            region: self.region,
            radius: self.radius,
            nodes,
        };
        match self.nodes {
            Some(n) => vec![spec(NodeCount::Fixed(n))],
            None => self.lambdas.iter().map(|&l| spec(NodeCount::Poisson(l))).collect(),
        }
    }
}

fn kind_name(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::PercolationSweep => "percolation-sweep",
        ExperimentKind::FailureSweep => "failure-sweep",
        ExperimentKind::CascadeTrial => "cascade-trial",
        ExperimentKind::LambdaCEstimate => "lambda-c-estimate",
    }
}

/// Estimate at one grid point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointEstimate {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rule: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub distribution: Option<String>,
    /// Fraction of trials that satisfied the proxy.
    pub estimate: f64,
    pub stderr: f64,
    pub trials: usize,
    pub records: Vec<TrialRecord>,
}

impl PointEstimate {
    fn from_records(
        index: usize,
        spec: &GraphSpec,
        rule: Option<String>,
        distribution: Option<String>,
        records: Vec<TrialRecord>,
    ) -> Self {
        let trials = records.len();
        let p = records.iter().filter(|r| r.success).count() as f64 / trials as f64;
        let (lambda, nodes) = match spec.nodes {
            NodeCount::Fixed(n) => (None, Some(n)),
            NodeCount::Poisson(l) => (Some(l), None),
        };
        Self {
            index,
            lambda,
            nodes,
            rule,
            distribution,
            estimate: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
            records,
        }
    }
}

/// Everything a run produced, with enough metadata to repeat it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub version: String,
    pub proxy: String,
    pub config: ExperimentConfig,
    pub points: Vec<PointEstimate>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub interval: Option<CriticalInterval>,
}

fn run_point<F>(config: &ExperimentConfig, point: usize, trial: F) -> Result<Vec<TrialRecord>, ExperimentError>
where
    F: Fn(usize, u64) -> Result<TrialRecord, ExperimentError> + Sync,
{
    (0..config.trials)
        .into_par_iter()
        .map(|t| trial(t, config.trial_seed(point, t)))
        .collect()
}

/// Runs every grid point of `config`.
///
/// Points are ordered graph-major: for failure sweeps point
/// `g * rules.len() + r` pairs graph spec `g` with rule `r`, and likewise for
/// cascade distributions.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult, ExperimentError> {
    config.validate()?;
    let mut points = Vec::new();
    let mut interval = None;
    match config.kind {
        ExperimentKind::PercolationSweep => {
            for (g, spec) in config.graph_specs().iter().enumerate() {
                let records = run_point(config, g, |t, seed| {
                    let graph = spec.build(seed)?;
                    let alive = vec![true; graph.len()];
                    Ok(measure(&graph, &alive, config.proxy, t, seed)?)
                })?;
                points.push(PointEstimate::from_records(g, spec, None, None, records));
            }
        }
        ExperimentKind::FailureSweep => {
            for spec in config.graph_specs() {
                for rule in &config.rules {
                    let index = points.len();
                    let records = run_point(config, index, |t, seed| {
                        run_failure_trial(&spec, rule, config.proxy, t, seed)
                    })?;
                    points.push(PointEstimate::from_records(
                        index,
                        &spec,
                        Some(rule.to_string()),
                        None,
                        records,
                    ));
                }
            }
        }
        ExperimentKind::CascadeTrial => {
            for spec in config.graph_specs() {
                for dist in &config.distributions {
                    let index = points.len();
                    let records = run_point(config, index, |t, seed| {
                        run_cascade_trial(&spec, dist, config.seeding, config.proxy, t, seed)
                    })?;
                    points.push(PointEstimate::from_records(
                        index,
                        &spec,
                        None,
                        Some(dist.to_string()),
                        records,
                    ));
                }
            }
        }
        ExperimentKind::LambdaCEstimate => {
            interval = Some(estimate_lambda_c(config)?);
        }
    }
    Ok(SweepResult {
        version: VERSION.to_string(),
        proxy: config.proxy.describe(),
        config: config.clone(),
        points,
        interval,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::failure::FailureRule;

    fn small(kind: ExperimentKind) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(kind, Region::square(10.0, Boundary::OpenBox).unwrap(), 8, 11);
        c.lambdas = vec![0.5, 3.0];
        c
    }

    #[test]
    fn config_round_trip() {
        let mut c = small(ExperimentKind::FailureSweep);
        c.rules = vec![RuleSpec::Fixed(FailureRule::attack(4)), "margin".parse().unwrap()];
        c.distributions = vec![ThresholdDistribution::uniform()];
        c.proxy = Proxy::GiantFraction { theta: 0.1 };
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&text).unwrap(), c);
    }

    #[test]
    fn minimal_json_gets_defaults() {
        let c: ExperimentConfig = serde_json::from_str(
            r#"{"kind":"percolation-sweep","region":{"width":5,"height":5},"lambdas":[1],"trials":2,"base_seed":3}"#,
        )
        .unwrap();
        assert_eq!(c.radius, 1.0);
        assert_eq!(c.proxy, Proxy::Crossing);
        assert_eq!(c.region.boundary, Boundary::OpenBox);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn validation_errors() {
        let mut c = small(ExperimentKind::FailureSweep);
        assert!(c.validate().is_err());
        c.rules = vec!["indep:0.1".parse().unwrap()];
        assert!(c.validate().is_ok());
        c.trials = 0;
        assert!(c.validate().is_err());
        let mut t = small(ExperimentKind::PercolationSweep);
        t.region.boundary = Boundary::Torus;
        assert!(t.validate().is_err());
        t.proxy = Proxy::GiantFraction { theta: 0.1 };
        assert!(t.validate().is_ok());
    }

    #[test]
    fn percolation_sweep_is_reproducible() {
        let c = small(ExperimentKind::PercolationSweep);
        let a = run_sweep(&c).unwrap();
        let b = run_sweep(&c).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.points.len(), 2);
        assert!(a.points[0].estimate <= a.points[1].estimate);
        assert_eq!(a.version, VERSION);
    }

    #[test]
    fn point_indices_are_graph_major() {
        let mut c = small(ExperimentKind::FailureSweep);
        c.rules = vec!["indep:0".parse().unwrap(), "indep:1".parse().unwrap()];
        let r = run_sweep(&c).unwrap();
        let rules: Vec<_> = r.points.iter().map(|p| (p.lambda.unwrap(), p.rule.clone().unwrap())).collect();
        assert_eq!(
            rules,
            vec![
                (0.5, "indep:0".to_string()),
                (0.5, "indep:1".to_string()),
                (3.0, "indep:0".to_string()),
                (3.0, "indep:1".to_string())
            ]
        );
        assert_eq!(r.points[1].estimate, 0.0);
        assert_eq!(r.points[3].estimate, 0.0);
    }
}
