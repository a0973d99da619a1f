//! Single Monte Carlo trials: build a graph, perturb it, measure it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cascade::{classify, run_cascade, sample_thresholds, ThresholdDistribution};
use crate::components::{components, crosses_region};
use crate::error::{ExperimentError, GraphError, RuleError};
use crate::failure::{apply_failures, FailureRule};
use crate::geometry::{generate_poisson, generate_uniform, Boundary, Region};
use crate::graph::SpatialGraph;
use crate::seed::{derive_seed, tag, unit_closed_open};
use crate::theory::CriticalConstants;

/// How many nodes a trial graph gets.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeCount {
    /// Exactly this many uniform points.
    Fixed(usize),
    /// Poisson point process with this density.
    Poisson(f64),
}

/// Recipe for a random geometric graph.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub region: Region,
    pub radius: f64,
    pub nodes: NodeCount,
}

impl GraphSpec {
    pub fn build(&self, seed: u64) -> Result<SpatialGraph, GraphError> {
        let points = match self.nodes {
            NodeCount::Fixed(n) => generate_uniform(n, self.region, seed)?,
            NodeCount::Poisson(lambda) => generate_poisson(lambda, self.region, seed)?,
        };
        SpatialGraph::build(points, self.radius)
    }
}

/// A failure rule, possibly fitted to the realized graph.
///
/// Text form: any [`FailureRule`] form, or `margin` / `margin:<lambda_c>` for
/// `q(k) = max(0, 1 - mu_c/mu - 1/k)` with `mu` the realized mean degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum RuleSpec {
    Fixed(FailureRule),
    MeanDegreeMargin { lambda_c: f64 },
}

impl RuleSpec {
    /// Concrete rule for `graph`.
    pub fn resolve(&self, graph: &SpatialGraph) -> Result<FailureRule, RuleError> {
        match self {
            RuleSpec::Fixed(rule) => Ok(rule.clone()),
            RuleSpec::MeanDegreeMargin { lambda_c } => {
                let mu_c = CriticalConstants {
                    lambda_c: *lambda_c,
                }
                .mu_c()
                    * graph.radius()
                    * graph.radius();
                FailureRule::mean_degree_margin(mu_c, graph.mean_degree(), graph.max_degree())
            }
        }
    }
}

impl fmt::Display for RuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleSpec::Fixed(rule) => rule.fmt(f),
            RuleSpec::MeanDegreeMargin { lambda_c } => write!(f, "margin:{lambda_c}"),
        }
    }
}

impl FromStr for RuleSpec {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "margin" {
            return Ok(RuleSpec::MeanDegreeMargin {
                lambda_c: CriticalConstants::default().lambda_c,
            });
        }
        if let Some(v) = s.strip_prefix("margin:") {
            let lambda_c = v.trim().parse::<f64>().map_err(|_| RuleError::Parse {
                input: s.to_string(),
                reason: "margin needs a numeric critical density".into(),
            })?;
            return Ok(RuleSpec::MeanDegreeMargin { lambda_c });
        }
        Ok(RuleSpec::Fixed(s.parse()?))
    }
}

impl TryFrom<String> for RuleSpec {
    type Error = RuleError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<RuleSpec> for String {
    fn from(spec: RuleSpec) -> Self {
        spec.to_string()
    }
}

/// Finite-size stand-in for "percolates".
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Proxy {
    /// Left-right crossing of the whole (open-box) region.
    #[default]
    Crossing,
    /// Largest component holds at least `theta` of all nodes.
    GiantFraction { theta: f64 },
}

impl Proxy {
    pub fn describe(&self) -> String {
        match self {
            Proxy::Crossing => "left-right crossing of the full region".to_string(),
            Proxy::GiantFraction { theta } => {
                format!("largest component holds at least {theta} of all nodes")
            }
        }
    }
}

/// Where a cascade starts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Seeding {
    #[default]
    RandomNode,
    /// A node next to the largest vulnerable cluster (or inside it when no
    /// outside neighbor exists).
    AdjacentToLargestVulnerable,
}

impl FromStr for Seeding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random-node" | "random" => Ok(Seeding::RandomNode),
            "adjacent" | "adjacent-to-largest-vulnerable-component" | "adjacent-to-largest-vulnerable" => {
                Ok(Seeding::AdjacentToLargestVulnerable)
            }
            other => Err(format!(
                "unknown seeding {other:?}, expected random-node or adjacent"
            )),
        }
    }
}

/// Measurements of one trial, shared by every experiment kind.
///
/// For cascade trials the "largest component" is the largest failed
/// component and `crosses` refers to the failed set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub nodes: usize,
    pub mean_degree: f64,
    pub operational: usize,
    pub largest_component: usize,
    pub crosses: Option<bool>,
    pub success: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cascade: Option<CascadeTrialRecord>,
}

impl TrialRecord {
    pub fn largest_fraction(&self) -> f64 {
        if self.nodes == 0 {
            0.0
        } else {
            self.largest_component as f64 / self.nodes as f64
        }
    }
}

/// Outcome of one cascade trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CascadeTrialRecord {
    /// False when the seeding policy had nothing to attach to.
    pub feasible: bool,
    pub seed_node: Option<usize>,
    pub largest_vulnerable_fraction: f64,
    pub failed_count: usize,
    pub failed_fraction: f64,
    pub rounds: usize,
    pub largest_failed_fraction: f64,
    pub largest_failed_holds_seed: bool,
    pub max_isolated_reliable_neighbors: usize,
}

fn proxy_success(
    graph: &SpatialGraph,
    mask: &[bool],
    largest: usize,
    proxy: Proxy,
) -> Result<(Option<bool>, bool), GraphError> {
    match proxy {
        Proxy::Crossing => {
            let c = crosses_region(graph, mask)?;
            Ok((Some(c), c))
        }
        Proxy::GiantFraction { theta } => {
            let crosses = if graph.region().boundary == Boundary::OpenBox {
                Some(crosses_region(graph, mask)?)
            } else {
                None
            };
            let ok = !graph.is_empty() && largest as f64 >= theta * graph.len() as f64;
            Ok((crosses, ok))
        }
    }
}

/// Measures the operational subgraph given by `alive`.
pub fn measure(
    graph: &SpatialGraph,
    alive: &[bool],
    proxy: Proxy,
    trial: usize,
    seed: u64,
) -> Result<TrialRecord, GraphError> {
    let labels = components(graph, alive)?;
    let largest = labels.largest_size();
    let (crosses, success) = proxy_success(graph, alive, largest, proxy)?;
    Ok(TrialRecord {
        trial,
        seed,
        nodes: graph.len(),
        mean_degree: graph.mean_degree(),
        operational: labels.alive_count(),
        largest_component: largest,
        crosses,
        success,
        cascade: None,
    })
}

/// Sub-seed for the failure draws of a trial.
pub fn failure_seed(trial_seed: u64) -> u64 {
    derive_seed(trial_seed, &[tag::FAILURES])
}

/// Builds a graph, applies a failure rule, and measures what is left.
pub fn run_failure_trial(
    spec: &GraphSpec,
    rule: &RuleSpec,
    proxy: Proxy,
    trial: usize,
    seed: u64,
) -> Result<TrialRecord, ExperimentError> {
    let graph = spec.build(seed)?;
    let rule = rule.resolve(&graph)?;
    let outcome = apply_failures(&graph, &rule, failure_seed(seed))?;
    Ok(measure(&graph, &outcome.alive, proxy, trial, seed)?)
}

/// Picks the seed node for a cascade, or `None` when the policy is
/// infeasible.
pub fn choose_seed_node(
    graph: &SpatialGraph,
    thresholds: &[f64],
    seeding: Seeding,
    seed: u64,
) -> Result<Option<usize>, GraphError> {
    if graph.is_empty() {
        return Ok(None);
    }
    let pick = |n: usize| {
        let u = unit_closed_open(derive_seed(seed, &[tag::SEEDING]));
        ((u * n as f64) as usize).min(n - 1)
    };
    match seeding {
        Seeding::RandomNode => Ok(Some(pick(graph.len()))),
        Seeding::AdjacentToLargestVulnerable => {
            let classes = classify(graph, thresholds)?;
            let mask: Vec<bool> = classes.iter().map(|c| c.vulnerable).collect();
            let labels = components(graph, &mask)?;
            let Some(id) = labels.largest else {
                return Ok(None);
            };
            let in_cluster = labels.largest_mask();
            let mut adjacent: Vec<usize> = (0..graph.len())
                .filter(|&v| !in_cluster[v] && graph.neighbors(v).iter().any(|&u| in_cluster[u]))
                .collect();
            if adjacent.is_empty() {
                adjacent = labels.members(id).collect();
            }
            Ok(Some(adjacent[pick(adjacent.len())]))
        }
    }
}

/// Builds a graph, samples thresholds, seeds a cascade and measures it.
pub fn run_cascade_trial(
    spec: &GraphSpec,
    dist: &ThresholdDistribution,
    seeding: Seeding,
    proxy: Proxy,
    trial: usize,
    seed: u64,
) -> Result<TrialRecord, ExperimentError> {
    let graph = spec.build(seed)?;
    let thresholds = sample_thresholds(&graph, dist, derive_seed(seed, &[tag::THRESHOLDS]));
    let classes = classify(&graph, &thresholds)?;
    let n = graph.len();
    let vulnerable: Vec<bool> = classes.iter().map(|c| c.vulnerable).collect();
    let largest_vulnerable = components(&graph, &vulnerable)?.largest_size();
    let max_isolated = (0..n)
        .map(|i| {
            graph
                .neighbors(i)
                .iter()
                .filter(|&&j| classes[j].isolated_reliable)
                .count()
        })
        .max()
        .unwrap_or(0);
    let frac = |c: usize| if n == 0 { 0.0 } else { c as f64 / n as f64 };

    let seed_node = choose_seed_node(&graph, &thresholds, seeding, seed)?;
    let (failed, cascade) = match seed_node {
        Some(s) => {
            let state = run_cascade(&graph, &thresholds, s)?;
            let (labels, holds_seed) = state.failed_components(&graph)?;
            let record = CascadeTrialRecord {
                feasible: true,
                seed_node: Some(s),
                largest_vulnerable_fraction: frac(largest_vulnerable),
                failed_count: state.failed_count(),
                failed_fraction: state.failed_fraction(),
                rounds: state.round_count(),
                largest_failed_fraction: frac(labels.largest_size()),
                largest_failed_holds_seed: holds_seed,
                max_isolated_reliable_neighbors: max_isolated,
            };
            (state.failed, record)
        }
        None => (
            vec![false; n],
            CascadeTrialRecord {
                feasible: false,
                seed_node: None,
                largest_vulnerable_fraction: frac(largest_vulnerable),
                failed_count: 0,
                failed_fraction: 0.0,
                rounds: 0,
                largest_failed_fraction: 0.0,
                largest_failed_holds_seed: false,
                max_isolated_reliable_neighbors: max_isolated,
            },
        ),
    };
    let mut record = measure(&graph, &failed, proxy, trial, seed)?;
    record.operational = n - cascade.failed_count;
    record.cascade = Some(cascade);
    Ok(record)
}
