//! Threshold-driven cascading failures.
//!
//! Each node `i` draws a threshold `psi_i` and fails once the fraction of its
//! original neighbors that have failed reaches `psi_i`. A cascade starts from
//! one failed seed node and proceeds in synchronous rounds.

mod distribution;

pub use distribution::{
    reliable_probability, vulnerable_probability, Piece, ThresholdDistribution, MASS_TOLERANCE,
    TEXT_MASS_TOLERANCE,
};

use serde::{Deserialize, Serialize};

use crate::components::{components, ComponentLabeling};
use crate::error::GraphError;
use crate::graph::SpatialGraph;
use crate::seed::{tag, NodeStream};

/// Draws one threshold per node by inverse-CDF sampling.
pub fn sample_thresholds(graph: &SpatialGraph, dist: &ThresholdDistribution, seed: u64) -> Vec<f64> {
    let stream = NodeStream::new(seed, tag::THRESHOLDS);
    (0..graph.len())
        .map(|i| dist.quantile(stream.uniform_positive(i)))
        .collect()
}

/// Whether `failed` of `degree` neighbors having failed pushes a node with
/// threshold `psi` over the edge.
#[inline]
pub fn exceeds_threshold(failed: usize, degree: usize, psi: f64) -> bool {
    degree > 0 && failed as f64 / degree as f64 >= psi
}

/// Threshold classes of a single node. `unreliable` is `!reliable`.
///
/// For degree 1 a node is both vulnerable and reliable: one failed neighbor
/// is the whole neighborhood.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeClass {
    /// Fails as soon as any single neighbor fails.
    pub vulnerable: bool,
    /// Survives while at least one neighbor is operational.
    pub reliable: bool,
    /// Reliable, with at least one neighbor, all of them unreliable.
    pub isolated_reliable: bool,
}

impl NodeClass {
    pub fn unreliable(&self) -> bool {
        !self.reliable
    }
}

/// Labels every node from its threshold and original degree.
pub fn classify(graph: &SpatialGraph, thresholds: &[f64]) -> Result<Vec<NodeClass>, GraphError> {
    if thresholds.len() != graph.len() {
        return Err(GraphError::MaskLength {
            expected: graph.len(),
            got: thresholds.len(),
        });
    }
    let mut classes: Vec<NodeClass> = (0..graph.len())
        .map(|i| {
            let k = graph.degree(i);
            let psi = thresholds[i];
            NodeClass {
                vulnerable: exceeds_threshold(1, k, psi),
                // A node survives with one operational neighbor iff k-1
                // failures stay below its threshold.
                reliable: k == 0 || !exceeds_threshold(k - 1, k, psi),
                isolated_reliable: false,
            }
        })
        .collect();
    for i in 0..graph.len() {
        let nbrs = graph.neighbors(i);
        classes[i].isolated_reliable = classes[i].reliable
            && !nbrs.is_empty()
            && nbrs.iter().all(|&j| !classes[j].reliable);
    }
    Ok(classes)
}

/// Components formed by vulnerable nodes only.
pub fn vulnerable_component_analysis(
    graph: &SpatialGraph,
    thresholds: &[f64],
) -> Result<ComponentLabeling, GraphError> {
    let mask: Vec<bool> = classify(graph, thresholds)?
        .iter()
        .map(|c| c.vulnerable)
        .collect();
    components(graph, &mask)
}

/// Largest number of isolated-reliable neighbors around any node.
pub fn isolated_reliable_count_check(
    graph: &SpatialGraph,
    thresholds: &[f64],
) -> Result<usize, GraphError> {
    let classes = classify(graph, thresholds)?;
    Ok((0..graph.len())
        .map(|i| {
            graph
                .neighbors(i)
                .iter()
                .filter(|&&j| classes[j].isolated_reliable)
                .count()
        })
        .max()
        .unwrap_or(0))
}

/// Outcome of one cascade.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CascadeState {
    pub seed_node: usize,
    pub thresholds: Vec<f64>,
    pub failed: Vec<bool>,
    /// `rounds[0] == [seed_node]`; `rounds[t]` holds the nodes that first
    /// crossed their threshold after round `t - 1`, ascending.
    pub rounds: Vec<Vec<usize>>,
}

impl CascadeState {
    pub fn failed_count(&self) -> usize {
        self.failed.iter().filter(|&&f| f).count()
    }

    pub fn failed_fraction(&self) -> f64 {
        if self.failed.is_empty() {
            0.0
        } else {
            self.failed_count() as f64 / self.failed.len() as f64
        }
    }

    /// Number of rounds including the seed round.
    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }

    /// Components of the failed set, plus whether the largest one holds the
    /// seed.
    pub fn failed_components(
        &self,
        graph: &SpatialGraph,
    ) -> Result<(ComponentLabeling, bool), GraphError> {
        let labels = components(graph, &self.failed)?;
        let holds_seed = labels
            .largest
            .is_some_and(|id| labels.labels[self.seed_node] == id);
        Ok((labels, holds_seed))
    }
}

/// Runs the cascade from `seed_node` to quiescence in synchronous rounds.
///
/// In round `t >= 1` every operational node whose failed-neighbor fraction
/// (after round `t - 1`) is at least its threshold fails. Degree-0 nodes
/// never fail unless they are the seed.
pub fn run_cascade(
    graph: &SpatialGraph,
    thresholds: &[f64],
    seed_node: usize,
) -> Result<CascadeState, GraphError> {
    graph.check_node(seed_node)?;
    if thresholds.len() != graph.len() {
        return Err(GraphError::MaskLength {
            expected: graph.len(),
            got: thresholds.len(),
        });
    }
    let n = graph.len();
    let mut failed = vec![false; n];
    let mut failed_neighbors = vec![0usize; n];
    // Guards against queuing a node twice within one round.
    let mut queued = vec![false; n];
    failed[seed_node] = true;
    let mut rounds = vec![vec![seed_node]];

    loop {
        let last = rounds.last().expect("seed round");
        let mut candidates = Vec::new();
        for &u in last {
            for &v in graph.neighbors(u) {
                failed_neighbors[v] += 1;
                if !failed[v] && !queued[v] {
                    queued[v] = true;
                    candidates.push(v);
                }
            }
        }
        let mut next: Vec<usize> = candidates
            .iter()
            .copied()
            .filter(|&v| exceeds_threshold(failed_neighbors[v], graph.degree(v), thresholds[v]))
            .collect();
        for &v in &candidates {
            queued[v] = false;
        }
        if next.is_empty() {
            break;
        }
        next.sort_unstable();
        for &v in &next {
            failed[v] = true;
        }
        rounds.push(next);
    }

    Ok(CascadeState {
        seed_node,
        thresholds: thresholds.to_vec(),
        failed,
        rounds,
    })
}
