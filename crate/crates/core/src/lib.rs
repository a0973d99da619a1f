//! Node failures and cascades on random geometric graphs.
//!
//! Nodes are points of a Poisson process (or a fixed number of uniform
//! points) in a rectangle, joined when at most the connection radius apart.
//! The crate samples such graphs, removes nodes with degree-dependent
//! probabilities or through threshold cascades, measures what percolates,
//! and evaluates closed-form conditions under which nothing does.
//!
//! ```
//! use rgg_resilience::{apply_failures, components, generate_poisson, Boundary, FailureRule, Region, SpatialGraph};
//!
//! let region = Region::square(20.0, Boundary::OpenBox)?;
//! let graph = SpatialGraph::build(generate_poisson(3.0, region, 7)?, 1.0)?;
//! let outcome = apply_failures(&graph, &FailureRule::attack(4), 7)?;
//! let labels = components(&graph, &outcome.alive)?;
//! assert!(labels.largest_size() <= outcome.alive_count());
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod cascade;
pub mod components;
pub mod error;
pub mod experiments;
pub mod failure;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod seed;
pub mod theory;

pub use cascade::{
    classify, isolated_reliable_count_check, run_cascade, sample_thresholds,
    vulnerable_component_analysis, CascadeState, NodeClass, Piece, ThresholdDistribution,
};
pub use components::{components, crosses, crosses_region, ComponentLabeling, Direction, DisjointSet, Rect};
pub use error::{DistributionError, ExperimentError, GraphError, IoError, RuleError, TheoryError};
pub use experiments::{
    estimate_lambda_c, estimate_qc, run_sweep, ExperimentConfig, ExperimentKind, Proxy, RuleSpec,
    Seeding, SweepResult,
};
pub use failure::{apply_failures, thinning_check, FailureOutcome, FailureRule};
pub use geometry::{generate_poisson, generate_uniform, Boundary, PointSet, Region};
pub use graph::SpatialGraph;
pub use theory::{
    circuit_bound, critical_phi, critical_q, enumerate_circuits, k0_diagnostic,
    thm1_necessary_nondecreasing, thm1_necessary_nonincreasing, thm2_cascade_sufficient_check,
    thm2_no_cascade_condition, ConditionValue, CriticalConstants, CriticalPhi, SeriesControl,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/failures.md")]
    mod failures {}
    #[doc = include_str!("../../../book/src/cascades.md")]
    mod cascades {}
    #[doc = include_str!("../../../book/src/theory.md")]
    mod theory {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
