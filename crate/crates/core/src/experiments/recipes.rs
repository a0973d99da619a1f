//! Ready-made configs for the standard simulation setups.

use crate::cascade::{Piece, ThresholdDistribution};
use crate::failure::FailureRule;
use crate::geometry::{Boundary, Region};
use crate::theory::CriticalConstants;

use super::{Bisection, ExperimentConfig, ExperimentKind, NodeCount, Proxy, RuleSpec, Seeding};

fn square(side: f64) -> Region {
    Region::square(side, Boundary::OpenBox).expect("positive side")
}

/// Threshold density with most mass on small thresholds: `7.5` on
/// `(0, 0.1)`, `5/18` on `(0.1, 1)`.
pub fn spreading_distribution() -> ThresholdDistribution {
    ThresholdDistribution::new(vec![Piece::new(0.0, 0.1, 7.5), Piece::new(0.1, 1.0, 5.0 / 18.0)])
        .expect("unit mass")
}

/// Threshold density with almost every node reliable: `0.001/0.999` on
/// `(0, 0.999)`, `999` on `(0.999, 1)`.
pub fn stubborn_distribution() -> ThresholdDistribution {
    ThresholdDistribution::new(vec![
        Piece::new(0.0, 0.999, 0.001 / 0.999),
        Piece::new(0.999, 1.0, 999.0),
    ])
    .expect("unit mass")
}

/// 1600 nodes on a 25x25 square with a random degree-dependent rule fitted
/// to the realized mean degree.
pub fn random_failures_1600(trials: usize, base_seed: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(ExperimentKind::FailureSweep, square(25.0), trials, base_seed);
    c.nodes = Some(1600);
    c.rules = vec![RuleSpec::MeanDegreeMargin {
        lambda_c: CriticalConstants::default().lambda_c,
    }];
    c.proxy = Proxy::GiantFraction { theta: 0.5 };
    c
}

/// Same graphs as [`random_failures_1600`] under the attack that removes every
/// node of degree above 4.
pub fn attack_1600(trials: usize, base_seed: u64) -> ExperimentConfig {
    let mut c = random_failures_1600(trials, base_seed);
    c.rules = vec![RuleSpec::Fixed(FailureRule::attack(4))];
    c.proxy = Proxy::GiantFraction { theta: 0.1 };
    c
}

/// Cascades from a node next to the largest vulnerable cluster, 1600 nodes on
/// a 15x15 square, with [`spreading_distribution`].
pub fn spreading_cascade(trials: usize, base_seed: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(ExperimentKind::CascadeTrial, square(15.0), trials, base_seed);
    c.nodes = Some(1600);
    c.distributions = vec![spreading_distribution()];
    c.seeding = Seeding::AdjacentToLargestVulnerable;
    c.proxy = Proxy::GiantFraction { theta: 0.5 };
    c
}

/// Cascades from a random node with [`stubborn_distribution`].
pub fn stubborn_cascade(trials: usize, base_seed: u64) -> ExperimentConfig {
    let mut c = spreading_cascade(trials, base_seed);
    c.distributions = vec![stubborn_distribution()];
    c.seeding = Seeding::RandomNode;
    c
}

/// Critical density search on a 50x50 square.
pub fn critical_density(trials: usize, base_seed: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(ExperimentKind::LambdaCEstimate, square(50.0), trials, base_seed);
    c.bisection = Some(Bisection::lambda_default());
    c
}

/// Critical failure probability search on a 50x50 square.
pub fn critical_failure(trials: usize, base_seed: u64) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(ExperimentKind::FailureSweep, square(50.0), trials, base_seed);
    c.bisection = Some(Bisection::q_default());
    c
}

/// Graph spec shared by the 1600-node recipes.
pub fn fixed_nodes(side: f64, n: usize) -> super::GraphSpec {
    super::GraphSpec {
        region: square(side),
        radius: 1.0,
        nodes: NodeCount::Fixed(n),
    }
}
