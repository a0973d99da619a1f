//! Bisection estimates of critical parameters from Monte Carlo proxies.
//!
//! Both searches reuse the same random numbers at every probe, so each
//! trial's outcome is monotone in the searched parameter and the estimated
//! curve is monotone as well.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ExperimentError, TheoryError};
use crate::failure::{apply_failures, FailureRule};
use crate::geometry::{generate_poisson, PointSet};
use crate::graph::SpatialGraph;
use crate::seed::{tag, NodeStream};
use crate::theory::CriticalConstants;

use super::trials::{failure_seed, measure, GraphSpec, NodeCount};
use super::ExperimentConfig;

/// Search bracket and stopping width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bisection {
    pub lo: f64,
    pub hi: f64,
    pub width: f64,
}

impl Bisection {
    pub fn lambda_default() -> Self {
        Self {
            lo: 1.0,
            hi: 2.0,
            width: 0.02,
        }
    }

    pub fn q_default() -> Self {
        Self {
            lo: 0.0,
            hi: 1.0,
            width: 0.02,
        }
    }

    fn validate(&self) -> Result<(), ExperimentError> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(ExperimentError::Config(format!(
                "bisection bracket [{}, {}] is empty",
                self.lo, self.hi
            )));
        }
        if self.width.is_nan() || self.width <= 0.0 {
            return Err(ExperimentError::Config(format!(
                "bisection width must be positive, got {}",
                self.width
            )));
        }
        Ok(())
    }
}

/// Proxy estimate at one probed parameter value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub value: f64,
    pub estimate: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl Evaluation {
    fn from_successes(value: f64, successes: usize, trials: usize) -> Self {
        let p = successes as f64 / trials as f64;
        Self {
            value,
            estimate: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
        }
    }
}

/// Final bracket around the parameter where the proxy crosses 1/2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalInterval {
    pub lo: f64,
    pub hi: f64,
    pub evaluations: Vec<Evaluation>,
}

impl CriticalInterval {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn overlaps(&self, a: f64, b: f64) -> bool {
        self.lo <= b && a <= self.hi
    }
}

/// Shrinks `[lo, hi]` until narrower than `width`. `increasing` says whether
/// the proxy grows with the parameter.
fn bisect(
    bracket: Bisection,
    increasing: bool,
    mut eval: impl FnMut(f64) -> Result<Evaluation, ExperimentError>,
) -> Result<CriticalInterval, ExperimentError> {
    bracket.validate()?;
    let above = |e: &Evaluation| e.estimate >= 0.5;
    let (mut lo, mut hi) = (bracket.lo, bracket.hi);
    let at_lo = eval(lo)?;
    let at_hi = eval(hi)?;
    if above(&at_lo) == increasing || above(&at_hi) != increasing {
        return Err(ExperimentError::NotBracketing {
            lo,
            hi,
            p_lo: at_lo.estimate,
            p_hi: at_hi.estimate,
        });
    }
    let mut evaluations = vec![at_lo, at_hi];
    while hi - lo > bracket.width {
        let mid = 0.5 * (lo + hi);
        let e = eval(mid)?;
        evaluations.push(e);
        if above(&e) == increasing {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(CriticalInterval {
        lo,
        hi,
        evaluations,
    })
}

/// Keeps each point of a density-`base` process with probability
/// `lambda / base`, giving a density-`lambda` process nested in the base one.
fn thin_points(points: &PointSet, lambda: f64, base: f64, seed: u64) -> PointSet {
    let marks = NodeStream::new(seed, tag::MARKS);
    let keep = lambda / base;
    let coordinates: Vec<[f64; 2]> = points
        .coordinates
        .iter()
        .enumerate()
        .filter(|(i, _)| marks.uniform(*i) < keep)
        .map(|(_, p)| *p)
        .collect();
    PointSet {
        region: points.region,
        intensity: coordinates.len() as f64 / points.region.area(),
        coordinates,
    }
}

/// Brackets the density at which the proxy probability crosses 1/2.
///
/// Needs a region at least 50 radii wide in both directions. Uses
/// `config.bisection` or the bracket `[1.0, 2.0]` with width 0.02.
pub fn estimate_lambda_c(config: &ExperimentConfig) -> Result<CriticalInterval, ExperimentError> {
    config.validate_common()?;
    let region = config.region;
    if region.width.min(region.height) < 50.0 * config.radius {
        return Err(ExperimentError::Config(format!(
            "critical density estimation needs a region at least 50 radii wide, got {}x{} with radius {}",
            region.width, region.height, config.radius
        )));
    }
    let bracket = config.bisection.unwrap_or_else(Bisection::lambda_default);
    bracket.validate()?;
    if bracket.lo <= 0.0 {
        return Err(ExperimentError::Config("density bracket must be positive".into()));
    }
    let bases: Vec<PointSet> = (0..config.trials)
        .into_par_iter()
        .map(|t| generate_poisson(bracket.hi, region, config.trial_seed(0, t)))
        .collect::<Result<_, _>>()?;
    bisect(bracket, true, |lambda| {
        let successes = bases
            .par_iter()
            .enumerate()
            .map(|(t, base)| {
                let seed = config.trial_seed(0, t);
                let pts = thin_points(base, lambda, bracket.hi, seed);
                let graph = SpatialGraph::build(pts, config.radius)?;
                let alive = vec![true; graph.len()];
                Ok(measure(&graph, &alive, config.proxy, t, seed)?.success)
            })
            .collect::<Result<Vec<bool>, ExperimentError>>()?
            .into_iter()
            .filter(|&s| s)
            .count();
        Ok(Evaluation::from_successes(lambda, successes, config.trials))
    })
}

/// Brackets the independent failure probability at which the proxy
/// probability drops through 1/2 at density `lambda`.
///
/// Uses `config.nodes` for a fixed node count when set. Rejects
/// `lambda <= lambda_c`, where the answer is zero.
pub fn estimate_qc(lambda: f64, config: &ExperimentConfig) -> Result<CriticalInterval, ExperimentError> {
    config.validate_common()?;
    let constants = CriticalConstants::default();
    if !(lambda.is_finite() && lambda > constants.lambda_c) {
        return Err(TheoryError::Subcritical {
            lambda,
            lambda_c: constants.lambda_c,
        }
        .into());
    }
    let spec = GraphSpec {
        region: config.region,
        radius: config.radius,
        nodes: config.nodes.map_or(NodeCount::Poisson(lambda), NodeCount::Fixed),
    };
    let bracket = config.bisection.unwrap_or_else(Bisection::q_default);
    bracket.validate()?;
    if bracket.lo < 0.0 || bracket.hi > 1.0 {
        return Err(ExperimentError::Config("probability bracket must lie in [0, 1]".into()));
    }
    let graphs: Vec<SpatialGraph> = (0..config.trials)
        .into_par_iter()
        .map(|t| spec.build(config.trial_seed(0, t)))
        .collect::<Result<_, _>>()?;
    bisect(bracket, false, |q| {
        let rule = FailureRule::independent(q)?;
        let successes = graphs
            .par_iter()
            .enumerate()
            .map(|(t, graph)| {
                let seed = config.trial_seed(0, t);
                let outcome = apply_failures(graph, &rule, failure_seed(seed))?;
                Ok(measure(graph, &outcome.alive, config.proxy, t, seed)?.success)
            })
            .collect::<Result<Vec<bool>, ExperimentError>>()?
            .into_iter()
            .filter(|&s| s)
            .count();
        Ok(Evaluation::from_successes(q, successes, config.trials))
    })
}
