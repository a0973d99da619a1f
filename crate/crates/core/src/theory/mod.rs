//! Closed-form percolation conditions for failures on random geometric graphs.
//!
//! Every condition evaluator returns the raw left-hand side alongside the
//! verdict so that sweeps can plot the margin, not just a boolean.

mod circuits;
mod series;

pub use circuits::{circuit_bound, circuits_surrounding_origin, enumerate_circuits, Circuit, MAX_ENUMERATION_HALF_LENGTH};
pub use series::{
    nondecreasing_series, nonincreasing_series, thm1_necessary_nondecreasing,
    thm1_necessary_nonincreasing, thm2_no_cascade_condition, OPEN_SITE_LIMIT, RING_AREA,
};

use serde::{Deserialize, Serialize};

use crate::cascade::ThresholdDistribution;
use crate::error::TheoryError;

/// Critical density of unit-radius continuum percolation in the plane.
///
/// Only a numerical bracket (1.43, 1.44) is known; the default is its
/// midpoint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalConstants {
    pub lambda_c: f64,
}

impl Default for CriticalConstants {
    fn default() -> Self {
        Self { lambda_c: 1.435 }
    }
}

impl CriticalConstants {
    /// Critical mean degree `lambda_c * pi`.
    pub fn mu_c(&self) -> f64 {
        self.lambda_c * std::f64::consts::PI
    }
}

/// Truncation control for the infinite Poisson series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    /// Bound on the absolute truncation error.
    pub tail_tolerance: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            tail_tolerance: 1e-12,
            max_terms: 100_000,
        }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<(), TheoryError> {
        if !(self.tail_tolerance > 0.0 && self.tail_tolerance.is_finite()) {
            return Err(TheoryError::Parameter {
                name: "tail_tolerance",
                value: self.tail_tolerance,
                reason: "must be positive",
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = ">")]
    Greater,
    #[serde(rename = "<")]
    Less,
    #[serde(rename = ">=")]
    AtLeast,
}

/// One evaluated condition: `lhs <comparison> threshold`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionValue {
    pub condition: String,
    pub lhs: f64,
    pub comparison: Comparison,
    pub threshold: f64,
    pub holds: bool,
}

impl ConditionValue {
    pub(crate) fn greater(condition: &str, lhs: f64, threshold: f64) -> Self {
        Self {
            condition: condition.to_string(),
            lhs,
            comparison: Comparison::Greater,
            threshold,
            holds: lhs > threshold,
        }
    }

    pub(crate) fn less(condition: &str, lhs: f64, threshold: f64) -> Self {
        Self {
            condition: condition.to_string(),
            lhs,
            comparison: Comparison::Less,
            threshold,
            holds: lhs < threshold,
        }
    }

    /// Signed distance to the threshold, positive when the condition holds.
    pub fn margin(&self) -> f64 {
        match self.comparison {
            Comparison::Greater | Comparison::AtLeast => self.lhs - self.threshold,
            Comparison::Less => self.threshold - self.lhs,
        }
    }
}

/// Largest independent failure probability that keeps the graph percolating,
/// `1 - lambda_c / lambda`.
pub fn critical_q(lambda: f64, constants: &CriticalConstants) -> Result<f64, TheoryError> {
    if !lambda.is_finite() || lambda < constants.lambda_c {
        return Err(TheoryError::Subcritical {
            lambda,
            lambda_c: constants.lambda_c,
        });
    }
    Ok(1.0 - constants.lambda_c / lambda)
}

/// Node-count cap `2 (d/2 + 2)(3d/2 + 2) lambda` on the enlarged lattice
/// rectangle, for lattice edge length `d > 4`.
pub fn k0_diagnostic(lambda: f64, d: f64) -> Result<f64, TheoryError> {
    if !(d.is_finite() && d > 4.0) {
        return Err(TheoryError::Parameter {
            name: "d",
            value: d,
            reason: "lattice edge length must exceed 4",
        });
    }
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(TheoryError::Parameter {
            name: "lambda",
            value: lambda,
            reason: "must be non-negative and finite",
        });
    }
    Ok(2.0 * (d / 2.0 + 2.0) * (3.0 * d / 2.0 + 2.0) * lambda)
}

/// Result of the attack-threshold search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriticalPhi {
    /// Largest `phi'` (at least -1) satisfying the partial-sum bound.
    Finite(i64),
    /// Every partial sum stays below the bound; happens for
    /// `lambda <= 2 ln(27/26)`.
    Unbounded,
}

impl CriticalPhi {
    pub fn finite(self) -> Option<i64> {
        match self {
            CriticalPhi::Finite(v) => Some(v),
            CriticalPhi::Unbounded => None,
        }
    }
}

/// Largest `phi'` with `sum_{k=0}^{phi'+1} (lambda/2)^k / k! < e^{lambda/2}/27 + 1`.
///
/// Any attack threshold `phi <= phi'` leaves no infinite operational
/// component. Evaluated as the equivalent Poisson-CDF inequality
/// `P(N <= phi'+1) < 1/27 + e^{-lambda/2}` to stay finite for large `lambda`.
pub fn critical_phi(lambda: f64) -> Result<CriticalPhi, TheoryError> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(TheoryError::Parameter {
            name: "lambda",
            value: lambda,
            reason: "must be positive and finite",
        });
    }
    let a = lambda / 2.0;
    let bound = OPEN_SITE_LIMIT + (-a).exp();
    if bound >= 1.0 {
        return Ok(CriticalPhi::Unbounded);
    }
    let ln_a = a.ln();
    let mut log_p = -a;
    let mut cdf = 0.0;
    let mut j: i64 = 0;
    loop {
        if j > 0 {
            log_p += ln_a - (j as f64).ln();
        }
        cdf += log_p.exp();
        if cdf >= bound {
            // Partial sum through j fails; j - 1 is the last index that passed.
            return Ok(CriticalPhi::Finite(j - 2));
        }
        if j > 10_000_000 {
            return Err(TheoryError::NotConverged {
                tolerance: 1.0 - bound,
                max_terms: j as usize,
            });
        }
        j += 1;
    }
}

/// Sufficient condition for a giant vulnerable cluster: `F(1/k0) >= mu1 / mu`,
/// with `mu > mu1 > mu_c` and a caller-chosen `k0 >= 1`.
pub fn thm2_cascade_sufficient_check(
    mu: f64,
    mu1: f64,
    dist: &ThresholdDistribution,
    k0: usize,
    constants: &CriticalConstants,
) -> Result<ConditionValue, TheoryError> {
    if k0 == 0 {
        return Err(TheoryError::Parameter {
            name: "k0",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    if mu1.is_nan() || mu1 <= constants.mu_c() {
        return Err(TheoryError::Parameter {
            name: "mu1",
            value: mu1,
            reason: "must exceed the critical mean degree",
        });
    }
    if mu <= mu1 || !mu.is_finite() {
        return Err(TheoryError::Parameter {
            name: "mu",
            value: mu,
            reason: "must exceed mu1",
        });
    }
    let lhs = dist.cdf(1.0 / k0 as f64);
    let threshold = mu1 / mu;
    Ok(ConditionValue {
        condition: "cascade-sufficient".to_string(),
        lhs,
        comparison: Comparison::AtLeast,
        threshold,
        holds: lhs >= threshold,
    })
}
