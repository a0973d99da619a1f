//! Poisson-weighted series behind the non-percolation conditions.
//!
//! Each summand is a Poisson probability times a factor in `[0, 1]`, so the
//! error from stopping at index `k` is at most the remaining Poisson tail
//! mass. The tail is bounded with the ratio `p_{j+1}/p_j = a/(j+1)`, which
//! decreases in `j`: once `a/(k+2) < 1`,
//! `sum_{j>k} p_j <= p_{k+1} / (1 - a/(k+2))`.

use crate::cascade::ThresholdDistribution;
use crate::error::{RuleError, TheoryError};
use crate::failure::FailureRule;

use super::{ConditionValue, SeriesControl};

/// Area of the neighborhood ring around the half-unit square cell.
pub const RING_AREA: f64 = 2.0 * std::f64::consts::SQRT_2 + std::f64::consts::PI;

/// Critical value of the open-site probability for the lattice path count.
pub const OPEN_SITE_LIMIT: f64 = 1.0 / 27.0;

/// Poisson(`mean`) probabilities truncated once the tail is below `tolerance`.
///
/// Returns the probabilities for `0..=K` where the mass beyond `K` is bounded
/// by `tolerance`.
pub(crate) fn poisson_terms(mean: f64, ctrl: &SeriesControl) -> Result<Vec<f64>, TheoryError> {
    let tol = ctrl.tail_tolerance;
    let ln_mean = mean.ln();
    let mut log_p = -mean;
    let mut terms = Vec::new();
    for k in 0..ctrl.max_terms {
        if k > 0 {
            log_p += ln_mean - (k as f64).ln();
        }
        let p = log_p.exp();
        terms.push(p);
        let next = p * mean / (k + 1) as f64;
        let ratio = mean / (k + 2) as f64;
        if ratio < 1.0 && next / (1.0 - ratio) < tol {
            return Ok(terms);
        }
    }
    Err(TheoryError::NotConverged {
        tolerance: tol,
        max_terms: ctrl.max_terms,
    })
}

fn check_lambda(lambda: f64) -> Result<(), TheoryError> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(TheoryError::Parameter {
            name: "lambda",
            value: lambda,
            reason: "must be positive and finite",
        })
    }
}

/// `e^{-a} + sum_{k>=1} P(N=k) q(k-1)^k` with `N ~ Poisson(a)`, `a = lambda/2`.
pub fn nondecreasing_series(
    lambda: f64,
    q: impl Fn(usize) -> f64,
    ctrl: &SeriesControl,
) -> Result<f64, TheoryError> {
    check_lambda(lambda)?;
    let terms = poisson_terms(lambda / 2.0, ctrl)?;
    let mut sum = terms[0];
    for (k, p) in terms.iter().enumerate().skip(1) {
        sum += p * q(k - 1).powi(k as i32);
    }
    Ok(sum.min(1.0))
}

/// `sum_{k>=1} P(K=k) sum_{m>=0} P(M=m) (1 - q(m+k-1)^k)` with
/// `K ~ Poisson(lambda/2)` and `M ~ Poisson(lambda * RING_AREA)`.
///
/// Half the tolerance goes to each truncation.
pub fn nonincreasing_series(
    lambda: f64,
    q: impl Fn(usize) -> f64,
    ctrl: &SeriesControl,
) -> Result<f64, TheoryError> {
    check_lambda(lambda)?;
    let half = SeriesControl {
        tail_tolerance: ctrl.tail_tolerance / 2.0,
        ..*ctrl
    };
    let outer = poisson_terms(lambda / 2.0, &half)?;
    let inner = poisson_terms(lambda * RING_AREA, &half)?;
    let mut sum = 0.0;
    for (k, pk) in outer.iter().enumerate().skip(1) {
        let inner_sum: f64 = inner
            .iter()
            .enumerate()
            .map(|(m, pm)| pm * (1.0 - q(m + k - 1).powi(k as i32)))
            .sum();
        sum += pk * inner_sum;
    }
    Ok(sum.max(0.0))
}

/// Non-percolation test for a non-decreasing failure rule: holds when the
/// series exceeds `1 - 1/27`.
pub fn thm1_necessary_nondecreasing(
    lambda: f64,
    rule: &FailureRule,
    ctrl: &SeriesControl,
) -> Result<ConditionValue, TheoryError> {
    ctrl.validate()?;
    rule.validate()?;
    if !rule.is_non_decreasing() {
        return Err(RuleError::NotMonotone {
            expected: "non-decreasing",
        }
        .into());
    }
    let lhs = nondecreasing_series(lambda, |k| rule.q(k), ctrl)?;
    Ok(ConditionValue::greater("nondecreasing-no-percolation", lhs, 1.0 - OPEN_SITE_LIMIT))
}

/// Non-percolation test for a non-increasing failure rule: holds when the
/// double series is below `1/27`.
pub fn thm1_necessary_nonincreasing(
    lambda: f64,
    rule: &FailureRule,
    ctrl: &SeriesControl,
) -> Result<ConditionValue, TheoryError> {
    ctrl.validate()?;
    rule.validate()?;
    if !rule.is_non_increasing() {
        return Err(RuleError::NotMonotone {
            expected: "non-increasing",
        }
        .into());
    }
    let lhs = nonincreasing_series(lambda, |k| rule.q(k), ctrl)?;
    Ok(ConditionValue::less("nonincreasing-no-percolation", lhs, OPEN_SITE_LIMIT))
}

/// No infinite cluster of unreliable nodes (hence no cascade): the
/// non-increasing series with `q(n)` replaced by the reliability `sigma_n`.
pub fn thm2_no_cascade_condition(
    lambda: f64,
    dist: &ThresholdDistribution,
    ctrl: &SeriesControl,
) -> Result<ConditionValue, TheoryError> {
    ctrl.validate()?;
    let lhs = nonincreasing_series(lambda, |n| dist.reliable_probability(n), ctrl)?;
    Ok(ConditionValue::less("no-cascade", lhs, OPEN_SITE_LIMIT))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctrl() -> SeriesControl {
        SeriesControl::default()
    }

    #[test]
    fn poisson_terms_sum_to_one() {
        for mean in [0.05, 1.0, 3.5, 21.3, 60.0] {
            let t = poisson_terms(mean, &ctrl()).unwrap();
            let s: f64 = t.iter().sum();
            assert!((s - 1.0).abs() < 1e-11, "mean={mean} s={s}");
        }
    }

    #[test]
    fn always_fail_limits() {
        let one = FailureRule::Independent { q: 1.0 };
        for lambda in [0.5, 2.56, 7.0] {
            let eq4 = thm1_necessary_nondecreasing(lambda, &one, &ctrl()).unwrap();
            assert!((eq4.lhs - 1.0).abs() < 1e-12);
            assert!(eq4.holds);
            let eq5 = thm1_necessary_nonincreasing(lambda, &one, &ctrl()).unwrap();
            assert_eq!(eq5.lhs, 0.0);
            assert!(eq5.holds);
        }
    }

    #[test]
    fn never_fail_limits() {
        let zero = FailureRule::Independent { q: 0.0 };
        for lambda in [0.05, 1.0, 2.56] {
            let eq4 = thm1_necessary_nondecreasing(lambda, &zero, &ctrl()).unwrap();
            assert!((eq4.lhs - (-lambda / 2.0f64).exp()).abs() < 1e-15);
            assert_eq!(eq4.holds, (-lambda / 2.0f64).exp() > 26.0 / 27.0);
            let eq5 = thm1_necessary_nonincreasing(lambda, &zero, &ctrl()).unwrap();
            assert!((eq5.lhs - (1.0 - (-lambda / 2.0f64).exp())).abs() < 1e-12);
        }
    }

    #[test]
    fn monotonicity_is_enforced() {
        let up = FailureRule::table(vec![0.1, 0.5], 0.9).unwrap();
        let down = FailureRule::table(vec![0.9, 0.5], 0.1).unwrap();
        assert!(thm1_necessary_nondecreasing(2.0, &down, &ctrl()).is_err());
        assert!(thm1_necessary_nonincreasing(2.0, &up, &ctrl()).is_err());
        assert!(thm1_necessary_nondecreasing(2.0, &up, &ctrl()).is_ok());
        assert!(thm1_necessary_nonincreasing(2.0, &down, &ctrl()).is_ok());
    }

    #[test]
    fn rejects_non_positive_lambda() {
        let r = FailureRule::Independent { q: 0.5 };
        assert!(thm1_necessary_nondecreasing(0.0, &r, &ctrl()).is_err());
        assert!(thm1_necessary_nonincreasing(-1.0, &r, &ctrl()).is_err());
    }

    #[test]
    fn attack_series_matches_direct_tail() {
        // q = attack(4): q(k-1)^k is 1 for k >= 6, else 0.
        let lambda = 2.56f64;
        let a = lambda / 2.0;
        let v = thm1_necessary_nondecreasing(lambda, &FailureRule::attack(4), &ctrl()).unwrap();
        let mut p = (-a).exp();
        let mut direct = p;
        let mut below = p;
        for k in 1..6 {
            p *= a / k as f64;
            below += p;
        }
        direct += 1.0 - below;
        assert!((v.lhs - direct).abs() < 1e-12);
    }

    #[test]
    fn reliable_everywhere_gives_zero() {
        let d = ThresholdDistribution::new(vec![
            crate::cascade::Piece::new(0.0, 0.999_999, 0.0),
            crate::cascade::Piece::new(0.999_999, 1.0, 1.0 / (1.0 - 0.999_999)),
        ])
        .unwrap();
        let v = thm2_no_cascade_condition(1.0, &d, &ctrl()).unwrap();
        assert!(v.lhs < 1e-9 && v.holds, "{v:?}");
    }
}
