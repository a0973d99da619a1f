use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::DistributionError;

/// Mass tolerance for distributions built from exact densities.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Mass tolerance accepted from text input, which is renormalized afterwards.
pub const TEXT_MASS_TOLERANCE: f64 = 1e-6;

/// Constant density on the half-open interval `(start, end]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub density: f64,
}

impl Piece {
    pub fn new(start: f64, end: f64, density: f64) -> Self {
        Self {
            start,
            end,
            density,
        }
    }

    fn mass(&self) -> f64 {
        self.density * (self.end - self.start)
    }
}

/// A piecewise-constant density on `(0, 1)` for the failure thresholds.
///
/// Text form: `pieces:0,0.1,7.5;0.1,1,0.2777777778`: `start,end,density`
/// triples separated by `;`. Densities may be written as fractions (`5/18`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ThresholdDistribution {
    pieces: Vec<Piece>,
    /// `cumulative[i]` is the CDF at `pieces[i].start`.
    #[serde(skip)]
    cumulative: Vec<f64>,
}

impl ThresholdDistribution {
    pub fn new(pieces: Vec<Piece>) -> Result<Self, DistributionError> {
        Self::with_tolerance(pieces, MASS_TOLERANCE)
    }

    fn with_tolerance(pieces: Vec<Piece>, tolerance: f64) -> Result<Self, DistributionError> {
        if pieces.is_empty() {
            return Err(DistributionError::Empty);
        }
        for (index, p) in pieces.iter().enumerate() {
            let reason = if !(p.start.is_finite() && p.end.is_finite() && p.density.is_finite()) {
                Some("values must be finite")
            } else if p.start >= p.end {
                Some("start must be below end")
            } else if p.density < 0.0 {
                Some("density must be non-negative")
            } else {
                None
            };
            if let Some(reason) = reason {
                return Err(DistributionError::Piece {
                    index,
                    reason: reason.to_string(),
                });
            }
        }
        if pieces[0].start != 0.0 {
            return Err(DistributionError::Partition(format!(
                "first piece starts at {}, not 0",
                pieces[0].start
            )));
        }
        if pieces[pieces.len() - 1].end != 1.0 {
            return Err(DistributionError::Partition(format!(
                "last piece ends at {}, not 1",
                pieces[pieces.len() - 1].end
            )));
        }
        for w in pieces.windows(2) {
            if w[0].end != w[1].start {
                return Err(DistributionError::Partition(format!(
                    "gap or overlap between {} and {}",
                    w[0].end, w[1].start
                )));
            }
        }
        let mass: f64 = pieces.iter().map(Piece::mass).sum();
        if (mass - 1.0).abs() > tolerance {
            return Err(DistributionError::Mass { mass });
        }
        let mut cumulative = Vec::with_capacity(pieces.len());
        let mut acc = 0.0;
        for p in &pieces {
            cumulative.push(acc);
            acc += p.mass();
        }
        Ok(Self { pieces, cumulative })
    }

    /// Uniform density on `(0, 1)`.
    pub fn uniform() -> Self {
        Self::new(vec![Piece::new(0.0, 1.0, 1.0)]).expect("unit density")
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Total mass, `sum density * width`.
    pub fn mass(&self) -> f64 {
        self.pieces.iter().map(Piece::mass).sum()
    }

    /// Exact CDF. Zero at and below 0 (including `-inf`), one at and above 1.
    pub fn cdf(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        // Piece whose half-open interval (start, end] contains x.
        let i = self.pieces.partition_point(|p| p.end < x);
        let p = &self.pieces[i];
        (self.cumulative[i] + p.density * (x - p.start)).min(1.0)
    }

    /// Generalized inverse CDF for `u` in `(0, 1]`; the result lies in `(0, 1]`.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        for (i, p) in self.pieces.iter().enumerate() {
            let m = p.mass();
            if m > 0.0 && self.cumulative[i] + m >= u {
                let x = p.start + (u - self.cumulative[i]) / p.density;
                return x.clamp(p.start, p.end);
            }
        }
        // Rounding left u above the accumulated mass: last piece with mass.
        self.pieces
            .iter()
            .rev()
            .find(|p| p.density > 0.0)
            .map_or(1.0, |p| p.end)
    }

    /// Probability that a degree-`k` node is vulnerable, `F(1/k)`.
    pub fn vulnerable_probability(&self, k: usize) -> Result<f64, DistributionError> {
        if k == 0 {
            return Err(DistributionError::ZeroDegree);
        }
        Ok(self.cdf(1.0 / k as f64))
    }

    /// Probability that a degree-`k` node is reliable, `1 - F((k-1)/k)`,
    /// and 1 for isolated nodes.
    pub fn reliable_probability(&self, k: usize) -> f64 {
        if k == 0 {
            1.0
        } else {
            1.0 - self.cdf((k - 1) as f64 / k as f64)
        }
    }
}

/// Convenience for `dist.vulnerable_probability(k)`.
pub fn vulnerable_probability(
    dist: &ThresholdDistribution,
    k: usize,
) -> Result<f64, DistributionError> {
    dist.vulnerable_probability(k)
}

/// Convenience for `dist.reliable_probability(k)`.
pub fn reliable_probability(dist: &ThresholdDistribution, k: usize) -> f64 {
    dist.reliable_probability(k)
}

impl fmt::Display for ThresholdDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("pieces:")?;
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{},{},{}", p.start, p.end, p.density)?;
        }
        Ok(())
    }
}

fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    match s.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().ok()?;
            let den: f64 = den.trim().parse().ok()?;
            (den != 0.0).then(|| num / den)
        }
        None => s.parse().ok(),
    }
}

impl FromStr for ThresholdDistribution {
    type Err = DistributionError;

    /// Parses the text form. Decimal input rarely sums to one exactly, so the
    /// mass is checked against [`TEXT_MASS_TOLERANCE`] and, when it is off by
    /// more than [`MASS_TOLERANCE`], the densities are rescaled to unit mass.
    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let fail = |reason: String| DistributionError::Parse {
            input: input.to_string(),
            reason,
        };
        let trimmed = input.trim();
        if trimmed == "uniform" {
            return Ok(Self::uniform());
        }
        let body = trimmed
            .strip_prefix("pieces:")
            .ok_or_else(|| fail("expected `uniform` or `pieces:start,end,density;...`".into()))?;
        let mut pieces = Vec::new();
        for (index, triple) in body.split(';').enumerate() {
            let values: Vec<&str> = triple.split(',').collect();
            if values.len() != 3 {
                return Err(fail(format!(
                    "piece {index}: expected start,end,density, got {triple:?}"
                )));
            }
            let mut nums = [0.0; 3];
            for (slot, v) in nums.iter_mut().zip(&values) {
                *slot = parse_number(v)
                    .ok_or_else(|| fail(format!("piece {index}: {:?} is not a number", v.trim())))?;
            }
            pieces.push(Piece::new(nums[0], nums[1], nums[2]));
        }
        let loose = Self::with_tolerance(pieces, TEXT_MASS_TOLERANCE)?;
        let mass = loose.mass();
        if (mass - 1.0).abs() <= MASS_TOLERANCE {
            return Ok(loose);
        }
        let scaled = loose
            .pieces
            .iter()
            .map(|p| Piece::new(p.start, p.end, p.density / mass))
            .collect();
        Self::new(scaled)
    }
}

impl TryFrom<String> for ThresholdDistribution {
    type Error = DistributionError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<ThresholdDistribution> for String {
    fn from(dist: ThresholdDistribution) -> Self {
        dist.to_string()
    }
}
