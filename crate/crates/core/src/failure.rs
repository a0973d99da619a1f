//! Node-failure processes driven by each node's degree in the original graph.
//!
//! Every rule is a map `k -> q(k)` from degree to failure probability. Node
//! `i` fails iff `u_i < q(deg(i))`, where `u_i` is the `i`-th value of a
//! counter-based uniform stream keyed by the seed. Because all rules share the
//! same `u_i` for a given seed, a pointwise smaller rule never kills a node
//! that a larger rule spares.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::RuleError;
use crate::graph::SpatialGraph;
use crate::seed::{tag, NodeStream};

/// Degree-dependent failure probability `q(k)`.
///
/// Text form (used by the CLI and config files):
///
/// * `indep:0.3`: every node fails with probability 0.3,
/// * `attack:4`: nodes with degree above 4 fail, the rest survive,
/// * `table:0,0,0.1,0.2;tail=1.0`: `q(k)` for `k = 0..=3`, then 1.0 beyond.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FailureRule {
    Independent { q: f64 },
    DegreeTable { table: Vec<f64>, tail: f64 },
    ThresholdAttack { phi: usize },
}

fn check_probability(name: impl Into<String>, value: f64) -> Result<(), RuleError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(RuleError::Probability {
            name: name.into(),
            value,
        })
    }
}

impl FailureRule {
    pub fn independent(q: f64) -> Result<Self, RuleError> {
        let rule = FailureRule::Independent { q };
        rule.validate()?;
        Ok(rule)
    }

    pub fn table(table: Vec<f64>, tail: f64) -> Result<Self, RuleError> {
        let rule = FailureRule::DegreeTable { table, tail };
        rule.validate()?;
        Ok(rule)
    }

    pub fn attack(phi: usize) -> Self {
        FailureRule::ThresholdAttack { phi }
    }

    /// `q(k) = max(0, 1 - mu_c/mu - 1/k)` tabulated for `k = 0..=max_degree`,
    /// with `q(0) = 0` and the tail set to the `k -> inf` limit.
    pub fn mean_degree_margin(mu_c: f64, mu: f64, max_degree: usize) -> Result<Self, RuleError> {
        if !(mu.is_finite() && mu > 0.0) || !(mu_c.is_finite() && mu_c >= 0.0) {
            return Err(RuleError::Parse {
                input: format!("mu_c={mu_c}, mu={mu}"),
                reason: "mean degrees must be positive and finite".into(),
            });
        }
        let base = 1.0 - mu_c / mu;
        let table = (0..=max_degree)
            .map(|k| {
                if k == 0 {
                    0.0
                } else {
                    (base - 1.0 / k as f64).clamp(0.0, 1.0)
                }
            })
            .collect();
        Self::table(table, base.clamp(0.0, 1.0))
    }

    pub fn validate(&self) -> Result<(), RuleError> {
        match self {
            FailureRule::Independent { q } => check_probability("q", *q),
            FailureRule::DegreeTable { table, tail } => {
                if table.is_empty() {
                    return Err(RuleError::EmptyTable);
                }
                for (k, &q) in table.iter().enumerate() {
                    check_probability(format!("q({k})"), q)?;
                }
                check_probability("tail", *tail)
            }
            FailureRule::ThresholdAttack { .. } => Ok(()),
        }
    }

    /// Failure probability for a node of degree `k`.
    #[inline]
    pub fn q(&self, k: usize) -> f64 {
        match self {
            FailureRule::Independent { q } => *q,
            FailureRule::DegreeTable { table, tail } => table.get(k).copied().unwrap_or(*tail),
            FailureRule::ThresholdAttack { phi } => {
                if k > *phi {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Equivalent table rule over `k = 0..=max_degree`.
    pub fn to_table(&self, max_degree: usize) -> FailureRule {
        match self {
            FailureRule::DegreeTable { .. } => self.clone(),
            _ => FailureRule::DegreeTable {
                table: (0..=max_degree).map(|k| self.q(k)).collect(),
                tail: self.q(usize::MAX),
            },
        }
    }

    /// Largest degree at which `q` can still change; beyond it `q` is constant.
    pub(crate) fn breakpoint(&self) -> usize {
        match self {
            FailureRule::Independent { .. } => 0,
            FailureRule::DegreeTable { table, .. } => table.len(),
            FailureRule::ThresholdAttack { phi } => phi + 1,
        }
    }

    pub fn is_non_decreasing(&self) -> bool {
        let last = self.breakpoint();
        (0..last).all(|k| self.q(k) <= self.q(k + 1))
    }

    pub fn is_non_increasing(&self) -> bool {
        let last = self.breakpoint();
        (0..last).all(|k| self.q(k) >= self.q(k + 1))
    }

    /// Whether `self.q(k) <= other.q(k)` for every degree `k`.
    pub fn dominated_by(&self, other: &FailureRule) -> bool {
        let last = self.breakpoint().max(other.breakpoint());
        (0..=last).all(|k| self.q(k) <= other.q(k))
    }

    /// Whether applying the rule consumes no randomness.
    pub fn is_deterministic(&self) -> bool {
        let last = self.breakpoint();
        (0..=last).all(|k| {
            let q = self.q(k);
            q == 0.0 || q == 1.0
        })
    }
}

impl fmt::Display for FailureRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureRule::Independent { q } => write!(f, "indep:{q}"),
            FailureRule::ThresholdAttack { phi } => write!(f, "attack:{phi}"),
            FailureRule::DegreeTable { table, tail } => {
                f.write_str("table:")?;
                for (i, q) in table.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{q}")?;
                }
                write!(f, ";tail={tail}")
            }
        }
    }
}

impl FromStr for FailureRule {
    type Err = RuleError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let fail = |reason: &str| RuleError::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let num = |s: &str| -> Result<f64, RuleError> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| fail(&format!("{:?} is not a number", s.trim())))
        };
        let (kind, body) = input
            .trim()
            .split_once(':')
            .ok_or_else(|| fail("expected <kind>:<value>, kind one of indep, attack, table"))?;
        let rule = match kind.trim() {
            "indep" | "independent" => FailureRule::Independent { q: num(body)? },
            "attack" => FailureRule::ThresholdAttack {
                phi: body
                    .trim()
                    .parse()
                    .map_err(|_| fail("attack threshold must be a non-negative integer"))?,
            },
            "table" => {
                let (values, tail) = match body.split_once(';') {
                    Some((values, tail)) => {
                        let tail = tail
                            .trim()
                            .strip_prefix("tail=")
                            .ok_or_else(|| fail("expected `;tail=<q>` after the table"))?;
                        (values, Some(num(tail)?))
                    }
                    None => (body, None),
                };
                let table = values
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(num)
                    .collect::<Result<Vec<_>, _>>()?;
                let tail = match tail {
                    Some(t) => t,
                    None => *table.last().ok_or(RuleError::EmptyTable)?,
                };
                FailureRule::DegreeTable { table, tail }
            }
            other => return Err(fail(&format!("unknown rule kind {other:?}"))),
        };
        rule.validate()?;
        Ok(rule)
    }
}

impl TryFrom<String> for FailureRule {
    type Error = RuleError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<FailureRule> for String {
    fn from(rule: FailureRule) -> Self {
        rule.to_string()
    }
}

/// Which nodes survived a failure process.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureOutcome {
    pub alive: Vec<bool>,
    pub rule: FailureRule,
    pub seed: u64,
}

impl FailureOutcome {
    pub fn alive_count(&self) -> usize {
        self.alive.iter().filter(|&&a| a).count()
    }
}

/// Per-node uniforms shared by every rule under the same seed.
pub fn failure_uniforms(seed: u64) -> NodeStream {
    NodeStream::new(seed, tag::FAILURES)
}

/// Fails node `i` independently with probability `q(deg(i))`.
pub fn apply_failures(
    graph: &SpatialGraph,
    rule: &FailureRule,
    seed: u64,
) -> Result<FailureOutcome, RuleError> {
    rule.validate()?;
    let stream = failure_uniforms(seed);
    let alive = (0..graph.len())
        .map(|i| {
            let q = rule.q(graph.degree(i));
            // Rules with q in {0, 1} need no draw.
            if q <= 0.0 {
                true
            } else if q >= 1.0 {
                false
            } else {
                stream.uniform(i) >= q
            }
        })
        .collect();
    Ok(FailureOutcome {
        alive,
        rule: rule.clone(),
        seed,
    })
}

/// Survivor density after independent failures with probability `q`.
pub fn thinning_check(graph: &SpatialGraph, q: f64, seed: u64) -> Result<f64, RuleError> {
    let outcome = apply_failures(graph, &FailureRule::independent(q)?, seed)?;
    Ok(outcome.alive_count() as f64 / graph.region().area())
}
