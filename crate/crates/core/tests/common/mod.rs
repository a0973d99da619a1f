//! Slow, obviously-correct reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::VecDeque;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rgg_resilience::SpatialGraph;

/// All pairs within the radius, by exhaustive comparison.
pub fn brute_neighbors(graph: &SpatialGraph) -> Vec<Vec<usize>> {
    let region = graph.region();
    let r2 = graph.radius() * graph.radius();
    let n = graph.len();
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i && region.distance_sq(graph.position(i), graph.position(j)) <= r2)
                .collect()
        })
        .collect()
}

/// Component sizes of the alive subgraph by breadth-first search, descending.
pub fn bfs_component_sizes(graph: &SpatialGraph, alive: &[bool]) -> Vec<usize> {
    let n = graph.len();
    let mut seen = vec![false; n];
    let mut sizes = Vec::new();
    for s in 0..n {
        if !alive[s] || seen[s] {
            continue;
        }
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        let mut size = 0;
        while let Some(u) = queue.pop_front() {
            size += 1;
            for &v in graph.neighbors(u) {
                if alive[v] && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        sizes.push(size);
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

/// Cascade with one failure at a time, in random order, until no operational
/// node is over its threshold.
pub fn async_cascade(graph: &SpatialGraph, thresholds: &[f64], seed_node: usize, order_seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(order_seed);
    let n = graph.len();
    let mut failed = vec![false; n];
    failed[seed_node] = true;
    loop {
        let ready: Vec<usize> = (0..n)
            .filter(|&v| {
                let k = graph.degree(v);
                let f = graph.neighbors(v).iter().filter(|&&u| failed[u]).count();
                !failed[v] && k > 0 && f as f64 / k as f64 >= thresholds[v]
            })
            .collect();
        match ready.choose(&mut rng) {
            Some(&v) => failed[v] = true,
            None => return failed,
        }
    }
}

/// Monte Carlo estimate of `P(K=0) + E[q(K-1)^K; K>=1]`, `K ~ Poisson(lambda/2)`,
/// simulating each of the `K` nodes failing independently.
pub fn mc_nondecreasing(lambda: f64, q: impl Fn(usize) -> f64, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k_dist = Poisson::new(lambda / 2.0).unwrap();
    let mut total = 0.0;
    for _ in 0..samples {
        let k = k_dist.sample(&mut rng) as usize;
        total += if k == 0 { 1.0 } else { q(k - 1).powi(k as i32) };
    }
    total / samples as f64
}

/// Monte Carlo estimate of `E[1 - q(M+K-1)^K; K>=1]` with independent
/// `K ~ Poisson(lambda/2)` and `M ~ Poisson(lambda * ring)`.
pub fn mc_nonincreasing(lambda: f64, ring: f64, q: impl Fn(usize) -> f64, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k_dist = Poisson::new(lambda / 2.0).unwrap();
    let m_dist = Poisson::new(lambda * ring).unwrap();
    let mut total = 0.0;
    for _ in 0..samples {
        let k = k_dist.sample(&mut rng) as usize;
        let m = m_dist.sample(&mut rng) as usize;
        if k > 0 {
            total += 1.0 - q(m + k - 1).powi(k as i32);
        }
    }
    total / samples as f64
}

/// Thresholds drawn from a three-way mix that makes every node class common.
pub fn mixed_thresholds(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| match rng.random_range(0..3) {
            0 => rng.random_range(0.0..0.15),
            1 => rng.random_range(0.15..0.9),
            _ => rng.random_range(0.9..=1.0),
        })
        .collect()
}
