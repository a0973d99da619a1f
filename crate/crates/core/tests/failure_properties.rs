use proptest::collection::vec;
use proptest::prelude::*;
use rgg_resilience::{
    apply_failures, components, generate_poisson, generate_uniform, thinning_check, Boundary, FailureRule,
    Region, SpatialGraph,
};

fn graph(seed: u64, lambda: f64) -> SpatialGraph {
    let region = Region::square(12.0, Boundary::OpenBox).unwrap();
    SpatialGraph::build(generate_poisson(lambda, region, seed).unwrap(), 1.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dominated_rule_fails_a_subset(
        base in vec(0.0f64..=1.0, 1..12),
        bumps in vec(0.0f64..=0.5, 12),
        tail in 0.0f64..=0.5,
        seed in any::<u64>(),
    ) {
        let weak = FailureRule::table(base.clone(), tail).unwrap();
        let stronger: Vec<f64> = base.iter().zip(&bumps).map(|(q, b)| (q + b).min(1.0)).collect();
        let strong = FailureRule::table(stronger, (tail + 0.3).min(1.0)).unwrap();
        prop_assert!(weak.dominated_by(&strong));
        let g = graph(seed, 2.5);
        let a = apply_failures(&g, &weak, seed).unwrap();
        let b = apply_failures(&g, &strong, seed).unwrap();
        for i in 0..g.len() {
            prop_assert!(!b.alive[i] || a.alive[i]);
        }
        // Fewer alive nodes cannot give a larger largest component.
        let la = components(&g, &a.alive).unwrap().largest_size();
        let lb = components(&g, &b.alive).unwrap().largest_size();
        prop_assert!(lb <= la);
    }

    #[test]
    fn attack_is_deterministic_and_exact(phi in 0usize..12, seed in any::<u64>()) {
        let g = graph(seed, 3.0);
        let rule = FailureRule::attack(phi);
        let a = apply_failures(&g, &rule, seed).unwrap();
        let b = apply_failures(&g, &rule, seed.wrapping_add(1)).unwrap();
        prop_assert_eq!(&a.alive, &b.alive);
        for i in 0..g.len() {
            prop_assert_eq!(a.alive[i], g.degree(i) <= phi);
        }
    }

    #[test]
    fn text_form_round_trips(table in vec(0.0f64..=1.0, 1..8), tail in 0.0f64..=1.0, phi in 0usize..50) {
        for rule in [FailureRule::table(table.clone(), tail).unwrap(), FailureRule::attack(phi)] {
            let back: FailureRule = rule.to_string().parse().unwrap();
            prop_assert_eq!(back, rule);
        }
    }
}

#[test]
fn independent_failures_thin_the_density() {
    // Independent thinning of a Poisson(lambda) process leaves density lambda(1-q).
    let region = Region::square(30.0, Boundary::Torus).unwrap();
    for q in [0.1, 0.5, 0.8] {
        let mut density = 0.0;
        for seed in 0..20 {
            let g = SpatialGraph::build(generate_poisson(2.0, region, seed).unwrap(), 1.0).unwrap();
            density += thinning_check(&g, q, seed + 1000).unwrap();
        }
        density /= 20.0;
        let expected = 2.0 * (1.0 - q);
        assert!((density - expected).abs() < 0.03 * 2.0, "q={q}: {density} vs {expected}");
    }
}

#[test]
fn degree_dependent_failure_frequencies() {
    // Among degree-k nodes the failed fraction should be q(k).
    let region = Region::square(40.0, Boundary::OpenBox).unwrap();
    let rule = FailureRule::table(vec![0.0, 0.1, 0.3, 0.5, 0.7], 0.9).unwrap();
    let mut failed = [0usize; 8];
    let mut seen = [0usize; 8];
    for seed in 0..10 {
        let g = SpatialGraph::build(generate_uniform(3000, region, seed).unwrap(), 1.0).unwrap();
        let out = apply_failures(&g, &rule, seed).unwrap();
        for i in 0..g.len() {
            let k = g.degree(i).min(7);
            seen[k] += 1;
            failed[k] += usize::from(!out.alive[i]);
        }
    }
    for k in 1..7 {
        let p = rule.q(k);
        let obs = failed[k] as f64 / seen[k] as f64;
        let se = (p * (1.0 - p) / seen[k] as f64).sqrt().max(1e-9);
        assert!((obs - p).abs() <= 4.0 * se + 1e-12, "k={k}: {obs} vs {p} (n={})", seen[k]);
    }
}

#[test]
fn margin_rule_shape() {
    let mu_c = 1.435 * std::f64::consts::PI;
    let rule = FailureRule::mean_degree_margin(mu_c, 8.0, 30).unwrap();
    assert_eq!(rule.q(0), 0.0);
    let base = 1.0 - mu_c / 8.0;
    for k in 1..=30 {
        assert!((rule.q(k) - (base - 1.0 / k as f64).max(0.0)).abs() < 1e-12, "k={k}");
    }
    // Degrees past the table use the large-degree limit.
    assert_eq!(rule.q(31), base);
    assert!(rule.is_non_decreasing());
}
