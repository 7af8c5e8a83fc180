use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tafl_core::transport::{
    augment_diagonal, augmented_cost_matrix, cost_matrix, exact_assignment, sinkhorn_plan, transport,
    wasserstein_distance, CardinalityMode, CostMatrix, DiagramPoint, SinkhornConfig, Stabilization,
};

fn pts(v: &[(f64, f64)]) -> Vec<DiagramPoint> {
    v.iter().copied().map(DiagramPoint::from).collect()
}

fn worked_example() -> (Vec<DiagramPoint>, Vec<DiagramPoint>) {
    (pts(&[(1., 2.), (3., 4.), (5., 6.)]), pts(&[(2., 3.), (4., 5.), (6., 7.)]))
}

fn log_cfg() -> SinkhornConfig {
    SinkhornConfig { stabilization: Stabilization::LogDomain, ..Default::default() }
}

fn random_diagram(rng: &mut impl Rng, n: usize) -> Vec<DiagramPoint> {
    (0..n)
        .map(|_| {
            let b = rng.gen_range(0.0..3.0);
            let d = rng.gen_range(0.0..3.0);
            DiagramPoint::new(f64::min(b, d), f64::max(b, d))
        })
        .collect()
}

/// Minimum over all permutations, for tiny square problems.
fn exhaustive(c: &CostMatrix) -> f64 {
    fn rec(c: &CostMatrix, row: usize, used: &mut [bool]) -> f64 {
        if row == c.rows() {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for j in 0..c.cols() {
            if !used[j] {
                used[j] = true;
                best = best.min(c.get(row, j) + rec(c, row + 1, used));
                used[j] = false;
            }
        }
        best
    }
    rec(c, 0, &mut vec![false; c.cols()])
}

#[test]
fn worked_example_plan_and_distance() {
    let (a, b) = worked_example();
    let t = transport(&a, &b, &SinkhornConfig::default()).unwrap();
    let printed = [[0.999, 0.000, 0.000], [0.001, 0.999, 0.000], [0.000, 0.001, 0.999]];
    for (i, row) in printed.iter().enumerate() {
        for (j, &want) in row.iter().enumerate() {
            // Three printed decimals plus rounding slack.
            assert!((t.plan.get(i, j) - want).abs() <= 2e-3, "P[{i}][{j}] = {}", t.plan.get(i, j));
        }
    }
    assert!((t.distance - 6.0).abs() <= 0.01, "distance {}", t.distance);
    assert!(t.plan.iterations <= 1000);
}

#[test]
fn worked_example_exact_cost() {
    let (a, b) = worked_example();
    let c = cost_matrix(&a, &b, 2.0).unwrap();
    assert_eq!(exhaustive(&c), 6.0);
    let exact = exact_assignment(&c).unwrap();
    assert_eq!(exact.cost, 6.0);
    assert_eq!(exact.matching, vec![0, 1, 2]);
}

#[test]
fn self_distance_is_tiny() {
    let d = pts(&[(0.0, 1.0), (0.5, 2.0), (1.5, 2.5)]);
    for cfg in [SinkhornConfig::default(), log_cfg()] {
        assert!(wasserstein_distance(&d, &d, &cfg).unwrap() <= 1e-6);
    }
}

#[test]
fn augmented_example_matches_exhaustive() {
    let c = augmented_cost_matrix(&pts(&[(0., 4.)]), &pts(&[(0., 4.), (1., 1.5)]), 2.0).unwrap();
    assert_eq!(exhaustive(&c), 0.125);
    assert_eq!(exact_assignment(&c).unwrap().cost, 0.125);
    let cfg = SinkhornConfig { cardinality: CardinalityMode::DiagonalAugmented, ..log_cfg() };
    let d = wasserstein_distance(&pts(&[(0., 4.)]), &pts(&[(0., 4.), (1., 1.5)]), &cfg).unwrap();
    assert!((d - 0.125).abs() < 1e-3, "{d}");
}

#[test]
fn equal_diagrams_augment_to_zero_cost() {
    let d = pts(&[(0.0, 1.0), (0.2, 0.9)]);
    let (l, r) = augment_diagonal(&d, &d).unwrap();
    assert_eq!(l, r);
    let c = augmented_cost_matrix(&d, &d, 2.0).unwrap();
    assert_eq!(exact_assignment(&c).unwrap().cost, 0.0);
}

#[test]
fn rectangular_paper_literal_runs() {
    let cfg = SinkhornConfig::default();
    let t = transport(&pts(&[(0.0, 1.0)]), &pts(&[(0.0, 1.0), (0.5, 0.7)]), &cfg).unwrap();
    assert_eq!((t.plan.rows(), t.plan.cols()), (1, 2));
    assert!(t.distance.is_finite());
}

#[test]
fn separated_two_by_two_agrees_with_assignment() {
    let c = CostMatrix::from_rows(&[vec![0.0, 10.0], vec![10.0, 0.0]]).unwrap();
    let exact = exact_assignment(&c).unwrap();
    assert_eq!(exact.matching, vec![0, 1]);
    let plan = sinkhorn_plan(&c, &SinkhornConfig::default()).unwrap();
    assert!((plan.cost(&c) - exact.cost).abs() <= 1e-6);
}

#[test]
fn sinkhorn_tracks_hungarian_in_log_domain() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let n = rng.gen_range(1..=6);
        let (a, b) = (random_diagram(&mut rng, n), random_diagram(&mut rng, n));
        let c = cost_matrix(&a, &b, 2.0).unwrap();
        let exact = exact_assignment(&c).unwrap().cost;
        let approx = wasserstein_distance(&a, &b, &log_cfg()).unwrap();
        assert!(approx >= exact - 1e-9, "{approx} < {exact}");
        assert!(approx - exact <= f64::max(1e-3, 0.01 * exact), "{approx} vs {exact}");
    }
}

#[test]
fn log_and_naive_agree_without_underflow() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 30 {
        let n = rng.gen_range(1..=5);
        let (a, b) = (random_diagram(&mut rng, n), random_diagram(&mut rng, n));
        let c = cost_matrix(&a, &b, 2.0).unwrap();
        let cfg = SinkhornConfig { mu: 0.05, tol: 1e-13, max_iter: 100_000, ..Default::default() };
        if c.max() / cfg.mu > 500.0 {
            continue;
        }
        let naive = sinkhorn_plan(&c, &cfg).unwrap();
        if !naive.converged {
            continue;
        }
        checked += 1;
        let log = sinkhorn_plan(&c, &SinkhornConfig { stabilization: Stabilization::LogDomain, ..cfg }).unwrap();
        for (x, y) in naive.as_slice().iter().zip(log.as_slice()) {
            assert!((x - y).abs() <= 1e-8, "{x} vs {y}");
        }
    }
}

#[test]
fn worked_example_log_domain_keeps_printed_plan() {
    let (a, b) = worked_example();
    let t = transport(&a, &b, &log_cfg()).unwrap();
    assert!(t.plan.converged);
    let printed = [[0.999, 0.000, 0.000], [0.001, 0.999, 0.000], [0.000, 0.001, 0.999]];
    for (i, row) in printed.iter().enumerate() {
        for (j, &want) in row.iter().enumerate() {
            assert!((t.plan.get(i, j) - want).abs() <= 2e-3, "P[{i}][{j}] = {}", t.plan.get(i, j));
        }
    }
    assert!((t.distance - 6.0).abs() <= 0.01);
}

#[test]
fn converged_square_plans_are_doubly_stochastic() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut seen = 0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=6);
        let c = cost_matrix(&random_diagram(&mut rng, n), &random_diagram(&mut rng, n), 2.0).unwrap();
        let cfg = SinkhornConfig { mu: 0.5, ..Default::default() };
        let plan = sinkhorn_plan(&c, &cfg).unwrap();
        if !plan.converged {
            continue;
        }
        seen += 1;
        for s in plan.row_sums().into_iter().chain(plan.col_sums()) {
            assert!((s - 1.0).abs() <= 1e-3, "{s}");
        }
    }
    assert!(seen > 100);
}

proptest! {
    #[test]
    fn joint_scaling_is_exact(seed in any::<u64>(), n in 1usize..6, exp in -3i32..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = cost_matrix(&random_diagram(&mut rng, n), &random_diagram(&mut rng, n), 2.0).unwrap();
        let s = 2f64.powi(exp);
        let cfg = SinkhornConfig { mu: 0.1, ..Default::default() };
        let scaled_cfg = SinkhornConfig { mu: cfg.mu * s, ..cfg };
        let scaled = c.scaled(s).unwrap();
        let p = sinkhorn_plan(&c, &cfg).unwrap();
        let q = sinkhorn_plan(&scaled, &scaled_cfg).unwrap();
        prop_assert_eq!(p.as_slice(), q.as_slice());
        prop_assert_eq!(q.cost(&scaled), s * p.cost(&c));
    }

    #[test]
    fn symmetric_in_argument_order(seed in any::<u64>(), n in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_diagram(&mut rng, n), random_diagram(&mut rng, n));
        let cfg = SinkhornConfig { mu: 0.1, tol: 1e-12, max_iter: 20_000, ..log_cfg() };
        let ab = transport(&a, &b, &cfg).unwrap();
        let ba = transport(&b, &a, &cfg).unwrap();
        prop_assume!(ab.plan.converged && ba.plan.converged);
        prop_assert!((ab.distance - ba.distance).abs() <= 1e-9, "{} vs {}", ab.distance, ba.distance);
    }

    #[test]
    fn never_below_assignment(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_diagram(&mut rng, n), random_diagram(&mut rng, n));
        let c = cost_matrix(&a, &b, 2.0).unwrap();
        let exact = exact_assignment(&c).unwrap().cost;
        let d = wasserstein_distance(&a, &b, &log_cfg()).unwrap();
        prop_assert!(d >= exact - 1e-9, "{} < {}", d, exact);
    }
}
