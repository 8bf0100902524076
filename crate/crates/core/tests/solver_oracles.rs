//! Every solver against its independent brute-force oracle. Objectives are
//! restated inline here so the checks share no arithmetic with the solver
//! implementations.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use mrd_core::divergence::{rd_chain, rd_even_sided};
use mrd_core::grading::{bundle_separable_values, natural_gf, validate_grading,
    IncrementSequence};
use mrd_core::oracle::{maximize_1d, maximize_increment_grid, maximize_simplex_grid, GridSpec};
use mrd_core::poset::{bundle_poset, ChainBundle};
use mrd_core::solve::{
    solve_conditional, solve_height_dependent, solve_independence, solve_interpolation,
    solve_type_distribution, solve_uniform, KnotConstraints, QueueTypeParams, TypeParams,
};

/// Solvers are true maximizers: any oracle value may exceed them only by
/// numerical noise.
const SOLVER_SLACK: f64 = 1e-9;

fn entropy(p: &[f64]) -> f64 {
    p.iter().map(|&x| if x > 0.0 { -x * x.ln() } else { 0.0 }).sum()
}

#[test]
fn uniform_beats_the_simplex_grid() {
    let solution = solve_uniform(3).unwrap();
    let grid = GridSpec::unit(3, 1e-3).unwrap();
    let (p, best) = maximize_simplex_grid(entropy, 3, &grid).unwrap();
    for &pi in &p {
        assert!((pi - 1.0 / 3.0).abs() <= 1e-3 + 1e-12);
    }
    assert!(best <= solution.entropy + SOLVER_SLACK);
}

#[test]
fn interpolation_matches_the_increment_grid_on_the_ragged_case() {
    let knots = KnotConstraints::new(vec![(0, 0.0), (2, 0.6), (5, 1.0)]).unwrap();
    let solution = solve_interpolation(5, &knots).unwrap();
    let grid = GridSpec::unit(1, 0.02).unwrap();
    let (_, oracle_best) = maximize_increment_grid(5, &knots, &grid).unwrap();
    assert!(solution.attained_rd() >= oracle_best - SOLVER_SLACK);
    assert!((solution.attained_rd() - oracle_best).abs() <= 1e-4);
}

#[test]
fn interpolation_beats_the_grid_on_random_knot_sets() {
    let mut rng = StdRng::seed_from_u64(1040);
    let grid = GridSpec::unit(1, 0.05).unwrap();
    for _ in 0..20 {
        let n = rng.random_range(1..=6);
        let mut positions: Vec<usize> = (1..n).filter(|_| rng.random_bool(0.3)).collect();
        positions.push(n);
        let mut value = 0.0;
        let mut knots = vec![(0usize, 0.0f64)];
        for &pos in &positions {
            value += rng.random_range(0.0..1.0);
            knots.push((pos, value));
        }
        // rescale interior values onto [0, 1]
        let top = knots.last().unwrap().1;
        let knots: Vec<(usize, f64)> = knots
            .into_iter()
            .map(|(p, v)| (p, if top > 0.0 { v / top } else { v }))
            .collect();
        let constraints = KnotConstraints::new(knots).unwrap();
        let solution = solve_interpolation(n, &constraints).unwrap();
        let (values, oracle_best) = maximize_increment_grid(n, &constraints, &grid).unwrap();
        assert!(solution.attained_rd() >= oracle_best - SOLVER_SLACK);
        assert!((solution.attained_rd() - oracle_best).abs() <= 1e-3);
        // the oracle's grading is feasible: it passes through every knot
        for &(pos, v) in constraints.knots() {
            assert!((values[pos] - v).abs() < 1e-9);
        }
        // and the solver passes through every knot essentially exactly
        for &(pos, v) in constraints.knots() {
            assert!((solution.eval(pos) - v).abs() <= 1e-12);
        }
    }
}

#[test]
fn conditional_agrees_with_golden_section() {
    for &(p1, p2, expected) in &[(0.3, 0.6, 0.5), (0.2, 0.5, 0.4)] {
        let solution = solve_conditional(p1, p2).unwrap();
        assert!((solution.x_star - expected).abs() < 1e-12);
        let q = |x: f64| -x * (x / p1).ln() - (1.0 - x) * ((1.0 - x) / (p2 - p1)).ln();
        let (x, value) = maximize_1d(q, (1e-9, 1.0 - 1e-9), 1e-10).unwrap();
        assert!((x - solution.x_star).abs() < 1e-8);
        assert!(value <= solution.value + SOLVER_SLACK);
    }
    assert_eq!(solve_conditional(0.4, 0.4).unwrap().x_star, 1.0);
}

#[test]
fn conditional_satisfies_first_order_optimality() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..50 {
        let p1: f64 = rng.random_range(0.05..0.9);
        let p2: f64 = rng.random_range(p1 + 0.05..1.0_f64.min(p1 + 0.9));
        let solution = solve_conditional(p1, p2).unwrap();
        let x = solution.x_star;
        let q_prime = (1.0 - x).ln() - x.ln() + p1.ln() - (p2 - p1).ln();
        assert!(q_prime.abs() < 1e-9, "q'({x}) = {q_prime} for ({p1}, {p2})");
        let q_second = -1.0 / (x * (1.0 - x));
        assert!(q_second < 0.0);
    }
}

#[test]
fn independence_agrees_with_golden_section() {
    let cases = [(0.5, 0.5, 0.25), (0.9, 0.9, 0.81), (0.3, 0.7, 0.21)];
    for &(p1, p2, expected) in &cases {
        let solution = solve_independence(p1, p2).unwrap();
        assert!((solution.x_star - expected).abs() < 1e-12);
        assert!(solution.lower < solution.x_star && solution.x_star < solution.upper);

        let term = |v: f64| if v > 0.0 { -v * v.ln() } else { 0.0 };
        let d = |x: f64| term(x) + term(p1 - x) + term(p2 - x) + term(1.0 - p1 - p2 + x);
        let (x, value) = maximize_1d(
            d,
            (solution.lower + 1e-9, solution.upper - 1e-9),
            1e-10,
        )
        .unwrap();
        assert!((x - solution.x_star).abs() < 1e-8);
        assert!(value <= solution.value + SOLVER_SLACK);
    }
}

#[test]
fn independence_satisfies_first_order_optimality() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..50 {
        let p1: f64 = rng.random_range(0.1..0.9);
        let p2: f64 = rng.random_range(0.1..0.9);
        let solution = solve_independence(p1, p2).unwrap();
        let x = solution.x_star;
        let d_prime = -x.ln() + (p1 - x).ln() + (p2 - x).ln() - (1.0 - p1 - p2 + x).ln();
        assert!(d_prime.abs() < 1e-9, "d'({x}) = {d_prime} for ({p1}, {p2})");
        assert!(solution.second_derivative < 0.0);
    }
}

#[test]
fn type_distribution_matches_the_simplex_grid() {
    let params = QueueTypeParams::new(vec![
        TypeParams { divergence: 0.2, span: 1.0 },
        TypeParams { divergence: 0.5, span: 2.0 },
        TypeParams { divergence: 0.9, span: 1.0 },
    ])
    .unwrap();
    let solution = solve_type_distribution(&params).unwrap();

    // objective restated inline
    let ds = [0.2, 0.5, 0.9];
    let spans = [1.0, 2.0, 1.0];
    let objective = |p: &[f64]| -> f64 {
        p.iter()
            .zip(ds.iter().zip(&spans))
            .map(|(&pk, (&d, &s))| if pk > 0.0 { pk * (d - s * pk.ln()) } else { 0.0 })
            .sum()
    };
    let grid = GridSpec::unit(3, 1e-3).unwrap();
    let (p, best) = maximize_simplex_grid(objective, 3, &grid).unwrap();
    for (&oracle_pk, &solver_pk) in p.iter().zip(solution.p()) {
        assert!((oracle_pk - solver_pk).abs() <= 1e-3);
    }
    assert!(best <= solution.objective() + SOLVER_SLACK);
    assert!(solution.objective() >= best - SOLVER_SLACK);
}

#[test]
fn type_distribution_argmax_is_invariant_under_joint_scaling() {
    let base = QueueTypeParams::new(vec![
        TypeParams { divergence: 0.3, span: 0.7 },
        TypeParams { divergence: 1.1, span: 1.9 },
        TypeParams { divergence: 0.6, span: 1.2 },
    ])
    .unwrap();
    let scaled = QueueTypeParams::new(
        base.types()
            .iter()
            .map(|t| TypeParams {
                divergence: 3.5 * t.divergence,
                span: 3.5 * t.span,
            })
            .collect(),
    )
    .unwrap();
    let a = solve_type_distribution(&base).unwrap();
    let b = solve_type_distribution(&scaled).unwrap();
    for (pa, pb) in a.p().iter().zip(b.p()) {
        assert!((pa - pb).abs() < 1e-9);
    }
}

#[test]
fn type_distribution_is_permutation_equivariant() {
    let types = vec![
        TypeParams { divergence: 0.3, span: 0.7 },
        TypeParams { divergence: 1.1, span: 1.9 },
        TypeParams { divergence: 0.6, span: 1.2 },
    ];
    let forward = solve_type_distribution(&QueueTypeParams::new(types.clone()).unwrap()).unwrap();
    let mut reversed_types = types;
    reversed_types.reverse();
    let backward =
        solve_type_distribution(&QueueTypeParams::new(reversed_types).unwrap()).unwrap();
    for (k, p) in forward.p().iter().enumerate() {
        let mirrored = backward.p()[backward.p().len() - 1 - k];
        assert!((p - mirrored).abs() < 1e-10);
    }
}

#[test]
fn height_dependent_solution_matches_poset_evaluation() {
    for dims in [vec![2, 3], vec![1, 1], vec![4], vec![2, 2, 2]] {
        let bundle = ChainBundle::new(dims).unwrap();
        let q = bundle.total_height() as f64;
        for (m, big_m) in [(0.0, 1.0), (0.5, 2.5), (-1.0, 3.0)] {
            let solution = solve_height_dependent(&bundle, m, big_m).unwrap();
            let natural = natural_gf(&solution.poset).unwrap();
            let evaluated = rd_even_sided(&solution.poset, &solution.gf, &natural).unwrap();
            assert!((evaluated.value - solution.max_rd).abs() < 1e-10);
            let span = big_m - m;
            assert!((solution.max_rd - (span * q.ln() - span * span.ln())).abs() < 1e-10);
        }
    }
}

#[test]
fn updated_group_test_plan_dominates_sampled_cost_models() {
    use mrd_core::apps::{group_test_null, group_test_update};
    let plan = group_test_null(6, 3.0).unwrap();
    let knots = KnotConstraints::new(vec![(0, 0.0), (3, 2.0), (6, 3.0)]).unwrap();
    let updated = group_test_update(&plan, &knots).unwrap();
    let grid = GridSpec::unit(1, 0.02).unwrap();
    let (_, oracle_best) = maximize_increment_grid(6, &knots, &grid).unwrap();
    assert!(updated.cost_fn().attained_rd() >= oracle_best - SOLVER_SLACK);
}

#[test]
fn separable_divergence_sums_over_component_chains() {
    // uniform per-chain gradings on a [2, 2] bundle: ln 2 each
    let bundle = ChainBundle::new(vec![2, 2]).unwrap();
    let per_arm = vec![vec![0.0, 0.5, 1.0], vec![0.0, 0.5, 1.0]];
    let f_values = bundle_separable_values(&bundle, &per_arm).unwrap();
    let poset = bundle_poset(&bundle).unwrap();
    let f = validate_grading(&poset, &f_values, false).unwrap();
    let natural = natural_gf(&poset).unwrap();
    let whole = rd_even_sided(&poset, &f, &natural).unwrap();
    assert!((whole.value - 2.0 * 2f64.ln()).abs() < 1e-12);

    // random separable F and G over random small bundles
    let mut rng = StdRng::seed_from_u64(23);
    for _ in 0..15 {
        let arm_count = rng.random_range(2..=3);
        let dims: Vec<usize> = (0..arm_count).map(|_| rng.random_range(1..=3)).collect();
        if dims.iter().sum::<usize>() > 8 {
            continue;
        }
        let bundle = ChainBundle::new(dims.clone()).unwrap();
        let arm_values = |rng: &mut StdRng, strict: bool| -> Vec<Vec<f64>> {
            dims.iter()
                .map(|&n| {
                    let mut v = vec![0.0];
                    for _ in 0..n {
                        let lo = if strict { 0.1 } else { 0.0 };
                        let step = rng.random_range(lo..2.0);
                        v.push(v.last().unwrap() + step);
                    }
                    v
                })
                .collect()
        };
        let f_arms = arm_values(&mut rng, false);
        let g_arms = arm_values(&mut rng, true);

        let per_chain_sum: f64 = f_arms
            .iter()
            .zip(&g_arms)
            .map(|(fa, ga)| {
                let fi: Vec<f64> = fa.windows(2).map(|w| w[1] - w[0]).collect();
                let gi: Vec<f64> = ga.windows(2).map(|w| w[1] - w[0]).collect();
                rd_chain(&IncrementSequence::new(fi, gi).unwrap())
            })
            .sum();

        let poset = bundle_poset(&bundle).unwrap();
        let f = validate_grading(&poset, &bundle_separable_values(&bundle, &f_arms).unwrap(), false)
            .unwrap();
        let g = validate_grading(&poset, &bundle_separable_values(&bundle, &g_arms).unwrap(), false)
            .unwrap();
        let joint = rd_even_sided(&poset, &f, &g).unwrap();
        assert!(
            (joint.value - per_chain_sum).abs() < 1e-10,
            "dims {dims:?}: joint {} vs separable sum {per_chain_sum}",
            joint.value
        );
    }
}
