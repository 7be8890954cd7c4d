use drbo_core::dro::oracle::simplex_grid_maximum;
use drbo_core::dro::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> DiscretePdf {
    let masses: Vec<f64> = (0..n).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    DiscretePdf::from_masses(&masses).unwrap()
}

fn default_ball(center: DiscretePdf, eps: f64) -> MmdBall {
    let grid = NoiseGrid::uniform(center.len(), 0.0, 0.08).unwrap();
    MmdBall::with_default_kernel(&grid, center, eps).unwrap()
}

/// `⟨w, v + μ⟩ + ε‖v − ν1 + μ‖_{M⁻¹}` through an LU solve, an upper bound on
/// the worst-case value for any `ν` and `μ ≥ 0`.
fn dual_bound(values: &[f64], ball: &MmdBall, nu: f64, mu: &[f64]) -> f64 {
    let n = values.len();
    let y = DVector::from_fn(n, |i, _| values[i] - nu + mu[i]);
    let x = ball.kernel().clone().lu().solve(&y).unwrap();
    let w = ball.center().weights();
    let lin: f64 = (0..n).map(|i| w[i] * (values[i] + mu[i])).sum();
    lin + ball.radius() * y.dot(&x).max(0.0).sqrt()
}

#[test]
fn kernel_matches_hand_evaluation() {
    let g = NoiseGrid::new(vec![0.0, 0.04, 0.08]).unwrap();
    let m = mmd_kernel_matrix(&g, 0.04).unwrap();
    let e_half = (-0.5f64).exp();
    let e_two = (-2.0f64).exp();
    let expected = DMatrix::from_row_slice(3, 3, &[1.0, e_half, e_two, e_half, 1.0, e_half, e_two, e_half, 1.0]);
    assert!((m - expected).abs().max() < 1e-12);
}

#[test]
fn distance_matches_embedding_expansion() {
    // ‖Σ a_i k(ξ_i,·) − Σ b_i k(ξ_i,·)‖² expanded as a double sum of kernel
    // evaluations.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let grid = NoiseGrid::default();
    let l = 0.01;
    let m = mmd_kernel_matrix(&grid, l).unwrap();
    let k = |x: f64, y: f64| (-(x - y) * (x - y) / (2.0 * l * l)).exp();
    for _ in 0..20 {
        let a = random_simplex(&mut rng, 20);
        let b = random_simplex(&mut rng, 20);
        let xs = grid.levels();
        let mut sq = 0.0;
        for i in 0..20 {
            for j in 0..20 {
                let (ai, bi) = (a.weights()[i], b.weights()[i]);
                let (aj, bj) = (a.weights()[j], b.weights()[j]);
                sq += (ai * aj - ai * bj - bi * aj + bi * bj) * k(xs[i], xs[j]);
            }
        }
        let d = mmd_distance(&a, &b, &m).unwrap();
        assert!((d - sq.max(0.0).sqrt()).abs() < 1e-12);
    }
}

#[test]
fn dual_certificate_at_default_size() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for case in 0..300 {
        let center = random_simplex(&mut rng, 20);
        let eps = [0.01, 0.05, 0.1, 0.3, 0.8][case % 5];
        let ball = default_ball(center, eps);
        let values: Vec<f64> = (0..20).map(|_| rng.random_range(-2.0..2.0)).collect();
        let out = solve_worst_case(&values, &ball).unwrap();
        let u = out.pdf.weights();
        assert!(ball.distance_from_center(u).unwrap() <= eps + FEASIBILITY_TOL);
        assert!(u.iter().all(|&x| x >= 0.0));
        assert!(out.nonnegativity_multipliers.iter().all(|&x| x >= 0.0));
        let bound = dual_bound(&values, &ball, out.sum_multiplier, &out.nonnegativity_multipliers);
        assert!(bound >= out.value - 1e-9, "case {case}: bound {bound} < value {}", out.value);
        assert!(bound - out.value <= 1e-6, "case {case}: duality gap {}", bound - out.value);
    }
}

#[test]
fn reference_pdf_center_with_sparse_support() {
    // A truncated Gaussian far from most levels puts near-zero mass on them.
    let grid = NoiseGrid::default();
    let center = truncated_gaussian_pdf(-0.01, 0.005, &grid).unwrap();
    let ball = MmdBall::with_default_kernel(&grid, center, 0.1).unwrap();
    let values: Vec<f64> = grid.levels().iter().map(|x| (40.0 * x).sin()).collect();
    let out = solve_worst_case(&values, &ball).unwrap();
    let bound = dual_bound(&values, &ball, out.sum_multiplier, &out.nonnegativity_multipliers);
    assert!(bound - out.value <= 1e-6);
}

#[test]
fn agrees_with_simplex_lattice_at_n5() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let center = random_simplex(&mut rng, 5);
        let ball = default_ball(center, 0.1);
        let values: Vec<f64> = (0..5).map(|_| rng.random::<f64>()).collect();
        let ours = solve_worst_case(&values, &ball).unwrap().value;
        let (_, lattice) = simplex_grid_maximum(&values, &ball, 50).unwrap();
        // The lattice optimum is feasible, so it can never beat the solver.
        assert!(ours >= lattice - 1e-9);
        assert!(ours - lattice <= 1e-2, "solver {ours} far above lattice {lattice}");
    }
}

#[test]
fn identity_metric_large_ball_is_vertex() {
    let ball = MmdBall::new(DiscretePdf::uniform(3).unwrap(), 2.0, DMatrix::identity(3, 3)).unwrap();
    let out = worst_case_distribution(&[1.0, 2.0, 3.0], &ball).unwrap();
    assert_eq!(out.weights(), &[0.0, 0.0, 1.0]);
}

#[test]
fn shift_series_mean_increases() {
    let grid = NoiseGrid::default();
    let means: Vec<f64> = (0..9)
        .map(|k| truncated_gaussian_pdf(-0.01 + 0.01 * k as f64, 0.01, &grid).unwrap().mean(&grid))
        .collect();
    assert!(means.windows(2).all(|p| p[1] > p[0]), "{means:?}");
}

#[test]
fn wide_gaussian_is_nearly_uniform() {
    let grid = NoiseGrid::default();
    let w = truncated_gaussian_pdf(0.04, 1e3, &grid).unwrap();
    assert!(w.weights().iter().all(|&x| (x - 0.05).abs() < 1e-9));
}

fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, f64)> {
    (
        prop::collection::vec(0.01f64..1.0, 8),
        prop::collection::vec(-3.0f64..3.0, 8),
        0.0f64..0.6,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn feasible_and_no_worse_than_center((masses, values, eps) in instance()) {
        let ball = default_ball(DiscretePdf::from_masses(&masses).unwrap(), eps);
        let out = solve_worst_case(&values, &ball).unwrap();
        let u = out.pdf.weights();
        prop_assert!((u.iter().sum::<f64>() - 1.0).abs() <= FEASIBILITY_TOL);
        prop_assert!(u.iter().all(|&x| x >= -FEASIBILITY_TOL));
        prop_assert!(ball.distance_from_center(u).unwrap() <= eps + FEASIBILITY_TOL);
        prop_assert!(out.value >= ball.center().dot(&values) - 1e-9);
    }

    #[test]
    fn monotone_in_radius((masses, values, eps) in instance(), extra in 0.0f64..0.5) {
        let ball = default_ball(DiscretePdf::from_masses(&masses).unwrap(), eps);
        let small = solve_worst_case(&values, &ball).unwrap().value;
        let large = solve_worst_case(&values, &ball.with_radius(eps + extra).unwrap()).unwrap().value;
        prop_assert!(small <= large + 1e-9);
    }

    #[test]
    fn positive_affine_equivariance((masses, values, eps) in instance(), c in 0.1f64..10.0, d in -5.0f64..5.0) {
        let ball = default_ball(DiscretePdf::from_masses(&masses).unwrap(), eps);
        let base = solve_worst_case(&values, &ball).unwrap().value;
        let moved: Vec<f64> = values.iter().map(|v| c * v + d).collect();
        let out = solve_worst_case(&moved, &ball).unwrap().value;
        prop_assert!((out - (c * base + d)).abs() <= 1e-8 * (1.0 + c), "{} vs {}", out, c * base + d);
    }

    #[test]
    fn triangle_inequality(a in prop::collection::vec(0.01f64..1.0, 20),
                           b in prop::collection::vec(0.01f64..1.0, 20),
                           c in prop::collection::vec(0.01f64..1.0, 20)) {
        let grid = NoiseGrid::default();
        let m = mmd_kernel_matrix(&grid, 2.0 * grid.spacing()).unwrap();
        let (a, b, c) = (
            DiscretePdf::from_masses(&a).unwrap(),
            DiscretePdf::from_masses(&b).unwrap(),
            DiscretePdf::from_masses(&c).unwrap(),
        );
        let ab = mmd_distance(&a, &b, &m).unwrap();
        let bc = mmd_distance(&b, &c, &m).unwrap();
        let ac = mmd_distance(&a, &c, &m).unwrap();
        prop_assert!(ac <= ab + bc + 1e-9);
    }
}
