mod common;

use rand::Rng;
use subopt_core::design::parameterized_riccati;
use subopt_core::example;
use subopt_core::graph::gamma_spectrum;
use subopt_core::linalg::{is_hurwitz, sym_eigen, Matrix};
use subopt_core::riccati::{
    are_residual, bass_initial_gain, is_negative_definite, residual_bound, riccati_coefficient,
    riccati_inequality_residual, solve_are, AreProblem,
};

fn reference_solution(c: f64, epsilon: f64) -> Matrix {
    let s = gamma_spectrum(&example::network()).unwrap();
    parameterized_riccati(
        &example::agent(),
        &example::cost(),
        c,
        s.lambda_max(),
        s.lambda_max(),
        epsilon,
    )
    .unwrap()
    .p
}

#[test]
fn reference_pair_gets_stabilizing_initial_gain() {
    let agent = example::agent();
    let k0 = bass_initial_gain(&agent.a, &agent.b).unwrap();
    assert!(is_hurwitz(&(&agent.a + &(&agent.b * &k0))).unwrap());
}

#[test]
fn reference_certificate_matches_reference_p() {
    let s = gamma_spectrum(&example::network()).unwrap();
    let c = 2.0 / (s.lambda_min() + s.lambda_max());
    let p = reference_solution(c, example::EPSILON);
    for i in 0..2 {
        for j in 0..2 {
            assert!(
                (p[(i, j)] - example::reference::P[i][j]).abs() <= 1e-3,
                "P[{i}][{j}] = {}",
                p[(i, j)]
            );
        }
    }
}

#[test]
fn regularization_of_one_hundredth_gives_a_larger_p() {
    // Independent Schur-based ARE solve gives P₁₁ = 13.26833 for ε = 0.01.
    let s = gamma_spectrum(&example::network()).unwrap();
    let c = 2.0 / (s.lambda_min() + s.lambda_max());
    let p = reference_solution(c, 0.01);
    assert!((p[(0, 0)] - 13.26833).abs() < 1e-4);
    assert!((p[(0, 0)] - example::reference::P[0][0]).abs() > 1e-3);
}

#[test]
fn random_stabilizable_problems_solve_to_tolerance() {
    let mut rng = common::rng(20);
    let mut solved = 0;
    while solved < 20 {
        let m = rng.random_range(1..=2);
        let a = common::random_matrix(&mut rng, 3, 3, 1.0);
        let b = common::random_matrix(&mut rng, 3, m, 1.0);
        // Nearly uncontrollable pairs push ‖P‖ to 1e4 and beyond, where the
        // residual cannot be evaluated to 1e-9 in double precision.
        if common::controllability_margin(&a, &b) < 0.05 {
            continue;
        }
        let h = common::random_matrix(&mut rng, 3, 3, 1.0);
        let q_bar = (&(&h.transpose() * &h) + &Matrix::identity(3).scale(0.01)).symmetrized();
        let r_bar = Matrix::identity(m).scale(rng.random_range(0.1..5.0));
        let prob = AreProblem::new(a.clone(), b.clone(), r_bar.clone(), q_bar.clone()).unwrap();
        let sol = solve_are(&prob).unwrap();
        let residual = are_residual(&prob, &sol.p).unwrap().max_abs();
        assert!(residual <= 1e-9 * (1.0 + q_bar.max_abs()), "residual {residual}");
        assert_eq!(residual, sol.residual_norm);
        let gain = &(&subopt_core::linalg::inverse(&r_bar).unwrap() * &b.transpose()) * &sol.p;
        assert!(is_hurwitz(&(&a - &(&b * &gain))).unwrap());
        assert!(sym_eigen(&sol.p).unwrap().min() > 0.0);
        solved += 1;
    }
}

#[test]
fn solved_certificate_satisfies_every_mode_inequality() {
    let s = gamma_spectrum(&example::network()).unwrap();
    let (agent, cost) = (example::agent(), example::cost());
    let c = 2.0 / (s.lambda_min() + s.lambda_max());
    let eps = example::EPSILON;
    let p = reference_solution(c, eps);

    let at_max = riccati_inequality_residual(
        &p,
        &agent.a,
        &agent.b,
        &cost.r,
        &cost.q,
        riccati_coefficient(c, s.lambda_max()),
        s.lambda_max(),
    )
    .unwrap();
    assert!((&at_max - &Matrix::identity(2).scale(-eps)).max_abs() <= 1e-8);

    for &lambda in &s.eigenvalues {
        let m = riccati_inequality_residual(
            &p,
            &agent.a,
            &agent.b,
            &cost.r,
            &cost.q,
            riccati_coefficient(c, lambda),
            lambda,
        )
        .unwrap();
        assert!(is_negative_definite(&m).unwrap(), "mode λ = {lambda}");
    }
}

#[test]
fn solution_is_monotone_in_coupling_and_regularization() {
    let s = gamma_spectrum(&example::network()).unwrap();
    let best_c = 2.0 / (s.lambda_min() + s.lambda_max());
    let cs = [0.45, 0.46, best_c];
    let eps = [0.001, 0.01, 0.1];
    let grid: Vec<Vec<Matrix>> = cs
        .iter()
        .map(|&c| eps.iter().map(|&e| reference_solution(c, e)).collect())
        .collect();
    for ci in 0..3 {
        for ei in 0..3 {
            if ci + 1 < 3 {
                assert!(common::loewner_min(&grid[ci][ei], &grid[ci + 1][ei]) >= -1e-8);
            }
            if ei + 1 < 3 {
                assert!(common::loewner_min(&grid[ci][ei], &grid[ci][ei + 1]) >= -1e-8);
            }
        }
    }
}

#[test]
fn random_monotonicity_in_regularization() {
    let mut rng = common::rng(21);
    for _ in 0..10 {
        let a = common::random_matrix(&mut rng, 2, 2, 1.5);
        let b = common::random_matrix(&mut rng, 2, 1, 1.0);
        let q = Matrix::from_diag(&[rng.random_range(0.0..2.0), rng.random_range(0.0..2.0)]);
        let r = Matrix::identity(1);
        let e1 = rng.random_range(0.001..0.5);
        let e2 = e1 + rng.random_range(0.0..0.5);
        let solve = |e: f64| {
            solve_are(&AreProblem::parameterized(&a, &b, &q, &r, -0.3, 2.0, e).unwrap())
                .unwrap()
                .p
        };
        assert!(common::loewner_min(&solve(e1), &solve(e2)) >= -1e-8);
    }
}

#[test]
fn ill_conditioned_problem_meets_term_scaled_bound() {
    let a = Matrix::from_rows(&[
        [0.7873973, 0.3471948, -0.7270824],
        [0.8910503, -0.3401076, 0.4169786],
        [-0.04775609, -0.1280693, 0.02874745],
    ])
    .unwrap();
    let b = Matrix::column(&[0.3942492, 0.6623630, 0.9987836]);
    let prob = AreProblem::new(
        a.clone(),
        b.clone(),
        Matrix::from_diag(&[4.323931]),
        Matrix::identity(3),
    )
    .unwrap();
    let sol = solve_are(&prob).unwrap();
    assert!(sol.p.max_abs() > 1e3);
    assert!(sol.residual_norm <= residual_bound(&prob, &sol.p).unwrap());
}
