mod common;

use rand::Rng;
use subopt_core::costsim::{build_closed_loop, initial_error, sample_sphere};
use subopt_core::design::{
    check_initial_condition, classify_c, default_c, synthesize, verify_certificate, CaseBCoefficient, CaseTag,
    CostSpec, DesignRequest,
};
use subopt_core::example::{self, reference};
use subopt_core::graph::{gamma_spectrum, GammaSpectrum};
use subopt_core::linalg::{inverse, kron, Matrix};
use subopt_core::Error;

#[test]
fn reference_design_reproduces_reference_numbers() {
    let req = example::request().unwrap();
    let cert = synthesize(&req).unwrap();
    assert_eq!(cert.case_tag, CaseTag::CaseA);
    assert!((cert.c - reference::C).abs() <= 1e-3);
    assert!((cert.lambda_min - reference::LAMBDA_MIN).abs() <= 1e-3);
    assert!((cert.lambda_max - reference::LAMBDA_MAX).abs() <= 1e-3);
    for j in 0..2 {
        assert!(
            (-cert.k[(0, j)] - reference::K_MAGNITUDE[j]).abs() <= 1e-3,
            "K = {:?}",
            cert.k
        );
    }
    assert!((cert.p_max_eigenvalue - reference::P_MAX_EIGENVALUE).abs() <= 1e-3);
    assert!((cert.admissible_radius - reference::RADIUS_BOUND).abs() <= 1e-3);
    assert!(cert.requested_radius_ok);
}

#[test]
fn gain_is_exactly_minus_c_rinv_bt_p() {
    let req = example::request().unwrap();
    let cert = synthesize(&req).unwrap();
    let expected = (&(&inverse(&req.cost.r).unwrap() * &req.agent.b.transpose()) * &cert.p).scale(-cert.c);
    assert_eq!(cert.k, expected);
}

#[test]
fn default_c_sits_on_case_a_lower_endpoint() {
    let mut rng = common::rng(30);
    for _ in 0..50 {
        let n = rng.random_range(1..=6);
        let eig: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..10.0)).collect();
        let s = GammaSpectrum::from_eigenvalues(eig).unwrap();
        let c = default_c(&s);
        assert!(c >= 2.0 / (s.lambda_min() + s.lambda_max()));
        assert!(c < 2.0 / s.lambda_max() || s.lambda_min() == s.lambda_max() && c == 1.0 / s.lambda_max());
        assert_eq!(classify_c(c, &s).unwrap(), CaseTag::CaseA);
    }
}

#[test]
fn reference_case_classification() {
    let s = gamma_spectrum(&example::network()).unwrap();
    assert_eq!(classify_c(0.4701, &s).unwrap(), CaseTag::CaseB);
    assert_eq!(classify_c(default_c(&s), &s).unwrap(), CaseTag::CaseA);
    assert_eq!(classify_c(1e-6, &s).unwrap(), CaseTag::CaseB);
    assert!(matches!(
        classify_c(2.0 / s.lambda_max(), &s),
        Err(Error::InadmissibleCoupling { .. })
    ));
}

#[test]
fn radius_scales_with_square_root_of_tolerance() {
    let base = example::request().unwrap();
    let c1 = synthesize(&base).unwrap();
    let mut scaled = base.clone();
    scaled.cost = CostSpec::new(
        base.cost.q.clone(),
        base.cost.r.clone(),
        4.0 * base.cost.gamma,
        base.cost.radius,
    )
    .unwrap();
    let c4 = synthesize(&scaled).unwrap();
    assert_eq!(c1.p, c4.p);
    assert!((c4.admissible_radius - 2.0 * c1.admissible_radius).abs() <= 1e-12);
}

#[test]
fn reference_certificate_verifies() {
    let req = example::request().unwrap();
    let cert = synthesize(&req).unwrap();
    let report = verify_certificate(&cert, &req).unwrap();
    assert_eq!(report.modes.len(), 5);
    assert!(report.modes.iter().all(|m| m.hurwitz && m.inequality_negative_definite));
    assert!(report.radius_condition);
    assert!(report.passes());
}

#[test]
fn zero_gain_fails_verification() {
    let req = example::request().unwrap();
    let mut cert = synthesize(&req).unwrap();
    cert.k = Matrix::zeros(1, 2);
    let report = verify_certificate(&cert, &req).unwrap();
    assert!(report.modes.iter().all(|m| !m.hurwitz));
    assert!(!report.passes());
}

#[test]
fn oversized_radius_fails_only_radius_condition() {
    let mut req = example::request().unwrap();
    req.cost.radius = 2.0;
    let cert = synthesize(&req).unwrap();
    assert!(!cert.requested_radius_ok);
    let report = verify_certificate(&cert, &req).unwrap();
    assert!(report.modes_pass());
    assert!(!report.radius_condition);
    assert!(!report.passes());
}

#[test]
fn case_b_designs_verify() {
    for c in [0.2, 0.3, 0.05] {
        let req = example::request().unwrap().with_c(c);
        let cert = synthesize(&req).unwrap();
        assert_eq!(cert.case_tag, CaseTag::CaseB);
        let report = verify_certificate(&cert, &req).unwrap();
        assert!(report.modes_pass(), "c = {c}: {report:?}");
    }
}

#[test]
fn case_b_alternate_reading_is_reachable() {
    let first = synthesize(&example::request().unwrap().with_c(0.2)).unwrap();
    let second = synthesize(
        &example::request()
            .unwrap()
            .with_c(0.2)
            .with_case_b_coefficient(CaseBCoefficient::LinearLambda2),
    )
    .unwrap();
    assert!((&first.p - &second.p).max_abs() > 1e-3);
}

#[test]
fn reference_initial_states_satisfy_condition() {
    let req = example::request().unwrap();
    let cert = synthesize(&req).unwrap();
    let x0 = example::follower_initial_stacked();
    let report = check_initial_condition(&cert, &x0, &example::LEADER_INITIAL, req.cost.gamma).unwrap();
    assert!(report.within_bound());
    assert!(report.within_ball());
    assert!(report.error_norm <= reference::RADIUS_BOUND);

    let synced: Vec<f64> = example::LEADER_INITIAL.iter().copied().cycle().take(10).collect();
    let zero = check_initial_condition(&cert, &synced, &example::LEADER_INITIAL, req.cost.gamma).unwrap();
    assert_eq!(zero.quadratic_form, 0.0);
    assert!(zero.within_bound());

    assert!(check_initial_condition(&cert, &x0[..9], &example::LEADER_INITIAL, 20.0).is_err());
    assert!(check_initial_condition(&cert, &x0, &[0.0; 3], 20.0).is_err());
}

#[test]
fn ball_is_inner_approximation_of_ellipsoid() {
    let req = example::request().unwrap();
    let cert = synthesize(&req).unwrap();
    let xr0 = example::LEADER_INITIAL;
    // direction of the smallest eigenvector of P in follower 1 only
    let p = &cert.p;
    let lmin_vec = {
        let eig = subopt_core::linalg::sym_eigen(p).unwrap();
        eig.eigenvectors.col(0)
    };
    let mut e0 = [0.0; 10];
    e0[..2].copy_from_slice(&lmin_vec);
    let scale = 1.3 * cert.admissible_radius;
    let x0: Vec<f64> = e0.iter().zip(xr0.iter().cycle()).map(|(e, r)| scale * e + r).collect();
    let report = check_initial_condition(&cert, &x0, &xr0, req.cost.gamma).unwrap();
    assert!(!report.within_ball());
    // value is 1.69·γ·λ_min(P)/λ_max(P), below γ for this P
    assert!(report.within_bound());
}

#[test]
fn certified_ball_bounds_exact_cost() {
    let req = example::request().unwrap();
    let cert = synthesize(&req).unwrap();
    assert!(verify_certificate(&cert, &req).unwrap().passes());
    let cl = build_closed_loop(&req.agent, &req.network, &req.cost, &cert.k).unwrap();
    let x = cl.cost_matrix().unwrap();
    let block_p = kron(&Matrix::identity(5), &cert.p);
    let bound = req.cost.gamma / (req.cost.radius * req.cost.radius);
    let mut rng = common::rng(31);
    for _ in 0..200 {
        let e0 = sample_sphere(&mut rng, 10, req.cost.radius);
        assert!(x.quadratic_form(&e0).unwrap() < req.cost.gamma);
        let rho = rng.random_range(0.0..req.cost.radius);
        let inner = sample_sphere(&mut rng, 10, rho);
        let v = block_p.quadratic_form(&inner).unwrap();
        assert!(v < req.cost.gamma);
        assert!(v <= bound * subopt_core::linalg::norm(&inner).powi(2) + 1e-12);
    }
    let e0 = initial_error(&example::follower_initial_stacked(), &example::LEADER_INITIAL);
    assert!(x.quadratic_form(&e0).unwrap() < req.cost.gamma);
}

#[test]
fn random_networks_design_and_verify() {
    let mut rng = common::rng(32);
    for _ in 0..10 {
        let inst = common::random_designed_instance(&mut rng, 3, 5, 1e6);
        let report = verify_certificate(&inst.cert, &inst.request).unwrap();
        assert!(report.modes_pass());
        assert_eq!(report.radius_condition, inst.cert.requested_radius_ok);
    }
}

#[test]
fn invalid_requests_are_rejected() {
    let req = example::request().unwrap().with_epsilon(0.0);
    assert!(synthesize(&req).is_err());
    let req = example::request().unwrap().with_c(0.9);
    assert!(matches!(synthesize(&req), Err(Error::InadmissibleCoupling { .. })));
    let bad_cost = CostSpec::new(Matrix::identity(3), Matrix::identity(1), 1.0, 1.0).unwrap();
    assert!(DesignRequest::new(example::agent(), example::network(), bad_cost).is_err());
}
