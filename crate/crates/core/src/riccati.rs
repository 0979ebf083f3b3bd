//! Continuous algebraic Riccati equations `AᵀP + PA − PBR̄⁻¹BᵀP + Q̄ = 0`
//! solved by Newton–Kleinman iteration, plus the Riccati-inequality residual
//! used to check certificates.

use crate::error::{dim_err, Error, Result};
use crate::linalg::{inverse, is_hurwitz, is_positive_definite, solve_lyapunov, sym_eigen, Matrix};

pub const MAX_NEWTON_ITERATIONS: usize = 200;
const STAGNATION_TOL: f64 = 1e-12;
const ROUNDING_FLOOR_TOL: f64 = 1e-8;
pub const RESIDUAL_TOL: f64 = 1e-9;
const BASS_ATTEMPTS: usize = 10;
const PSD_TOL: f64 = 1e-10;

/// Coefficient `c²λ² − 2cλ` multiplying `PBR⁻¹BᵀP` in the Riccati inequalities.
pub fn riccati_coefficient(c: f64, lambda: f64) -> f64 {
    c * c * lambda * lambda - 2.0 * c * lambda
}

#[derive(Debug, Clone)]
pub struct AreProblem {
    pub a: Matrix,
    pub b: Matrix,
    pub r_bar: Matrix,
    pub q_bar: Matrix,
}

impl AreProblem {
    pub fn new(a: Matrix, b: Matrix, r_bar: Matrix, q_bar: Matrix) -> Result<Self> {
        a.require_square("ARE drift")?;
        let n = a.rows();
        if b.rows() != n {
            return Err(dim_err("ARE input matrix rows", n, b.rows()));
        }
        let m = b.cols();
        if r_bar.shape() != (m, m) {
            return Err(dim_err(
                "ARE input weight",
                format!("{m}x{m}"),
                format!("{}x{}", r_bar.rows(), r_bar.cols()),
            ));
        }
        if q_bar.shape() != (n, n) {
            return Err(dim_err(
                "ARE state weight",
                format!("{n}x{n}"),
                format!("{}x{}", q_bar.rows(), q_bar.cols()),
            ));
        }
        if !is_positive_definite(&r_bar)? {
            return Err(Error::NotPositiveDefinite {
                context: "ARE input weight",
            });
        }
        let qmin = sym_eigen(&q_bar)?.min();
        if qmin < -PSD_TOL * (1.0 + q_bar.max_abs()) {
            return Err(Error::InvalidParameter {
                name: "q_bar",
                reason: format!("state weight must be positive semidefinite (min eigenvalue {qmin:e})"),
            });
        }
        Ok(Self { a, b, r_bar, q_bar })
    }

    /// The ARE whose solution satisfies
    /// `AᵀP + PA + coeff·PBR⁻¹BᵀP + λ_q·Q + εI = 0`, i.e. `R̄ = R / (−coeff)`
    /// and `Q̄ = λ_q·Q + εI`. Requires `coeff < 0`.
    pub fn parameterized(
        a: &Matrix,
        b: &Matrix,
        q: &Matrix,
        r: &Matrix,
        coeff: f64,
        lambda_q: f64,
        epsilon: f64,
    ) -> Result<Self> {
        if coeff.is_nan() || coeff >= 0.0 {
            return Err(Error::InvalidParameter {
                name: "coeff",
                reason: format!("Riccati coefficient c²λ² − 2cλ = {coeff} must be negative"),
            });
        }
        if epsilon.is_nan() || epsilon < 0.0 {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                reason: format!("{epsilon} must be nonnegative"),
            });
        }
        let r_bar = r.scale(1.0 / -coeff);
        let q_bar = &q.scale(lambda_q) + &Matrix::identity(q.rows()).scale(epsilon);
        Self::new(a.clone(), b.clone(), r_bar, q_bar)
    }
}

#[derive(Debug, Clone)]
pub struct AreSolution {
    pub p: Matrix,
    pub residual_norm: f64,
    pub iterations: usize,
}

/// `AᵀP + PA − PBR̄⁻¹BᵀP + Q̄`.
pub fn are_residual(prob: &AreProblem, p: &Matrix) -> Result<Matrix> {
    let r_inv = inverse(&prob.r_bar)?;
    let at = prob.a.transpose();
    let pb = p * &prob.b;
    let quad = &(&pb * &r_inv) * &pb.transpose();
    Ok(&(&(&(&at * p) + &(p * &prob.a)) - &quad) + &prob.q_bar)
}

/// Stabilizing initial gain `K₀` (closed loop `a + b·K₀` Hurwitz) by Bass's method.
///
/// Returns zero when `a` is already Hurwitz. Otherwise, for `β = ‖a‖_F + 1`,
/// solves `(a+βI)X + X(a+βI)ᵀ = 2bbᵀ` and returns `K₀ = −bᵀX⁻¹`, doubling β on
/// failure.
pub fn bass_initial_gain(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    a.require_square("bass_initial_gain")?;
    let n = a.rows();
    if b.rows() != n {
        return Err(dim_err("bass_initial_gain input rows", n, b.rows()));
    }
    if matches!(is_hurwitz(a), Ok(true)) {
        return Ok(Matrix::zeros(b.cols(), n));
    }
    let bbt2 = (b * &b.transpose()).scale(2.0);
    let mut beta = a.frobenius() + 1.0;
    for _ in 0..BASS_ATTEMPTS {
        let shifted = &(a + &Matrix::identity(n).scale(beta));
        // (−shifted)·X + X·(−shifted)ᵀ + 2bbᵀ = 0
        let attempt = solve_lyapunov(&shifted.transpose().scale(-1.0), &bbt2)
            .ok()
            .filter(|x| is_positive_definite(x).unwrap_or(false))
            .and_then(|x| inverse(&x).ok())
            .map(|x_inv| (&b.transpose() * &x_inv).scale(-1.0));
        if let Some(k) = attempt {
            if matches!(is_hurwitz(&(a + &(b * &k))), Ok(true)) {
                return Ok(k);
            }
        }
        beta *= 2.0;
    }
    Err(Error::StabilizationFailed {
        attempts: BASS_ATTEMPTS,
    })
}

/// Stabilizing solution of the ARE by Newton–Kleinman iteration.
///
/// Each step solves `(a+bK)ᵀP + P(a+bK) + Q̄ + KᵀR̄K = 0` and updates
/// `K = −R̄⁻¹BᵀP`. Iteration stops once successive iterates agree to
/// `1e-12·(1+‖P‖_max)`, or once the step stops shrinking below `1e-8` relative
/// (the rounding floor of ill-conditioned problems). The residual bound is
/// enforced afterwards either way.
pub fn solve_are(prob: &AreProblem) -> Result<AreSolution> {
    let r_inv = inverse(&prob.r_bar)?;
    let bt = prob.b.transpose();
    let mut k = bass_initial_gain(&prob.a, &prob.b)?;
    let mut prev: Option<Matrix> = None;
    let mut last_diff = f64::INFINITY;

    for iteration in 1..=MAX_NEWTON_ITERATIONS {
        let closed = &prob.a + &(&prob.b * &k);
        let weight = (&prob.q_bar + &(&(&k.transpose() * &prob.r_bar) * &k)).symmetrized();
        let p = solve_lyapunov(&closed, &weight).map_err(|e| match e {
            Error::ResonantSpectrum => Error::IndefiniteIterate { iteration },
            other => other,
        })?;
        k = (&(&r_inv * &bt) * &p).scale(-1.0);

        if let Some(old) = prev.as_ref() {
            let diff = (&p - old).max_abs();
            let scale = 1.0 + old.max_abs();
            // Newton steps contract quadratically until they hit the rounding floor
            let floor_reached = diff <= ROUNDING_FLOOR_TOL * scale && diff >= last_diff;
            if diff <= STAGNATION_TOL * scale || floor_reached {
                return finish(prob, p, iteration);
            }
            last_diff = diff;
        }
        prev = Some(p);
    }
    Err(Error::NoConvergence {
        iterations: MAX_NEWTON_ITERATIONS,
    })
}

fn finish(prob: &AreProblem, p: Matrix, iterations: usize) -> Result<AreSolution> {
    if !is_positive_definite(&p)? {
        return Err(Error::IndefiniteIterate { iteration: iterations });
    }
    let residual_norm = are_residual(prob, &p)?.max_abs();
    let bound = residual_bound(prob, &p)?;
    if residual_norm > bound {
        return Err(Error::ResidualTooLarge {
            residual: residual_norm,
            bound,
        });
    }
    Ok(AreSolution {
        p,
        residual_norm,
        iterations,
    })
}

/// Acceptance bound for the residual: `1e-9·(1 + ‖Q̄‖ + max(‖AᵀP + PA‖,
/// ‖PBR̄⁻¹BᵀP‖))` in max-norm. The extra term is the size of the quantities
/// that cancel in the residual; it dominates only when `‖P‖ ≫ ‖Q̄‖`, where the
/// residual cannot be evaluated more accurately than that in floating point.
pub fn residual_bound(prob: &AreProblem, p: &Matrix) -> Result<f64> {
    let pb = p * &prob.b;
    let quad = &(&pb * &inverse(&prob.r_bar)?) * &pb.transpose();
    let lin = &(&prob.a.transpose() * p) + &(p * &prob.a);
    Ok(RESIDUAL_TOL * (1.0 + prob.q_bar.max_abs() + lin.max_abs().max(quad.max_abs())))
}

/// `AᵀP + PA + coeff·PBR⁻¹BᵀP + λ_q·Q`.
///
/// The corresponding strict Riccati inequality holds when `−M` is positive
/// definite.
pub fn riccati_inequality_residual(
    p: &Matrix,
    a: &Matrix,
    b: &Matrix,
    r: &Matrix,
    q: &Matrix,
    coeff: f64,
    lambda_q: f64,
) -> Result<Matrix> {
    p.require_symmetric("riccati_inequality_residual")?;
    let n = p.rows();
    if a.shape() != (n, n) || q.shape() != (n, n) || b.rows() != n || r.shape() != (b.cols(), b.cols()) {
        return Err(dim_err(
            "riccati_inequality_residual",
            format!("A, Q {n}x{n}; B {n}xm; R mxm"),
            format!(
                "A {:?}, B {:?}, R {:?}, Q {:?}",
                a.shape(),
                b.shape(),
                r.shape(),
                q.shape()
            ),
        ));
    }
    let pb = p * b;
    let quad = &(&pb * &inverse(r)?) * &pb.transpose();
    let lin = &(&a.transpose() * p) + &(p * a);
    Ok(&(&lin + &quad.scale(coeff)) + &q.scale(lambda_q))
}

/// True when `−M` is positive definite.
pub fn is_negative_definite(m: &Matrix) -> Result<bool> {
    is_positive_definite(&m.symmetrized().scale(-1.0))
}
