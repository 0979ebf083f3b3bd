//! Continuous Lyapunov equations and the Lyapunov stability test.

use super::decomp::{is_positive_definite, Lu};
use super::matrix::{kron, Matrix};
use crate::error::{dim_err, Error, Result};

const REFINEMENT_STEPS: usize = 3;

/// Solves `aᵀX + Xa + q = 0` for symmetric `X`.
///
/// The equation is vectorized as `(I⊗aᵀ + aᵀ⊗I)·vec(X) = −vec(q)` and solved
/// with partially pivoted LU. Cost is O(n⁶), fine for n up to a few dozen.
pub fn solve_lyapunov(a: &Matrix, q: &Matrix) -> Result<Matrix> {
    a.require_square("solve_lyapunov")?;
    q.require_symmetric("solve_lyapunov")?;
    let n = a.rows();
    if q.rows() != n {
        return Err(dim_err(
            "solve_lyapunov weight",
            format!("{n}x{n}"),
            format!("{}x{}", q.rows(), q.cols()),
        ));
    }

    let at = a.transpose();
    let eye = Matrix::identity(n);
    let op = &kron(&eye, &at) + &kron(&at, &eye);
    let lu = match Lu::factor(&op) {
        Ok(lu) => lu,
        Err(Error::Singular { .. }) => return Err(Error::ResonantSpectrum),
        Err(e) => return Err(e),
    };

    // column-stacked vec(q)
    let mut rhs = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            rhs[j * n + i] = -q[(i, j)];
        }
    }
    let mut sol = lu.solve_vec(&rhs)?;

    // iterative refinement against the unfactored operator
    let residual_of = |x: &[f64]| -> Vec<f64> {
        let ox = op.mul_vec(x).expect("square operator");
        rhs.iter().zip(ox).map(|(b, v)| b - v).collect()
    };
    let mut res = residual_of(&sol);
    let mut res_norm = res.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    for _ in 0..REFINEMENT_STEPS {
        if res_norm == 0.0 {
            break;
        }
        let delta = lu.solve_vec(&res)?;
        let candidate: Vec<f64> = sol.iter().zip(&delta).map(|(x, d)| x + d).collect();
        let cand_res = residual_of(&candidate);
        let cand_norm = cand_res.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if cand_norm >= res_norm {
            break;
        }
        sol = candidate;
        res = cand_res;
        res_norm = cand_norm;
    }

    let mut x = Matrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            x[(i, j)] = sol[j * n + i];
        }
    }
    Ok(x.symmetrized())
}

/// `aᵀX + Xa + q`, used to check Lyapunov solutions.
pub fn lyapunov_residual(a: &Matrix, x: &Matrix, q: &Matrix) -> Matrix {
    let at = a.transpose();
    &(&(&at * x) + &(x * a)) + q
}

/// Lyapunov stability test: `a` is Hurwitz iff `aᵀX + Xa + I = 0` has a
/// positive definite solution.
///
/// A nonnegative trace already rules out stability. A singular Lyapunov
/// operator on the remaining inputs is reported as [`Error::Indeterminate`].
pub fn is_hurwitz(a: &Matrix) -> Result<bool> {
    a.require_square("is_hurwitz")?;
    if !a.is_finite() {
        return Err(Error::Indeterminate("non-finite entries".into()));
    }
    if a.trace() >= 0.0 {
        return Ok(false);
    }
    match solve_lyapunov(a, &Matrix::identity(a.rows())) {
        Ok(x) => is_positive_definite(&x),
        Err(Error::ResonantSpectrum) => Err(Error::Indeterminate(
            "resonant spectrum: Lyapunov operator is singular".into(),
        )),
        Err(e) => Err(e),
    }
}
