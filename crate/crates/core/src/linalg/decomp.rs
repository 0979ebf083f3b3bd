//! LU and Cholesky factorizations.

use super::matrix::Matrix;
use crate::error::{dim_err, Error, Result};

/// Pivots below this fraction of the largest entry mark the matrix singular.
const LU_PIVOT_TOL: f64 = 1e-13;

/// Relative pivot floor for the Cholesky definiteness test.
pub const CHOLESKY_PIVOT_TOL: f64 = 1e-12;

/// LU factorization with partial (row) pivoting, `P·A = L·U` packed into one matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn factor(a: &Matrix) -> Result<Self> {
        a.require_square("LU factorization")?;
        let n = a.rows();
        let scale = a.max_abs();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;

        for k in 0..n {
            let (p, pmax) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].abs()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= LU_PIVOT_TOL * scale || pmax == 0.0 {
                return Err(Error::Singular {
                    context: "LU factorization",
                });
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != 0.0 {
                    for j in (k + 1)..n {
                        lu[(i, j)] -= f * lu[(k, j)];
                    }
                }
            }
        }
        Ok(Self { lu, perm, sign })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    #[allow(clippy::needless_range_loop)]
    pub fn solve_vec(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if b.len() != n {
            return Err(dim_err("LU solve", n, b.len()));
        }
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        Ok(x)
    }

    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        if b.rows() != self.dim() {
            return Err(dim_err("LU solve", self.dim(), b.rows()));
        }
        let mut out = Matrix::zeros(b.rows(), b.cols());
        for j in 0..b.cols() {
            let x = self.solve_vec(&b.col(j))?;
            for (i, v) in x.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }

    pub fn determinant(&self) -> f64 {
        self.sign * self.lu.diagonal().iter().product::<f64>()
    }
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    Lu::factor(a)?.solve(&Matrix::identity(a.rows()))
}

/// Lower-triangular Cholesky factor, or `None` when some pivot falls below
/// `1e-12·(1+‖m‖_max)`.
pub fn cholesky(m: &Matrix) -> Result<Option<Matrix>> {
    m.require_symmetric("Cholesky factorization")?;
    let n = m.rows();
    let floor = CHOLESKY_PIVOT_TOL * (1.0 + m.max_abs());
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d.is_nan() || d <= floor {
            return Ok(None);
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(Some(l))
}

/// True iff the Cholesky factorization succeeds with every pivot above
/// `1e-12·(1+‖m‖_max)`.
pub fn is_positive_definite(m: &Matrix) -> Result<bool> {
    Ok(cholesky(m)?.is_some())
}
