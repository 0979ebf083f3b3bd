//! Dense real matrix kernel used by every other module.

mod decomp;
mod eigen;
mod lyapunov;
mod matrix;

pub use decomp::{cholesky, inverse, is_positive_definite, Lu, CHOLESKY_PIVOT_TOL};
pub use eigen::{sym_eigen, SymmetricEigen};
pub use lyapunov::{is_hurwitz, lyapunov_residual, solve_lyapunov};
pub use matrix::{kron, norm, Matrix, SYMMETRY_TOL};
