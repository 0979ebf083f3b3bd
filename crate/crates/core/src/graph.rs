//! Follower communication graph and leader pinning.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::linalg::{is_positive_definite, sym_eigen, Matrix};

/// Undirected, unweighted follower graph plus leader pinning gains.
///
/// Construction enforces a simple symmetric 0/1 adjacency, at least one
/// strictly positive pinning gain, and connectivity.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    adjacency: Matrix,
    pinning_gains: Vec<f64>,
}

impl NetworkSpec {
    pub fn new(adjacency: Matrix, pinning_gains: Vec<f64>) -> Result<Self> {
        let n = adjacency.rows();
        if !adjacency.is_square() {
            return Err(Error::InvalidNetwork(format!(
                "adjacency must be square, got {}x{}",
                adjacency.rows(),
                adjacency.cols()
            )));
        }
        if pinning_gains.len() != n {
            return Err(Error::InvalidNetwork(format!(
                "expected {n} pinning gains, got {}",
                pinning_gains.len()
            )));
        }
        for i in 0..n {
            if adjacency[(i, i)] != 0.0 {
                return Err(Error::InvalidNetwork(format!("self-loop at node {}", i + 1)));
            }
            for j in 0..n {
                let a = adjacency[(i, j)];
                if a != 0.0 && a != 1.0 {
                    return Err(Error::InvalidNetwork(format!(
                        "adjacency entry ({}, {}) = {a} is not 0 or 1",
                        i + 1,
                        j + 1
                    )));
                }
                if a != adjacency[(j, i)] {
                    return Err(Error::InvalidNetwork(format!(
                        "adjacency not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        if let Some(g) = pinning_gains.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return Err(Error::InvalidNetwork(format!(
                "pinning gain {g} is not a nonnegative real"
            )));
        }
        if !pinning_gains.iter().any(|g| *g > 0.0) {
            return Err(Error::InvalidNetwork(
                "no follower is pinned to the leader (all pinning gains are zero)".into(),
            ));
        }
        if let Some(unreachable) = first_unreachable(&adjacency) {
            return Err(Error::Disconnected {
                unreachable: unreachable + 1,
            });
        }
        Ok(Self {
            adjacency,
            pinning_gains,
        })
    }

    /// Builds a network from 0-based undirected edges.
    pub fn from_edges(n_followers: usize, edges: &[(usize, usize)], pinning_gains: Vec<f64>) -> Result<Self> {
        if n_followers == 0 {
            return Err(Error::InvalidNetwork("at least one follower is required".into()));
        }
        let mut adjacency = Matrix::zeros(n_followers, n_followers);
        for &(i, j) in edges {
            if i >= n_followers || j >= n_followers {
                return Err(Error::InvalidNetwork(format!(
                    "edge ({}, {}) references a node outside 1..={n_followers}",
                    i + 1,
                    j + 1
                )));
            }
            if i == j {
                return Err(Error::InvalidNetwork(format!("self-loop at node {}", i + 1)));
            }
            adjacency[(i, j)] = 1.0;
            adjacency[(j, i)] = 1.0;
        }
        Self::new(adjacency, pinning_gains)
    }

    /// Cycle `1 - 2 - … - N - 1`.
    pub fn cycle(n_followers: usize, pinning_gains: Vec<f64>) -> Result<Self> {
        let edges: Vec<_> = match n_followers {
            0 | 1 => Vec::new(),
            2 => vec![(0, 1)],
            n => (0..n).map(|i| (i, (i + 1) % n)).collect(),
        };
        Self::from_edges(n_followers, &edges, pinning_gains)
    }

    pub fn n_followers(&self) -> usize {
        self.adjacency.rows()
    }

    pub fn adjacency(&self) -> &Matrix {
        &self.adjacency
    }

    pub fn pinning_gains(&self) -> &[f64] {
        &self.pinning_gains
    }

    /// 0-based edge list with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n_followers();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.adjacency[(i, j)] != 0.0 {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

fn first_unreachable(adjacency: &Matrix) -> Option<usize> {
    let n = adjacency.rows();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
        for j in 0..n {
            if adjacency[(i, j)] != 0.0 && !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    seen.iter().position(|s| !s)
}

/// `L = D − 𝒜`.
pub fn laplacian(spec: &NetworkSpec) -> Matrix {
    let a = spec.adjacency();
    let n = a.rows();
    let mut l = a.scale(-1.0);
    for i in 0..n {
        l[(i, i)] = a.row(i).iter().sum();
    }
    l
}

/// `Γ = L + G`.
pub fn gamma_matrix(spec: &NetworkSpec) -> Matrix {
    let mut gamma = laplacian(spec);
    for (i, g) in spec.pinning_gains().iter().enumerate() {
        gamma[(i, i)] += g;
    }
    gamma
}

/// Eigenstructure of `Γ = L + G`.
#[derive(Debug, Clone)]
pub struct GammaSpectrum {
    pub gamma: Matrix,
    /// Ascending `λ₁ … λ_N`.
    pub eigenvalues: Vec<f64>,
    /// Orthogonal `U` with `UᵀΓU = diag(λ)`.
    pub diagonalizer: Matrix,
}

impl GammaSpectrum {
    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_max(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    /// Second-smallest eigenvalue, or `λ₁` for a single follower.
    pub fn lambda_second(&self) -> f64 {
        *self.eigenvalues.get(1).unwrap_or(&self.eigenvalues[0])
    }

    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Spectrum built directly from eigenvalues with `U = I`; used when only
    /// the scalar design parameters matter.
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Result<Self> {
        if eigenvalues.is_empty() || eigenvalues.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::InvalidParameter {
                name: "eigenvalues",
                reason: "spectrum must be nonempty and strictly positive".into(),
            });
        }
        eigenvalues.sort_by(f64::total_cmp);
        Ok(Self {
            gamma: Matrix::from_diag(&eigenvalues),
            diagonalizer: Matrix::identity(eigenvalues.len()),
            eigenvalues,
        })
    }
}

pub fn gamma_spectrum(spec: &NetworkSpec) -> Result<GammaSpectrum> {
    let gamma = gamma_matrix(spec);
    if !is_positive_definite(&gamma)? {
        return Err(Error::Internal(
            "L + G failed the positive definiteness check for a connected, pinned graph".into(),
        ));
    }
    let eig = sym_eigen(&gamma)?;
    if eig.min() <= 0.0 {
        return Err(Error::Internal(format!(
            "smallest eigenvalue of L + G is {} <= 0",
            eig.min()
        )));
    }
    Ok(GammaSpectrum {
        gamma,
        eigenvalues: eig.eigenvalues,
        diagonalizer: eig.eigenvectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_node_path_laplacian() {
        let net = NetworkSpec::from_edges(2, &[(0, 1)], vec![1.0, 0.0]).unwrap();
        assert_eq!(laplacian(&net).to_rows(), vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);
    }

    #[test]
    fn five_cycle_laplacian_matches_circulant() {
        let net = NetworkSpec::cycle(5, vec![0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        let expected = Matrix::from_rows(&[
            [2.0, -1.0, 0.0, 0.0, -1.0],
            [-1.0, 2.0, -1.0, 0.0, 0.0],
            [0.0, -1.0, 2.0, -1.0, 0.0],
            [0.0, 0.0, -1.0, 2.0, -1.0],
            [-1.0, 0.0, 0.0, -1.0, 2.0],
        ])
        .unwrap();
        assert_eq!(laplacian(&net), expected);
        assert!(!is_positive_definite(&laplacian(&net)).unwrap());
        assert!(is_positive_definite(&gamma_matrix(&net)).unwrap());
    }

    #[test]
    fn single_pinned_follower() {
        let net = NetworkSpec::new(Matrix::zeros(1, 1), vec![3.0]).unwrap();
        let spec = gamma_spectrum(&net).unwrap();
        assert_eq!(spec.gamma.to_rows(), vec![vec![3.0]]);
        assert_eq!(spec.lambda_min(), 3.0);
        assert_eq!(spec.lambda_max(), 3.0);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(
            NetworkSpec::from_edges(3, &[(0, 1)], vec![1.0, 0.0, 0.0]),
            Err(Error::Disconnected { unreachable: 3 })
        ));
        assert!(matches!(
            NetworkSpec::from_edges(2, &[(0, 1)], vec![0.0, 0.0]),
            Err(Error::InvalidNetwork(_))
        ));
        assert!(NetworkSpec::from_edges(2, &[(0, 1)], vec![-1.0, 1.0]).is_err());
        assert!(NetworkSpec::from_edges(2, &[(0, 2)], vec![1.0, 1.0]).is_err());
        assert!(NetworkSpec::from_edges(2, &[(1, 1)], vec![1.0, 1.0]).is_err());
        let weighted = Matrix::from_rows(&[[0.0, 2.0], [2.0, 0.0]]).unwrap();
        assert!(NetworkSpec::new(weighted, vec![1.0, 0.0]).is_err());
        let directed = Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        assert!(NetworkSpec::new(directed, vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn edges_round_trip() {
        let net = NetworkSpec::cycle(4, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(net.edges(), vec![(0, 1), (0, 3), (1, 2), (2, 3)]);
    }
}
