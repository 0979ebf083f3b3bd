//! Five-follower benchmark: harmonic-oscillator agents on a cycle, with the
//! leader pinned to follower 2.

use crate::design::{AgentModel, CostSpec, DesignRequest};
use crate::error::Result;
use crate::graph::NetworkSpec;
use crate::linalg::Matrix;

pub const GAMMA: f64 = 20.0;
/// Regularization that reproduces the reference certificate.
pub const EPSILON: f64 = 0.001;
/// Requested radius, just inside the admissible bound.
pub const RADIUS: f64 = 1.1;

pub const LEADER_INITIAL: [f64; 2] = [0.3, -0.5];
pub const FOLLOWER_INITIAL: [[f64; 2]; 5] = [[0.7, -0.2], [0.3, -0.6], [0.2, 0.3], [-0.1, -0.7], [0.2, -0.6]];

/// Reference values the benchmark design must reproduce to 1e-3.
pub mod reference {
    pub const LAMBDA_MIN: f64 = 0.1392;
    pub const LAMBDA_MAX: f64 = 4.1149;
    pub const C: f64 = 0.4701;
    pub const P: [[f64; 2]; 2] = [[13.2553, 3.3886], [3.3886, 9.2760]];
    /// Listed as positive magnitudes; the designed gain is the negation.
    pub const K_MAGNITUDE: [f64; 2] = [1.5931, 4.3610];
    pub const P_MAX_EIGENVALUE: f64 = 15.1952;
    pub const RADIUS_BOUND: f64 = 1.1473;
}

pub fn agent() -> AgentModel {
    AgentModel::new(
        Matrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]).expect("static shape"),
        Matrix::column(&[0.0, 1.0]),
    )
    .expect("static shape")
}

pub fn network() -> NetworkSpec {
    NetworkSpec::cycle(5, vec![0.0, 1.0, 0.0, 0.0, 0.0]).expect("cycle is connected and pinned")
}

pub fn cost() -> CostSpec {
    CostSpec::new(Matrix::from_diag(&[2.0, 1.0]), Matrix::identity(1), GAMMA, RADIUS).expect("valid weights")
}

pub fn request() -> Result<DesignRequest> {
    Ok(DesignRequest::new(agent(), network(), cost())?.with_epsilon(EPSILON))
}

pub fn follower_initial_stacked() -> Vec<f64> {
    FOLLOWER_INITIAL.iter().flatten().copied().collect()
}
