#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subopt_core::costsim::{build_closed_loop, ClosedLoop};
use subopt_core::design::{synthesize, AgentModel, CostSpec, DesignCertificate, DesignRequest};
use subopt_core::graph::NetworkSpec;
use subopt_core::linalg::{solve_lyapunov, sym_eigen, Matrix};

pub fn rng(stream: u64) -> ChaCha8Rng {
    let seed = std::env::var("SUBOPT_SEED")
        .ok()
        .and_then(|s| s.parse::<u64>().ok())
        .unwrap_or(0x5eed);
    ChaCha8Rng::seed_from_u64(seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.random_range(-scale..scale)).collect();
    Matrix::new(rows, cols, data).unwrap()
}

pub fn random_symmetric(rng: &mut impl Rng, n: usize) -> Matrix {
    random_matrix(rng, n, n, 1.0).symmetrized()
}

/// `M − (‖M‖_F + margin)·I`, Hurwitz with decay rate at least `margin`.
pub fn random_hurwitz(rng: &mut impl Rng, n: usize, margin: f64) -> Matrix {
    let m = random_matrix(rng, n, n, 1.0);
    &m - &Matrix::identity(n).scale(m.frobenius() + margin)
}

pub fn random_network(rng: &mut impl Rng, n: usize) -> NetworkSpec {
    let mut edges = Vec::new();
    for i in 1..n {
        edges.push((rng.random_range(0..i), i));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(0.3) && !edges.contains(&(i, j)) {
                edges.push((i, j));
            }
        }
    }
    let mut gains: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_bool(0.5) {
                rng.random_range(0.1..2.0)
            } else {
                0.0
            }
        })
        .collect();
    let pinned = rng.random_range(0..n);
    gains[pinned] = rng.random_range(0.1..2.0);
    NetworkSpec::from_edges(n, &edges, gains).unwrap()
}

pub struct Instance {
    pub request: DesignRequest,
    pub cert: DesignCertificate,
    pub closed_loop: ClosedLoop,
}

/// Designed random instance whose closed loop has a Lyapunov decay time
/// (λ_max of the solution with unit weight) of at most `max_decay_time`.
pub fn random_designed_instance(
    rng: &mut impl Rng,
    max_n: usize,
    max_followers: usize,
    max_decay_time: f64,
) -> Instance {
    loop {
        let n = rng.random_range(1..=max_n);
        let m = rng.random_range(1..=n);
        let followers = rng.random_range(1..=max_followers);
        let agent = AgentModel::new(random_matrix(rng, n, n, 1.0), random_matrix(rng, n, m, 1.0)).unwrap();
        let network = random_network(rng, followers);
        let qh = random_matrix(rng, n, n, 1.0);
        let q = (&(&qh.transpose() * &qh) + &Matrix::identity(n).scale(0.1)).symmetrized();
        let r = Matrix::identity(m).scale(rng.random_range(0.5..2.0));
        let cost = CostSpec::new(q, r, 20.0, 0.5).unwrap();
        let request = DesignRequest::new(agent, network, cost).unwrap();
        let Ok(cert) = synthesize(&request) else { continue };
        let closed_loop = build_closed_loop(&request.agent, &request.network, &request.cost, &cert.k).unwrap();
        let Ok(x) = solve_lyapunov(&closed_loop.a_cl, &Matrix::identity(closed_loop.dim())) else {
            continue;
        };
        let eig = sym_eigen(&x).unwrap();
        if eig.min() > 0.0 && eig.max() <= max_decay_time {
            return Instance {
                request,
                cert,
                closed_loop,
            };
        }
    }
}

/// `∫₀^T e^{Aᵀt} Q e^{At} dt` by RK4 on `Ẏ = AᵀY + YA`, `Y(0) = Q`.
pub fn lyapunov_quadrature(a: &Matrix, q: &Matrix, dt: f64, horizon: f64) -> Matrix {
    let n = a.rows();
    let at = a.transpose();
    let rhs = |y: &Matrix| &(&at * y) + &(y * a);
    let mut y = q.clone();
    let mut z = Matrix::zeros(n, n);
    let steps = (horizon / dt).round() as usize;
    for _ in 0..steps {
        let k1 = rhs(&y);
        let k2 = rhs(&(&y + &k1.scale(dt / 2.0)));
        let k3 = rhs(&(&y + &k2.scale(dt / 2.0)));
        let k4 = rhs(&(&y + &k3.scale(dt)));
        let zk1 = y.clone();
        let zk2 = &y + &k1.scale(dt / 2.0);
        let zk3 = &y + &k2.scale(dt / 2.0);
        let zk4 = &y + &k3.scale(dt);
        z = &z + &(&(&(&zk1 + &zk2.scale(2.0)) + &zk3.scale(2.0)) + &zk4).scale(dt / 6.0);
        y = &y + &(&(&(&k1 + &k2.scale(2.0)) + &k3.scale(2.0)) + &k4).scale(dt / 6.0);
    }
    z
}

/// Smallest singular value of `[B, AB, A²B]`.
pub fn controllability_margin(a: &Matrix, b: &Matrix) -> f64 {
    let n = a.rows();
    let m = b.cols();
    let mut ctrb = Matrix::zeros(n, n * m);
    let mut block = b.clone();
    for k in 0..n {
        ctrb.set_block(0, k * m, &block);
        block = a * &block;
    }
    sym_eigen(&(&ctrb * &ctrb.transpose()).symmetrized())
        .unwrap()
        .min()
        .max(0.0)
        .sqrt()
}

/// Smallest eigenvalue of `upper − lower`; nonnegative iff `lower ⪯ upper`.
pub fn loewner_min(lower: &Matrix, upper: &Matrix) -> f64 {
    sym_eigen(&(upper - lower).symmetrized()).unwrap().min()
}
