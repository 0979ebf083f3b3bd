use crate::design::{AgentModel, CostSpec};
use crate::error::{dim_err, Error, Result};
use crate::graph::{gamma_matrix, GammaSpectrum, NetworkSpec};
use crate::linalg::{is_hurwitz, kron, solve_lyapunov, Matrix};

/// Networked closed loop in error coordinates `e = x − 1_N ⊗ x_r`:
/// `ė = (I_N⊗A + Γ⊗BK)e` with running cost `eᵀ(Γ⊗Q + Γ²⊗KᵀRK)e`.
#[derive(Debug, Clone)]
pub struct ClosedLoop {
    pub a_cl: Matrix,
    pub q_cl: Matrix,
    /// Local state dimension `n`.
    pub n: usize,
    /// Number of followers `N`.
    pub n_followers: usize,
    a: Matrix,
    bk: Matrix,
    q: Matrix,
    ktrk: Matrix,
}

pub fn build_closed_loop(agent: &AgentModel, network: &NetworkSpec, cost: &CostSpec, k: &Matrix) -> Result<ClosedLoop> {
    let n = agent.state_dim();
    let m = agent.input_dim();
    if k.shape() != (m, n) {
        return Err(dim_err("gain K", format!("{m}x{n}"), format!("{:?}", k.shape())));
    }
    if cost.q.shape() != (n, n) || cost.r.shape() != (m, m) {
        return Err(dim_err(
            "cost weights",
            format!("Q {n}x{n}, R {m}x{m}"),
            format!("Q {:?}, R {:?}", cost.q.shape(), cost.r.shape()),
        ));
    }
    let n_followers = network.n_followers();
    let gamma = gamma_matrix(network);
    let gamma_sq = &gamma * &gamma;
    let bk = &agent.b * k;
    let ktrk = (&(&k.transpose() * &cost.r) * k).symmetrized();

    let a_cl = &kron(&Matrix::identity(n_followers), &agent.a) + &kron(&gamma, &bk);
    let q_cl = (&kron(&gamma, &cost.q) + &kron(&gamma_sq, &ktrk)).symmetrized();
    Ok(ClosedLoop {
        a_cl,
        q_cl,
        n,
        n_followers,
        a: agent.a.clone(),
        bk,
        q: cost.q.clone(),
        ktrk,
    })
}

impl ClosedLoop {
    pub fn dim(&self) -> usize {
        self.n * self.n_followers
    }

    /// `X` with `a_clᵀX + X·a_cl + q_cl = 0`, so that `J(e₀) = e₀ᵀXe₀`.
    pub fn cost_matrix(&self) -> Result<Matrix> {
        if !is_hurwitz(&self.a_cl).unwrap_or(false) {
            return Err(Error::InfiniteCost);
        }
        solve_lyapunov(&self.a_cl, &self.q_cl)
    }

    fn mode(&self, lambda: f64) -> (Matrix, Matrix) {
        let a = &self.a + &self.bk.scale(lambda);
        let w = &self.q.scale(lambda) + &self.ktrk.scale(lambda * lambda);
        (a, w.symmetrized())
    }
}

/// Infinite-horizon cost `∫ eᵀ q_cl e dt` from initial error `e0`.
pub fn exact_cost(cl: &ClosedLoop, e0: &[f64]) -> Result<f64> {
    if e0.len() != cl.dim() {
        return Err(dim_err("initial error", cl.dim(), e0.len()));
    }
    cl.cost_matrix()?.quadratic_form(e0)
}

/// Per-mode costs `J₁…J_N` after the change of coordinates `ē = (Uᵀ⊗I)e`.
/// Mode `i` evolves as `A + λᵢBK` with weight `λᵢQ + λᵢ²KᵀRK`.
pub fn mode_decompose(cl: &ClosedLoop, spectrum: &GammaSpectrum, e0: &[f64]) -> Result<Vec<f64>> {
    if e0.len() != cl.dim() {
        return Err(dim_err("initial error", cl.dim(), e0.len()));
    }
    if spectrum.n() != cl.n_followers {
        return Err(dim_err("spectrum size", cl.n_followers, spectrum.n()));
    }
    let transform = kron(&spectrum.diagonalizer.transpose(), &Matrix::identity(cl.n));
    let e_bar = transform.mul_vec(e0)?;
    spectrum
        .eigenvalues
        .iter()
        .zip(e_bar.chunks(cl.n))
        .map(|(&lambda, ei)| {
            let (a, w) = cl.mode(lambda);
            if !is_hurwitz(&a).unwrap_or(false) {
                return Err(Error::InfiniteCost);
            }
            solve_lyapunov(&a, &w)?.quadratic_form(ei)
        })
        .collect()
}
