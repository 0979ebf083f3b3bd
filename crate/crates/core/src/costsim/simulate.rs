use std::io::{self, Write};

use crate::design::{AgentModel, CostSpec};
use crate::error::{dim_err, Error, Result};
use crate::graph::NetworkSpec;
use crate::linalg::Matrix;

/// Sampled leader-follower run in original coordinates.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Per sample: `x_r` followed by `x₁ … x_N`.
    pub states: Vec<Vec<f64>>,
    /// Accumulated cost integrand up to each sample.
    pub running_cost: Vec<f64>,
    pub n: usize,
    pub n_followers: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Stacked tracking error `x − 1_N ⊗ x_r` at sample `idx`.
    pub fn error(&self, idx: usize) -> Vec<f64> {
        let z = &self.states[idx];
        let (xr, xs) = z.split_at(self.n);
        xs.chunks(self.n)
            .flat_map(|xi| xi.iter().zip(xr).map(|(a, b)| a - b))
            .collect()
    }

    pub fn error_norm(&self, idx: usize) -> f64 {
        crate::linalg::norm(&self.error(idx))
    }

    /// `maxᵢ ‖xᵢ − x_r‖` at sample `idx`.
    pub fn max_follower_error(&self, idx: usize) -> f64 {
        self.error(idx)
            .chunks(self.n)
            .map(crate::linalg::norm)
            .fold(0.0, f64::max)
    }

    pub fn final_cost(&self) -> f64 {
        *self.running_cost.last().unwrap_or(&0.0)
    }

    /// CSV with header `t,xr_1..xr_n,x1_1..xN_n,running_cost`, one row per sample.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.n).map(|j| format!("xr_{j}")));
        for i in 1..=self.n_followers {
            header.extend((1..=self.n).map(|j| format!("x{i}_{j}")));
        }
        header.push("running_cost".into());
        writeln!(out, "{}", header.join(","))?;
        for ((t, z), c) in self.times.iter().zip(&self.states).zip(&self.running_cost) {
            write!(out, "{t:.15e}")?;
            for v in z {
                write!(out, ",{v:.15e}")?;
            }
            writeln!(out, ",{c:.15e}")?;
        }
        Ok(())
    }
}

/// Leader plus `N` followers under `uᵢ = K·Σⱼ aᵢⱼ(xᵢ − xⱼ) + K·gᵢ(xᵢ − x_r)`.
#[derive(Debug, Clone)]
pub struct Simulation {
    agent: AgentModel,
    network: NetworkSpec,
    q: Matrix,
    r: Matrix,
    k: Matrix,
}

impl Simulation {
    pub fn new(agent: &AgentModel, network: &NetworkSpec, cost: &CostSpec, k: &Matrix) -> Result<Self> {
        let (n, m) = (agent.state_dim(), agent.input_dim());
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
        Ok(Self {
            agent: agent.clone(),
            network: network.clone(),
            q: cost.q.clone(),
            r: cost.r.clone(),
            k: k.clone(),
        })
    }

    /// Uncontrolled system (`K = 0`).
    pub fn uncontrolled(agent: &AgentModel, network: &NetworkSpec, cost: &CostSpec) -> Result<Self> {
        Self::new(
            agent,
            network,
            cost,
            &Matrix::zeros(agent.input_dim(), agent.state_dim()),
        )
    }

    fn n(&self) -> usize {
        self.agent.state_dim()
    }

    pub fn state_dim(&self) -> usize {
        self.n() * (self.network.n_followers() + 1)
    }

    /// Stacked follower inputs `u = (u₁, …, u_N)` computed from neighbour
    /// differences, for joint state `z = (x_r, x₁, …, x_N)`.
    pub fn control_inputs(&self, z: &[f64]) -> Vec<f64> {
        let n = self.n();
        let nf = self.network.n_followers();
        let adj = self.network.adjacency();
        let gains = self.network.pinning_gains();
        let xr = &z[..n];
        let x = |i: usize| &z[n * (i + 1)..n * (i + 2)];
        let mut diff = vec![0.0; n];
        let mut u = Vec::with_capacity(nf * self.agent.input_dim());
        for i in 0..nf {
            let xi = x(i);
            for (d, (a, b)) in diff.iter_mut().zip(xi.iter().zip(xr)) {
                *d = gains[i] * (a - b);
            }
            for j in 0..nf {
                if adj[(i, j)] != 0.0 {
                    for (d, (a, b)) in diff.iter_mut().zip(xi.iter().zip(x(j))) {
                        *d += adj[(i, j)] * (a - b);
                    }
                }
            }
            u.extend(self.k.mul_vec(&diff).expect("gain shape checked at construction"));
        }
        u
    }

    /// Instantaneous cost: pairwise neighbour terms, pinned leader terms and
    /// input energy.
    pub fn cost_integrand(&self, z: &[f64], u: &[f64]) -> f64 {
        let n = self.n();
        let nf = self.network.n_followers();
        let m = self.agent.input_dim();
        let adj = self.network.adjacency();
        let gains = self.network.pinning_gains();
        let x = |i: usize| &z[n * (i + 1)..n * (i + 2)];
        let qform = |w: &Matrix, v: &[f64]| w.quadratic_form(v).expect("weight shape checked");
        let mut d = vec![0.0; n];
        let mut total = 0.0;
        for i in 0..nf {
            for j in 0..nf {
                if adj[(i, j)] != 0.0 {
                    for (dk, (a, b)) in d.iter_mut().zip(x(i).iter().zip(x(j))) {
                        *dk = a - b;
                    }
                    total += 0.5 * adj[(i, j)] * qform(&self.q, &d);
                }
            }
            if gains[i] != 0.0 {
                for (dk, (a, b)) in d.iter_mut().zip(x(i).iter().zip(&z[..n])) {
                    *dk = a - b;
                }
                total += gains[i] * qform(&self.q, &d);
            }
            total += qform(&self.r, &u[i * m..(i + 1) * m]);
        }
        total
    }

    /// Time derivative of `(z, running cost)`.
    fn derivative(&self, y: &[f64], dy: &mut [f64]) {
        let n = self.n();
        let m = self.agent.input_dim();
        let dim = self.state_dim();
        let z = &y[..dim];
        let u = self.control_inputs(z);
        let a = &self.agent.a;
        let b = &self.agent.b;
        for (agent, block) in z.chunks(n).enumerate() {
            for row in 0..n {
                let mut v: f64 = a.row(row).iter().zip(block).map(|(p, q)| p * q).sum();
                if agent > 0 {
                    let ui = &u[(agent - 1) * m..agent * m];
                    v += b.row(row).iter().zip(ui).map(|(p, q)| p * q).sum::<f64>();
                }
                dy[agent * n + row] = v;
            }
        }
        dy[dim] = self.cost_integrand(z, &u);
    }

    /// Classical fixed-step RK4 from `x0` (stacked followers) and `xr0`.
    ///
    /// The running cost is integrated as an extra state on the same grid.
    /// The run has `round(t_final/dt)` steps of exactly `dt`.
    pub fn run(&self, x0: &[f64], xr0: &[f64], t_final: f64, dt: f64) -> Result<Trajectory> {
        let n = self.n();
        let nf = self.network.n_followers();
        if xr0.len() != n {
            return Err(dim_err("leader initial state", n, xr0.len()));
        }
        if x0.len() != n * nf {
            return Err(dim_err("stacked follower initial state", n * nf, x0.len()));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: format!("{dt} must be positive"),
            });
        }
        if !(t_final.is_finite() && t_final >= dt) {
            return Err(Error::InvalidParameter {
                name: "t_final",
                reason: format!("{t_final} must be at least dt = {dt}"),
            });
        }
        let steps = (t_final / dt).round() as usize;
        let dim = self.state_dim();

        let mut y: Vec<f64> = xr0.iter().chain(x0).copied().chain([0.0]).collect();
        let mut times = Vec::with_capacity(steps + 1);
        let mut states = Vec::with_capacity(steps + 1);
        let mut running_cost = Vec::with_capacity(steps + 1);
        times.push(0.0);
        states.push(y[..dim].to_vec());
        running_cost.push(0.0);

        let mut stepper = Rk4::new(dim + 1);
        for step in 1..=steps {
            stepper.step(|s, d| self.derivative(s, d), &mut y, dt);
            let t = step as f64 * dt;
            if y.iter().any(|v| !v.is_finite()) {
                return Err(Error::Divergence { time: t });
            }
            times.push(t);
            states.push(y[..dim].to_vec());
            running_cost.push(y[dim]);
        }
        Ok(Trajectory {
            times,
            states,
            running_cost,
            n,
            n_followers: nf,
        })
    }
}

/// Scratch space for classical fourth-order Runge–Kutta steps.
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Self {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            tmp: vec![0.0; dim],
        }
    }

    /// Advances the autonomous system `y' = f(y)` by one step of size `h`.
    pub fn step<F: FnMut(&[f64], &mut [f64])>(&mut self, mut f: F, y: &mut [f64], h: f64) {
        let axpy = |out: &mut [f64], y: &[f64], k: &[f64], a: f64| {
            for ((o, yi), ki) in out.iter_mut().zip(y).zip(k) {
                *o = yi + a * ki;
            }
        };
        f(y, &mut self.k1);
        axpy(&mut self.tmp, y, &self.k1, 0.5 * h);
        f(&self.tmp, &mut self.k2);
        axpy(&mut self.tmp, y, &self.k2, 0.5 * h);
        f(&self.tmp, &mut self.k3);
        axpy(&mut self.tmp, y, &self.k3, h);
        f(&self.tmp, &mut self.k4);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += h / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

/// Terminal follower error within `tol`, and the stacked error at the end no
/// larger than at the midpoint.
pub fn consensus_reached(traj: &Trajectory, tol: f64) -> bool {
    let Some(last) = traj.len().checked_sub(1) else {
        return false;
    };
    let mid = last / 2;
    traj.max_follower_error(last) <= tol && traj.error_norm(last) <= traj.error_norm(mid)
}
