//! JSON problem description.

use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use subopt_core::design::{AgentModel, CaseBCoefficient, CostSpec, DesignRequest, DEFAULT_EPSILON};
use subopt_core::graph::NetworkSpec;
use subopt_core::Matrix;

pub const DEFAULT_T_FINAL: f64 = 30.0;
pub const DEFAULT_DT: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub agent: AgentConfig,
    pub network: NetworkConfig,
    pub cost: CostConfig,
    #[serde(default)]
    pub design: DesignOptions,
    #[serde(default)]
    pub simulation: SimulationOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentConfig {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
}

/// Undirected follower graph. Edges use 1-based node labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub n_followers: usize,
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
    pub pinning_gains: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostConfig {
    pub q: Vec<Vec<f64>>,
    pub r: Vec<Vec<f64>>,
    pub gamma: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignOptions {
    pub c: Option<f64>,
    pub epsilon: Option<f64>,
    pub case_b_coefficient: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationOptions {
    pub t_final: Option<f64>,
    pub dt: Option<f64>,
    pub leader_initial: Option<Vec<f64>>,
    pub follower_initial: Option<Vec<Vec<f64>>>,
}

/// Initial states checked against the agent dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialStates {
    pub leader: Vec<f64>,
    /// Followers stacked as `(x₁, …, x_N)`.
    pub followers: Vec<f64>,
}

fn to_matrix(field: &str, rows: &[Vec<f64>]) -> Result<Matrix> {
    ensure!(
        !rows.is_empty() && !rows[0].is_empty(),
        "{field}: matrix must be non-empty"
    );
    let cols = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        ensure!(
            row.len() == cols,
            "{field}: row {} has {} entries, expected {cols}",
            i + 1,
            row.len()
        );
        ensure!(
            row.iter().all(|v| v.is_finite()),
            "{field}: row {} has a non-finite entry",
            i + 1
        );
    }
    Ok(Matrix::from_rows(rows)?)
}

fn require_shape(field: &str, m: &Matrix, rows: usize, cols: usize) -> Result<()> {
    ensure!(
        m.shape() == (rows, cols),
        "{field}: expected shape {rows}x{cols}, found {}x{}",
        m.rows(),
        m.cols()
    );
    Ok(())
}

impl ProblemConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.request()?;
        Ok(cfg)
    }

    pub fn agent(&self) -> Result<AgentModel> {
        let a = to_matrix("agent.a", &self.agent.a)?;
        ensure!(
            a.is_square(),
            "agent.a: expected a square matrix, found {}x{}",
            a.rows(),
            a.cols()
        );
        let n = a.rows();
        let b = to_matrix("agent.b", &self.agent.b)?;
        ensure!(
            b.rows() == n,
            "agent.b: expected {n} rows to match agent.a, found {}",
            b.rows()
        );
        Ok(AgentModel::new(a, b)?)
    }

    pub fn network(&self) -> Result<NetworkSpec> {
        let nf = self.network.n_followers;
        ensure!(nf > 0, "network.n_followers: at least one follower is required");
        ensure!(
            self.network.pinning_gains.len() == nf,
            "network.pinning_gains: expected {nf} entries, found {}",
            self.network.pinning_gains.len()
        );
        let mut edges = Vec::with_capacity(self.network.edges.len());
        for (idx, &[i, j]) in self.network.edges.iter().enumerate() {
            ensure!(
                (1..=nf).contains(&i) && (1..=nf).contains(&j),
                "network.edges[{idx}]: ({i}, {j}) references a node outside 1..={nf}"
            );
            ensure!(i != j, "network.edges[{idx}]: self-loop at node {i}");
            edges.push((i - 1, j - 1));
        }
        NetworkSpec::from_edges(nf, &edges, self.network.pinning_gains.clone()).context("network")
    }

    pub fn cost(&self, agent: &AgentModel) -> Result<CostSpec> {
        let (n, m) = (agent.state_dim(), agent.input_dim());
        let q = to_matrix("cost.q", &self.cost.q)?;
        require_shape("cost.q", &q, n, n)?;
        let r = to_matrix("cost.r", &self.cost.r)?;
        require_shape("cost.r", &r, m, m)?;
        CostSpec::new(q, r, self.cost.gamma, self.cost.radius).context("cost")
    }

    pub fn case_b_coefficient(&self) -> Result<CaseBCoefficient> {
        match &self.design.case_b_coefficient {
            None => Ok(CaseBCoefficient::default()),
            Some(s) => match CaseBCoefficient::parse(s) {
                Some(v) => Ok(v),
                None => bail!("design.case_b_coefficient: expected \"lambda1\" or \"lambda2\", found {s:?}"),
            },
        }
    }

    /// Validated design request with the configured options applied.
    pub fn request(&self) -> Result<DesignRequest> {
        let agent = self.agent()?;
        let network = self.network()?;
        let cost = self.cost(&agent)?;
        let epsilon = self.design.epsilon.unwrap_or(DEFAULT_EPSILON);
        ensure!(
            epsilon.is_finite() && epsilon > 0.0,
            "design.epsilon: {epsilon} must be a positive real"
        );
        let mut req = DesignRequest::new(agent, network, cost)?
            .with_epsilon(epsilon)
            .with_case_b_coefficient(self.case_b_coefficient()?);
        if let Some(c) = self.design.c {
            ensure!(c.is_finite() && c > 0.0, "design.c: {c} must be a positive real");
            req = req.with_c(c);
        }
        self.simulation_grid()?;
        if self.simulation.leader_initial.is_some() || self.simulation.follower_initial.is_some() {
            self.initial_states(req.agent.state_dim())?;
        }
        Ok(req)
    }

    /// `(t_final, dt)` with defaults filled in.
    pub fn simulation_grid(&self) -> Result<(f64, f64)> {
        let t = self.simulation.t_final.unwrap_or(DEFAULT_T_FINAL);
        let dt = self.simulation.dt.unwrap_or(DEFAULT_DT);
        ensure!(
            dt.is_finite() && dt > 0.0,
            "simulation.dt: {dt} must be a positive real"
        );
        ensure!(
            t.is_finite() && t >= dt,
            "simulation.t_final: {t} must be at least dt = {dt}"
        );
        Ok((t, dt))
    }

    pub fn initial_states(&self, n: usize) -> Result<InitialStates> {
        let nf = self.network.n_followers;
        let Some(leader) = self.simulation.leader_initial.clone() else {
            bail!("simulation.leader_initial: required, expected {n} entries");
        };
        let Some(followers) = &self.simulation.follower_initial else {
            bail!("simulation.follower_initial: required, expected {nf} rows of {n} entries");
        };
        ensure!(
            leader.len() == n,
            "simulation.leader_initial: expected {n} entries, found {}",
            leader.len()
        );
        ensure!(
            followers.len() == nf,
            "simulation.follower_initial: expected {nf} rows, found {}",
            followers.len()
        );
        for (i, row) in followers.iter().enumerate() {
            ensure!(
                row.len() == n,
                "simulation.follower_initial[{i}]: expected {n} entries, found {}",
                row.len()
            );
        }
        Ok(InitialStates {
            leader,
            followers: followers.iter().flatten().copied().collect(),
        })
    }
}

/// Bundled five-follower benchmark.
pub const BENCHMARK_CONFIG: &str = include_str!("../configs/cycle5.json");

pub fn benchmark() -> ProblemConfig {
    ProblemConfig::parse(BENCHMARK_CONFIG).expect("bundled config is valid")
}
