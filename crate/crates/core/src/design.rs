//! Gain synthesis and suboptimality certificates.
//!
//! The design picks a coupling scalar `c ∈ (0, 2/λ_N)`, solves one `n×n`
//! Riccati equation parameterized by the extreme eigenvalues of `Γ = L + G`,
//! and sets the local gain `K = −c·R⁻¹BᵀP`. Every follower runs
//! `uᵢ = K·Σⱼ aᵢⱼ(xᵢ − xⱼ) + K·gᵢ(xᵢ − x_r)`.

use std::fmt;

use crate::error::{dim_err, Error, Result};
use crate::graph::{gamma_spectrum, GammaSpectrum, NetworkSpec};
use crate::linalg::{inverse, is_hurwitz, is_positive_definite, norm, sym_eigen, Matrix};
use crate::riccati::{
    bass_initial_gain, is_negative_definite, riccati_coefficient, solve_are, AreProblem, AreSolution,
};

pub const DEFAULT_EPSILON: f64 = 0.01;

/// Shared dynamics `ẋ = Ax + Bu` of the followers; the leader runs `ẋ_r = Ax_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentModel {
    pub a: Matrix,
    pub b: Matrix,
}

impl AgentModel {
    pub fn new(a: Matrix, b: Matrix) -> Result<Self> {
        a.require_square("agent drift A")?;
        if b.rows() != a.rows() {
            return Err(dim_err("agent input map B rows", a.rows(), b.rows()));
        }
        Ok(Self { a, b })
    }

    pub fn state_dim(&self) -> usize {
        self.a.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.cols()
    }
}

/// Cost weights, tolerance `γ` and requested initial-error radius `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostSpec {
    pub q: Matrix,
    pub r: Matrix,
    pub gamma: f64,
    pub radius: f64,
}

impl CostSpec {
    pub fn new(q: Matrix, r: Matrix, gamma: f64, radius: f64) -> Result<Self> {
        q.require_symmetric("state weight Q")?;
        r.require_symmetric("input weight R")?;
        if sym_eigen(&q)?.min() < -1e-10 * (1.0 + q.max_abs()) {
            return Err(Error::InvalidParameter {
                name: "Q",
                reason: "must be positive semidefinite".into(),
            });
        }
        if !is_positive_definite(&r)? {
            return Err(Error::NotPositiveDefinite {
                context: "input weight R",
            });
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("{gamma} must be a positive real"),
            });
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter {
                name: "radius",
                reason: format!("{radius} must be a positive real"),
            });
        }
        Ok(Self { q, r, gamma, radius })
    }
}

/// Which coefficient the case (b) Riccati equation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CaseBCoefficient {
    /// `c²λ₁² − 2cλ₁`.
    #[default]
    LinearLambda1,
    /// `c²λ₁² − 2cλ₂`, with the second-smallest eigenvalue in the linear term.
    LinearLambda2,
}

impl CaseBCoefficient {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::LinearLambda1 => "lambda1",
            Self::LinearLambda2 => "lambda2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "lambda1" => Some(Self::LinearLambda1),
            "lambda2" => Some(Self::LinearLambda2),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// `2/(λ₁+λ_N) ≤ c < 2/λ_N`
    CaseA,
    /// `0 < c < 2/(λ₁+λ_N)`
    CaseB,
}

impl CaseTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::CaseA => "case_a",
            Self::CaseB => "case_b",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "case_a" => Some(Self::CaseA),
            "case_b" => Some(Self::CaseB),
            _ => None,
        }
    }
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct DesignRequest {
    pub agent: AgentModel,
    pub network: NetworkSpec,
    pub cost: CostSpec,
    pub c_override: Option<f64>,
    pub epsilon: f64,
    pub case_b_coefficient: CaseBCoefficient,
}

impl DesignRequest {
    pub fn new(agent: AgentModel, network: NetworkSpec, cost: CostSpec) -> Result<Self> {
        let n = agent.state_dim();
        let m = agent.input_dim();
        if cost.q.shape() != (n, n) {
            return Err(dim_err("cost Q", format!("{n}x{n}"), format!("{:?}", cost.q.shape())));
        }
        if cost.r.shape() != (m, m) {
            return Err(dim_err("cost R", format!("{m}x{m}"), format!("{:?}", cost.r.shape())));
        }
        Ok(Self {
            agent,
            network,
            cost,
            c_override: None,
            epsilon: DEFAULT_EPSILON,
            case_b_coefficient: CaseBCoefficient::default(),
        })
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c_override = Some(c);
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_case_b_coefficient(mut self, coeff: CaseBCoefficient) -> Self {
        self.case_b_coefficient = coeff;
        self
    }
}

/// Output of [`synthesize`].
#[derive(Debug, Clone, PartialEq)]
pub struct DesignCertificate {
    pub c: f64,
    pub epsilon: f64,
    pub case_tag: CaseTag,
    pub p: Matrix,
    pub k: Matrix,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub p_max_eigenvalue: f64,
    /// `r* = sqrt(γ / λ_max(P))`
    pub admissible_radius: f64,
    pub requested_radius_ok: bool,
}

/// Lower endpoint `2/(λ₁+λ_N)` of the case (a) interval.
pub fn default_c(spectrum: &GammaSpectrum) -> f64 {
    2.0 / (spectrum.lambda_min() + spectrum.lambda_max())
}

pub fn classify_c(c: f64, spectrum: &GammaSpectrum) -> Result<CaseTag> {
    let upper = 2.0 / spectrum.lambda_max();
    if !(c > 0.0 && c < upper) {
        return Err(Error::InadmissibleCoupling { c, upper });
    }
    Ok(if c >= default_c(spectrum) {
        CaseTag::CaseA
    } else {
        CaseTag::CaseB
    })
}

/// Solves `AᵀP + PA + (c²λ² − 2cλ)PBR⁻¹BᵀP + λ_q·Q + εI = 0` for the
/// stabilizing `P`.
pub fn parameterized_riccati(
    agent: &AgentModel,
    cost: &CostSpec,
    c: f64,
    coefficient_lambda: f64,
    lambda_q: f64,
    epsilon: f64,
) -> Result<AreSolution> {
    let coeff = riccati_coefficient(c, coefficient_lambda);
    let prob = AreProblem::parameterized(&agent.a, &agent.b, &cost.q, &cost.r, coeff, lambda_q, epsilon)?;
    solve_are(&prob)
}

/// Coefficient of `PBR⁻¹BᵀP` in the Riccati equation for `case`: built from
/// `λ_N` in case (a) and from `λ₁` (or `λ₁, λ₂` under the alternate reading)
/// in case (b).
pub fn case_coefficient(case: CaseTag, c: f64, spectrum: &GammaSpectrum, reading: CaseBCoefficient) -> f64 {
    let l1 = spectrum.lambda_min();
    match (case, reading) {
        (CaseTag::CaseA, _) => riccati_coefficient(c, spectrum.lambda_max()),
        (CaseTag::CaseB, CaseBCoefficient::LinearLambda1) => riccati_coefficient(c, l1),
        (CaseTag::CaseB, CaseBCoefficient::LinearLambda2) => c * c * l1 * l1 - 2.0 * c * spectrum.lambda_second(),
    }
}

/// `K = −c·R⁻¹BᵀP`.
pub fn local_gain(c: f64, r: &Matrix, b: &Matrix, p: &Matrix) -> Result<Matrix> {
    Ok((&(&inverse(r)? * &b.transpose()) * p).scale(-c))
}

pub fn synthesize(req: &DesignRequest) -> Result<DesignCertificate> {
    if !(req.epsilon.is_finite() && req.epsilon > 0.0) {
        return Err(Error::InvalidParameter {
            name: "epsilon",
            reason: format!("{} must be a positive real", req.epsilon),
        });
    }
    bass_initial_gain(&req.agent.a, &req.agent.b)?;
    let spectrum = gamma_spectrum(&req.network)?;
    let c = req.c_override.unwrap_or_else(|| default_c(&spectrum));
    let case_tag = classify_c(c, &spectrum)?;
    let coeff = case_coefficient(case_tag, c, &spectrum, req.case_b_coefficient);

    let prob = AreProblem::parameterized(
        &req.agent.a,
        &req.agent.b,
        &req.cost.q,
        &req.cost.r,
        coeff,
        spectrum.lambda_max(),
        req.epsilon,
    )?;
    let sol = solve_are(&prob)?;
    let k = local_gain(c, &req.cost.r, &req.agent.b, &sol.p)?;
    let p_max_eigenvalue = sym_eigen(&sol.p)?.max();
    let admissible_radius = (req.cost.gamma / p_max_eigenvalue).sqrt();

    Ok(DesignCertificate {
        c,
        epsilon: req.epsilon,
        case_tag,
        p: sol.p,
        k,
        lambda_min: spectrum.lambda_min(),
        lambda_max: spectrum.lambda_max(),
        p_max_eigenvalue,
        admissible_radius,
        requested_radius_ok: req.cost.radius < admissible_radius,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeCheck {
    pub lambda: f64,
    pub hurwitz: bool,
    pub inequality_negative_definite: bool,
}

impl ModeCheck {
    pub fn passes(&self) -> bool {
        self.hurwitz && self.inequality_negative_definite
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub modes: Vec<ModeCheck>,
    /// `P < (γ/r²)·I`
    pub radius_condition: bool,
}

impl VerificationReport {
    pub fn modes_pass(&self) -> bool {
        self.modes.iter().all(ModeCheck::passes)
    }

    pub fn passes(&self) -> bool {
        self.modes_pass() && self.radius_condition
    }
}

/// Per-mode check with `Pᵢ = P`: `A + λᵢBK` Hurwitz and
/// `(A+λᵢBK)ᵀP + P(A+λᵢBK) + λᵢQ + λᵢ²KᵀRK ≺ 0`, plus `P ≺ (γ/r²)I`.
pub fn verify_certificate(cert: &DesignCertificate, req: &DesignRequest) -> Result<VerificationReport> {
    let n = req.agent.state_dim();
    let m = req.agent.input_dim();
    if cert.p.shape() != (n, n) {
        return Err(dim_err(
            "certificate P",
            format!("{n}x{n}"),
            format!("{:?}", cert.p.shape()),
        ));
    }
    if cert.k.shape() != (m, n) {
        return Err(dim_err(
            "certificate K",
            format!("{m}x{n}"),
            format!("{:?}", cert.k.shape()),
        ));
    }
    let spectrum = gamma_spectrum(&req.network)?;
    let (a, b, q, r) = (&req.agent.a, &req.agent.b, &req.cost.q, &req.cost.r);
    let bk = b * &cert.k;
    let ktrk = &(&cert.k.transpose() * r) * &cert.k;
    let p = cert.p.symmetrized();

    let modes = spectrum
        .eigenvalues
        .iter()
        .map(|&lambda| -> Result<ModeCheck> {
            let closed = a + &bk.scale(lambda);
            let lhs =
                &(&(&closed.transpose() * &p) + &(&p * &closed)) + &(&q.scale(lambda) + &ktrk.scale(lambda * lambda));
            Ok(ModeCheck {
                lambda,
                hurwitz: is_hurwitz(&closed).unwrap_or(false),
                inequality_negative_definite: is_negative_definite(&lhs)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let bound = req.cost.gamma / (req.cost.radius * req.cost.radius);
    let radius_condition = is_positive_definite(&(&Matrix::identity(n).scale(bound) - &p))?;
    Ok(VerificationReport {
        modes,
        radius_condition,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialConditionReport {
    /// `Σᵢ (xᵢ₀ − x_r0)ᵀ P (xᵢ₀ − x_r0)`
    pub quadratic_form: f64,
    pub gamma: f64,
    pub error_norm: f64,
    pub admissible_radius: f64,
}

impl InitialConditionReport {
    pub fn within_bound(&self) -> bool {
        self.quadratic_form < self.gamma
    }

    pub fn within_ball(&self) -> bool {
        self.error_norm < self.admissible_radius
    }
}

/// Evaluates the initial-state condition for stacked follower states `x0`
/// (length `n·N`) and leader state `xr0` (length `n`).
pub fn check_initial_condition(
    cert: &DesignCertificate,
    x0: &[f64],
    xr0: &[f64],
    gamma: f64,
) -> Result<InitialConditionReport> {
    let n = cert.p.rows();
    if xr0.len() != n {
        return Err(dim_err("leader initial state", n, xr0.len()));
    }
    if x0.is_empty() || !x0.len().is_multiple_of(n) {
        return Err(dim_err(
            "stacked follower initial state",
            format!("multiple of {n}"),
            x0.len(),
        ));
    }
    let e0: Vec<f64> = x0.iter().zip(xr0.iter().cycle()).map(|(x, r)| x - r).collect();
    let quadratic_form = e0.chunks(n).map(|ei| cert.p.quadratic_form(ei)).sum::<Result<f64>>()?;
    Ok(InitialConditionReport {
        quadratic_form,
        gamma,
        error_norm: norm(&e0),
        admissible_radius: cert.admissible_radius,
    })
}
