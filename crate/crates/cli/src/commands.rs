//! Subcommand bodies. Each returns the process exit code; hard errors
//! (unreadable input, invalid config, solver failure) propagate as `Err`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use subopt_core::costsim::{build_closed_loop, consensus_reached, initial_error, sample_sphere, Simulation};
use subopt_core::design::{
    synthesize, verify_certificate, CaseBCoefficient, CaseTag, DesignCertificate, DesignRequest,
};
use subopt_core::example::reference;
use subopt_core::{Error, Matrix};

use crate::certificate::CertificateDoc;
use crate::config::{benchmark, ProblemConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;

pub const SEED_VAR: &str = "SUBOPT_SEED";
const DEFAULT_SEED: u64 = 0x5eed;
/// Tolerance on every reproduced quantity.
pub const REPRODUCTION_TOL: f64 = 1e-3;

/// Seed from `SUBOPT_SEED`, or a fixed default.
pub fn seed_from_env() -> Result<u64> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s
            .trim()
            .parse()
            .with_context(|| format!("{SEED_VAR}={s:?} is not an unsigned integer")),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn design_from(req: &DesignRequest) -> Result<DesignCertificate> {
    synthesize(req).context("gain synthesis failed")
}

pub fn design(config: &Path, out_path: Option<&Path>, out: &mut dyn Write, log: &mut dyn Write) -> Result<i32> {
    let cfg = ProblemConfig::load(config)?;
    let req = cfg.request()?;
    let cert = design_from(&req)?;
    let report = verify_certificate(&cert, &req)?;
    let doc = CertificateDoc::new(&cert, req.case_b_coefficient, req.cost.radius, &report);

    match out_path {
        Some(path) => {
            std::fs::write(path, doc.to_json()).with_context(|| format!("writing {}", path.display()))?;
            writeln!(log, "certificate written to {}", path.display())?;
        }
        None => out.write_all(doc.to_json().as_bytes())?,
    }
    writeln!(
        log,
        "c = {:.6} ({}), lambda_max(P) = {:.6}, admissible radius = {:.6}",
        cert.c, cert.case_tag, cert.p_max_eigenvalue, cert.admissible_radius
    )?;
    let failed_modes: Vec<String> = report
        .modes
        .iter()
        .filter(|m| !m.passes())
        .map(|m| format!("{:.6}", m.lambda))
        .collect();
    if !failed_modes.is_empty() {
        writeln!(
            log,
            "verification failed for modes at lambda = {}",
            failed_modes.join(", ")
        )?;
    }
    if !cert.requested_radius_ok {
        writeln!(
            log,
            "requested radius {} exceeds admissible {:.4}",
            req.cost.radius, cert.admissible_radius
        )?;
    }
    Ok(if report.passes() && cert.requested_radius_ok {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

/// Where `simulate` takes its gain from.
#[derive(Debug, Clone, PartialEq)]
pub enum GainSource {
    /// Design from the config on the fly.
    Design,
    Certificate(PathBuf),
    /// `K = 0`.
    Uncontrolled,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateOptions {
    pub gain: GainSource,
    pub t_final: Option<f64>,
    pub dt: Option<f64>,
    pub csv: PathBuf,
    pub consensus_tol: f64,
}

fn load_gain(doc_path: &Path, req: &DesignRequest) -> Result<Matrix> {
    let cert = CertificateDoc::load(doc_path)?.certificate()?;
    let (m, n) = (req.agent.input_dim(), req.agent.state_dim());
    ensure!(
        cert.k.shape() == (m, n),
        "certificate k: expected shape {m}x{n} for this config, found {}x{}",
        cert.k.rows(),
        cert.k.cols()
    );
    Ok(cert.k)
}

pub fn simulate(config: &Path, opts: &SimulateOptions, out: &mut dyn Write) -> Result<i32> {
    let mut cfg = ProblemConfig::load(config)?;
    if let Some(t) = opts.t_final {
        cfg.simulation.t_final = Some(t);
    }
    if let Some(dt) = opts.dt {
        cfg.simulation.dt = Some(dt);
    }
    let (t_final, dt) = cfg.simulation_grid()?;
    let req = cfg.request()?;
    let init = cfg.initial_states(req.agent.state_dim())?;
    let k = match &opts.gain {
        GainSource::Design => design_from(&req)?.k,
        GainSource::Certificate(path) => load_gain(path, &req)?,
        GainSource::Uncontrolled => Matrix::zeros(req.agent.input_dim(), req.agent.state_dim()),
    };

    let sim = Simulation::new(&req.agent, &req.network, &req.cost, &k)?;
    let traj = sim.run(&init.followers, &init.leader, t_final, dt)?;
    let file = File::create(&opts.csv).with_context(|| format!("creating {}", opts.csv.display()))?;
    let mut csv = BufWriter::new(file);
    traj.write_csv(&mut csv)?;
    csv.flush()?;

    let last = traj.len() - 1;
    let quadrature = traj.final_cost();
    let cl = build_closed_loop(&req.agent, &req.network, &req.cost, &k)?;
    let e0 = initial_error(&init.followers, &init.leader);
    let exact = match cl.cost_matrix() {
        Ok(x) => Some(x.quadratic_form(&e0)?),
        Err(Error::InfiniteCost) => None,
        Err(e) => return Err(e.into()),
    };

    writeln!(
        out,
        "trajectory: {} samples to t = {} written to {}",
        traj.len(),
        traj.times[last],
        opts.csv.display()
    )?;
    writeln!(out, "terminal error norm: {:.6e}", traj.error_norm(last))?;
    writeln!(out, "max follower error: {:.6e}", traj.max_follower_error(last))?;
    writeln!(
        out,
        "consensus (tol {}): {}",
        opts.consensus_tol,
        consensus_reached(&traj, opts.consensus_tol)
    )?;
    writeln!(out, "quadrature cost: {quadrature:.9}")?;
    match exact {
        Some(j) => {
            writeln!(out, "lyapunov cost: {j:.9}")?;
            let gap = if j == 0.0 {
                quadrature.abs()
            } else {
                (quadrature - j).abs() / j.abs()
            };
            writeln!(out, "relative gap: {gap:.3e}")?;
            writeln!(out, "within gamma = {}: {}", req.cost.gamma, j < req.cost.gamma)?;
        }
        None => writeln!(out, "lyapunov cost: infinite (closed loop not Hurwitz)")?,
    }
    Ok(EXIT_OK)
}

pub fn verify(config: &Path, gain: &Path, samples: usize, out: &mut dyn Write) -> Result<i32> {
    let cfg = ProblemConfig::load(config)?;
    let req = cfg.request()?;
    let cert = CertificateDoc::load(gain)?.certificate()?;
    let report = verify_certificate(&cert, &req)?;
    for m in &report.modes {
        writeln!(
            out,
            "mode lambda = {:.6}: hurwitz {}, riccati inequality negative definite {}",
            m.lambda, m.hurwitz, m.inequality_negative_definite
        )?;
    }
    writeln!(
        out,
        "P < (gamma/r^2) I with gamma = {}, r = {}: {}",
        req.cost.gamma, req.cost.radius, report.radius_condition
    )?;

    // Informational only; the exit code depends on the report alone.
    if samples > 0 {
        let cl = build_closed_loop(&req.agent, &req.network, &req.cost, &cert.k)?;
        match cl.cost_matrix() {
            Ok(x) => {
                let seed = seed_from_env()?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut worst = 0.0_f64;
                for _ in 0..samples {
                    let e0 = sample_sphere(&mut rng, cl.dim(), req.cost.radius);
                    worst = worst.max(x.quadratic_form(&e0)?);
                }
                writeln!(
                    out,
                    "sampled cost on |e0| = {} ({samples} samples, seed {seed}): max {worst:.6}, below gamma: {}",
                    req.cost.radius,
                    worst < req.cost.gamma
                )?;
            }
            Err(Error::InfiniteCost) => writeln!(out, "sampled cost: infinite (closed loop not Hurwitz)")?,
            Err(e) => return Err(e.into()),
        }
    }

    let pass = report.passes();
    writeln!(out, "verification: {}", if pass { "PASS" } else { "FAIL" })?;
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReproduceOptions {
    pub epsilon: Option<f64>,
    pub c: Option<f64>,
    pub case_b_coefficient: Option<CaseBCoefficient>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReproductionRow {
    pub quantity: &'static str,
    pub expected: f64,
    pub computed: f64,
    /// `None` when the reference value does not apply to this design.
    pub diff: Option<f64>,
}

/// Benchmark design alongside the reference values. Rows that depend on the
/// coupling choice are not compared for case (b) designs.
pub fn reproduction_table(opts: ReproduceOptions) -> Result<(Vec<ReproductionRow>, DesignCertificate, bool)> {
    let cfg = benchmark();
    let mut req = cfg.request()?;
    if let Some(e) = opts.epsilon {
        req = req.with_epsilon(e);
    }
    if let Some(c) = opts.c {
        req = req.with_c(c);
    }
    if let Some(coeff) = opts.case_b_coefficient {
        req = req.with_case_b_coefficient(coeff);
    }
    let cert = design_from(&req)?;
    let modes_ok = verify_certificate(&cert, &req)?.modes_pass();
    let comparable = cert.case_tag == CaseTag::CaseA;

    let mut rows = Vec::new();
    let mut push = |quantity, expected: f64, computed: f64, always: bool| {
        let diff = (always || comparable).then(|| (expected - computed).abs());
        rows.push(ReproductionRow {
            quantity,
            expected,
            computed,
            diff,
        });
    };
    push("lambda_1", reference::LAMBDA_MIN, cert.lambda_min, true);
    push("lambda_5", reference::LAMBDA_MAX, cert.lambda_max, true);
    push("c", reference::C, cert.c, false);
    push("P[1,1]", reference::P[0][0], cert.p[(0, 0)], false);
    push("P[1,2]", reference::P[0][1], cert.p[(0, 1)], false);
    push("P[2,1]", reference::P[1][0], cert.p[(1, 0)], false);
    push("P[2,2]", reference::P[1][1], cert.p[(1, 1)], false);
    push("-K[1]", reference::K_MAGNITUDE[0], -cert.k[(0, 0)], false);
    push("-K[2]", reference::K_MAGNITUDE[1], -cert.k[(0, 1)], false);
    push(
        "lambda_max(P)",
        reference::P_MAX_EIGENVALUE,
        cert.p_max_eigenvalue,
        false,
    );
    push("radius bound", reference::RADIUS_BOUND, cert.admissible_radius, false);
    Ok((rows, cert, modes_ok))
}

pub fn reproduce_example(opts: ReproduceOptions, out: &mut dyn Write) -> Result<i32> {
    let (rows, cert, modes_ok) = reproduction_table(opts)?;
    writeln!(
        out,
        "{:<14} | {:>12} | {:>12} | {:>10}",
        "quantity", "reference", "computed", "abs diff"
    )?;
    writeln!(out, "{}", "-".repeat(57))?;
    for row in &rows {
        let (expected, diff) = match row.diff {
            Some(d) => (format!("{:.4}", row.expected), format!("{d:.2e}")),
            None => ("n/a".to_string(), "n/a".to_string()),
        };
        writeln!(
            out,
            "{:<14} | {:>12} | {:>12.6} | {:>10}",
            row.quantity, expected, row.computed, diff
        )?;
    }
    writeln!(
        out,
        "design: c = {:.6} ({}), epsilon = {}",
        cert.c, cert.case_tag, cert.epsilon
    )?;
    writeln!(
        out,
        "per-mode certificate checks: {}",
        if modes_ok { "pass" } else { "FAIL" }
    )?;

    let offenders: Vec<&str> = rows
        .iter()
        .filter(|r| r.diff.is_some_and(|d| d > REPRODUCTION_TOL))
        .map(|r| r.quantity)
        .collect();
    if !offenders.is_empty() {
        writeln!(out, "exceeds tolerance {REPRODUCTION_TOL}: {}", offenders.join(", "))?;
    }
    Ok(if offenders.is_empty() && modes_ok {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}
