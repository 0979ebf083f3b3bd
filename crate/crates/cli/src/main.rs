use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use subopt_cli::commands::{self, GainSource, ReproduceOptions, SimulateOptions};
use subopt_core::design::CaseBCoefficient;

/// Design, verify and simulate suboptimal leader-follower tracking gains.
#[derive(Parser)]
#[command(name = "subopt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a gain and certificate; exits 1 if verification fails or
    /// the requested radius is not admissible.
    Design {
        config: PathBuf,
        /// Write the certificate here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate the leader and followers and export a CSV trajectory.
    Simulate {
        config: PathBuf,
        /// Certificate supplying K. Without it the gain is designed from the config.
        #[arg(long, conflicts_with = "no_control")]
        gain: Option<PathBuf>,
        /// Run with K = 0.
        #[arg(long)]
        no_control: bool,
        #[arg(long)]
        t_final: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, default_value = "trajectory.csv")]
        out: PathBuf,
        /// Terminal follower-error threshold for the consensus verdict.
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
    },
    /// Check a certificate against a config; exits 1 on failure.
    Verify {
        config: PathBuf,
        #[arg(long)]
        gain: PathBuf,
        /// Initial errors sampled on the sphere of the requested radius
        /// (seeded by SUBOPT_SEED).
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Rerun the bundled five-follower benchmark and compare with reference values.
    ReproduceExample {
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        /// Case (b) Riccati coefficient: lambda1 or lambda2.
        #[arg(long, value_parser = parse_coefficient)]
        case_b_coefficient: Option<CaseBCoefficient>,
    },
}

fn parse_coefficient(s: &str) -> Result<CaseBCoefficient> {
    match CaseBCoefficient::parse(s) {
        Some(c) => Ok(c),
        None => bail!("expected lambda1 or lambda2"),
    }
}

fn run(cli: Cli) -> Result<i32> {
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Design { config, out } => commands::design(&config, out.as_deref(), &mut stdout, &mut io::stderr()),
        Command::Simulate {
            config,
            gain,
            no_control,
            t_final,
            dt,
            out,
            tol,
        } => {
            let gain = match (gain, no_control) {
                (Some(path), _) => GainSource::Certificate(path),
                (None, true) => GainSource::Uncontrolled,
                (None, false) => GainSource::Design,
            };
            let opts = SimulateOptions {
                gain,
                t_final,
                dt,
                csv: out,
                consensus_tol: tol,
            };
            commands::simulate(&config, &opts, &mut stdout)
        }
        Command::Verify { config, gain, samples } => commands::verify(&config, &gain, samples, &mut stdout),
        Command::ReproduceExample {
            epsilon,
            c,
            case_b_coefficient,
        } => commands::reproduce_example(
            ReproduceOptions {
                epsilon,
                c,
                case_b_coefficient,
            },
            &mut stdout,
        ),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
