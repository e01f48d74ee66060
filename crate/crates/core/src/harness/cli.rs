//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation error or bad usage, 2 runtime
//! failure, 3 a run ended `blowup_suspected`.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::analysis::exponents::gn_theta;
use crate::energy::{m_star, threshold_report, CsProvenance, SobolevEstimator};
use crate::error::{Error, Result};
use crate::grid::ball_volume;

use super::config::load_config;
use super::continuation::{continuation_ladder, halving_ladder, write_continuation_csv, DEFAULT_DECAY};
use super::experiment::{resolve_sobolev, run_exit_code, run_experiment_with};
use super::{run_audit, sweep_mass};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ks-critical",
    about = "Radial Keller-Segel solver with critical degenerate diffusion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment from a config file.
    Run { config: PathBuf },
    /// Run the config at several mean densities.
    SweepMass {
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        masses: Vec<f64>,
    },
    /// Run the config along the ladder delta0, delta0/2, ...
    ContinueDelta {
        config: PathBuf,
        #[arg(long)]
        delta0: f64,
        #[arg(long)]
        levels: usize,
        #[arg(long, default_value_t = DEFAULT_DECAY)]
        rho: f64,
    },
    /// Critical mean density and coercivity gap for a given Sobolev constant.
    Threshold {
        #[arg(long = "N")]
        dimension: usize,
        /// Domain volume; defaults to the unit ball.
        #[arg(long)]
        volume: Option<f64>,
        #[arg(long)]
        cs: f64,
        #[arg(long)]
        mass: Option<f64>,
    },
    /// Estimate the Sobolev constant on the config's grid.
    EstimateSobolev { config: PathBuf },
    /// Audit the interpolation inequalities on the config's corpus.
    Audit { config: PathBuf },
    /// Print the version.
    Version,
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_RUNTIME
            }
        }
    }
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Run { config } => {
            let cfg = load_config(&config)?;
            let sobolev = resolve_sobolev(&cfg)?;
            let out = run_experiment_with(&cfg, sobolev)?;
            println!("termination: {}", out.run.cause);
            println!("t_final: {:e}", out.run.t);
            println!("steps: {}", out.run.steps);
            println!("linf_max: {:e}", out.max_linf());
            println!(
                "mass_ratio: {:.6} (c_s = {:.6}, {})",
                out.threshold.mass / out.threshold.m_star,
                out.threshold.c_s,
                out.threshold.provenance
            );
            println!("output: {}", out.directory.display());
            Ok(run_exit_code(&out.run))
        }
        Command::SweepMass { config, masses } => {
            let cfg = load_config(&config)?;
            let summary = sweep_mass(&cfg, &masses)?;
            println!("mass,mass_ratio,verdict,max_linf,final_liapunov");
            for r in &summary.rows {
                println!(
                    "{:e},{:.6},{},{:e},{:e}",
                    r.mass, r.mass_ratio, r.verdict, r.max_linf, r.final_liapunov
                );
            }
            println!("summary: {}", summary.summary_path.display());
            Ok(EXIT_OK)
        }
        Command::ContinueDelta {
            config,
            delta0,
            levels,
            rho,
        } => {
            let cfg = load_config(&config)?;
            if !(rho > 1.0) {
                return Err(Error::Parameter(format!("rho must exceed 1, got {rho}")));
            }
            let report = continuation_ladder(&cfg, &halving_ladder(delta0, levels)?, rho)?;
            let path = cfg.output_dir().join("continuation.csv");
            write_continuation_csv(&report, &path)?;
            for (k, d) in report.distances.iter().enumerate() {
                println!("{:e} -> {:e}: {:e}", report.ladder[k], report.ladder[k + 1], d);
            }
            match report.average_decay {
                Some(a) => println!("average decay: {a:.4} (required {rho})"),
                None => println!("average decay: n/a"),
            }
            println!("converged: {}", report.converged);
            if let Some(delta) = report.aborted_at {
                println!("aborted: blowup_suspected at delta = {delta:e}");
                return Ok(EXIT_BLOWUP);
            }
            Ok(EXIT_OK)
        }
        Command::Threshold {
            dimension,
            volume,
            cs,
            mass,
        } => {
            let volume = volume.unwrap_or_else(|| ball_volume(dimension, 1.0));
            let star = m_star(dimension, volume, cs)?;
            println!("m_star: {star:.6}");
            if let Some(mass) = mass {
                let r = threshold_report(mass, dimension, volume, cs, CsProvenance::UserSupplied)?;
                println!("omega_m: {:.6}", r.omega);
                println!(
                    "regime: {}",
                    if r.subcritical {
                        "subcritical"
                    } else {
                        "not subcritical"
                    }
                );
            }
            Ok(EXIT_OK)
        }
        Command::EstimateSobolev { config } => {
            let cfg = load_config(&config)?;
            let grid = cfg.grid()?;
            let est = SobolevEstimator {
                trials: cfg.threshold.trials,
                iterations: cfg.threshold.iterations,
                seed: cfg.seed,
            }
            .estimate(&grid)?;
            let star = m_star(grid.dimension(), grid.total_volume(), est.value)?;
            println!("c_s_estimate: {:.8}", est.value);
            println!("m_star_estimate: {star:.8}");
            println!("per_trial: {:?}", est.per_trial);
            Ok(EXIT_OK)
        }
        Command::Audit { config } => {
            let cfg = load_config(&config)?;
            let s = run_audit(&cfg)?;
            let theta = gn_theta(cfg.audit.gn_q1, cfg.audit.gn_q2, cfg.grid.dimension)?;
            let tag = |calibrated: bool| if calibrated { "calibrated" } else { "frozen" };
            println!(
                "gn (q1 = {}, q2 = {}, theta = {theta:.6}): {}/{} pass, constant {:.12e} ({})",
                cfg.audit.gn_q1,
                cfg.audit.gn_q2,
                s.gn_passed,
                s.fields,
                s.gn_constant,
                tag(s.gn_calibrated)
            );
            println!(
                "poincare (q1 = {}): {}/{} pass, constant {:.12e} ({})",
                cfg.audit.poincare_q1,
                s.poincare_passed,
                s.fields,
                s.poincare_constant,
                tag(s.poincare_calibrated)
            );
            Ok(if s.all_pass() { EXIT_OK } else { EXIT_RUNTIME })
        }
        Command::Version => {
            println!("ks-critical {}", env!("CARGO_PKG_VERSION"));
            Ok(EXIT_OK)
        }
    }
}
