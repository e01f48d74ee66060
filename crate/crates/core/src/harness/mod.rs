//! Experiment orchestration around the solver: TOML configs, single runs
//! with CSV artifacts, mass sweeps, δ-continuation, inequality audits and
//! the command-line front end.

pub mod audit;
pub mod cli;
pub mod config;
pub mod continuation;
pub mod experiment;
pub mod sweep;

pub use audit::{run_audit, AuditSummary};
pub use config::{load_config, InitialCondition, RunConfig, OUTPUT_ROOT_VAR};
pub use continuation::{continuation_delta, continuation_ladder, ContinuationReport};
pub use experiment::{resolve_sobolev, run_experiment, run_experiment_with, ExperimentOutcome, SobolevSource};
pub use sweep::{sweep_mass, SweepRow, SweepSummary};
