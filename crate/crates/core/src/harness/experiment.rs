use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use crate::diagnostics::SERIES_HEADER;
use crate::dynamics::{run, RunOutcome, Sample, Termination};
use crate::elliptic::PoissonSolution;
use crate::energy::{threshold_report, CsProvenance, SobolevEstimator, ThresholdReport};
use crate::error::{Error, Result};
use crate::field::CellField;
use crate::grid::RadialGrid;

use super::config::{echo_config, RunConfig};

/// Sobolev constant behind every threshold of a config, with its source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevSource {
    pub c_s: f64,
    pub provenance: CsProvenance,
}

/// Uses the configured `c_s` when present, otherwise runs the radial
/// estimator on the configured estimate grid.
pub fn resolve_sobolev(cfg: &RunConfig) -> Result<SobolevSource> {
    if let Some(c_s) = cfg.threshold.c_s {
        return Ok(SobolevSource {
            c_s,
            provenance: CsProvenance::UserSupplied,
        });
    }
    let cells = cfg.threshold.cells.unwrap_or(cfg.grid.cells);
    let grid = RadialGrid::uniform(cfg.grid.dimension, cfg.grid.radius, cells)?;
    let estimator = SobolevEstimator {
        trials: cfg.threshold.trials,
        iterations: cfg.threshold.iterations,
        seed: cfg.seed,
    };
    Ok(SobolevSource {
        c_s: estimator.estimate(&grid)?.value,
        provenance: CsProvenance::RadialEstimate {
            cells,
            trials: cfg.threshold.trials,
            iterations: cfg.threshold.iterations,
        },
    })
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub run: RunOutcome,
    pub threshold: ThresholdReport,
    pub directory: PathBuf,
}

impl ExperimentOutcome {
    pub fn max_linf(&self) -> f64 {
        self.run.records.iter().map(|r| r.linf).fold(0.0, f64::max)
    }

    pub fn final_liapunov(&self) -> f64 {
        self.run.records.last().map_or(f64::NAN, |r| r.liapunov)
    }
}

/// Runs one experiment and writes `config.toml`, `series.csv`,
/// `snapshot_<t>.csv` and `verdict.txt` into the output directory.
pub fn run_experiment(cfg: &RunConfig) -> Result<ExperimentOutcome> {
    let sobolev = resolve_sobolev(cfg)?;
    run_experiment_with(cfg, sobolev)
}

/// [`run_experiment`] with a Sobolev constant resolved by the caller.
pub fn run_experiment_with(cfg: &RunConfig, sobolev: SobolevSource) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let dir = cfg.output_dir();
    echo_config(cfg, &dir)?;

    let grid = cfg.grid()?;
    let params = cfg.params()?;
    let u0 = cfg.initial_field(&grid)?;
    let threshold = threshold_report(
        cfg.physics.mass,
        grid.dimension(),
        grid.total_volume(),
        sobolev.c_s,
        sobolev.provenance,
    )?;

    let series_path = dir.join("series.csv");
    let file = File::create(&series_path).map_err(|e| Error::io(&series_path, e))?;
    let mut series = csv::Writer::from_writer(BufWriter::new(file));
    series.write_record(SERIES_HEADER)?;

    let mut samples = 0usize;
    let mut last_snapshot = None;
    let every = cfg.schedule.snapshot_every;
    let mut sink = |s: &Sample<'_>| -> Result<()> {
        series.write_record(s.record.to_row().iter().map(|v| format_value(*v)))?;
        if samples % every == 0 {
            write_snapshot(&dir, s.record.t, s.u, s.poisson, &grid)?;
            last_snapshot = Some(s.record.t);
        }
        samples += 1;
        Ok(())
    };
    let outcome = run(&u0, &params, &cfg.stepper, &grid, &cfg.run_schedule(), &mut sink)?;
    series.flush().map_err(|e| Error::io(&series_path, e))?;
    drop(series);
    if last_snapshot != Some(outcome.t) {
        write_snapshot(&dir, outcome.t, &outcome.u, &outcome.poisson, &grid)?;
    }

    let result = ExperimentOutcome {
        run: outcome,
        threshold,
        directory: dir.clone(),
    };
    let verdict_path = dir.join("verdict.txt");
    std::fs::write(&verdict_path, verdict_text(&result)).map_err(|e| Error::io(&verdict_path, e))?;
    Ok(result)
}

/// Full double precision, 17 significant digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn snapshot_name(t: f64) -> String {
    format!("snapshot_{t:.6e}.csv")
}

fn write_snapshot(dir: &Path, t: f64, u: &CellField, poisson: &PoissonSolution, grid: &RadialGrid) -> Result<()> {
    let path = dir.join(snapshot_name(t));
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(["r_center", "u", "phi"])?;
    for ((r, u), phi) in grid.centers().iter().zip(u.values()).zip(poisson.phi.values()) {
        w.write_record([format_value(*r), format_value(*u), format_value(*phi)])?;
    }
    w.flush().map_err(|e| Error::io(&path, e))
}

fn verdict_text(out: &ExperimentOutcome) -> String {
    let run = &out.run;
    let v = &run.verdict;
    let th = &out.threshold;
    let mut s = String::new();
    let _ = writeln!(s, "termination: {}", run.cause);
    let _ = writeln!(s, "t_final: {}", format_value(run.t));
    let _ = writeln!(s, "steps: {}", run.steps);
    let _ = writeln!(s, "blowup_flagged: {}", v.flagged);
    let _ = writeln!(s, "blowup_reason: {}", v.reason);
    let _ = writeln!(
        s,
        "blowup_t_flag: {}",
        v.t_flag.map_or_else(|| "none".to_string(), format_value)
    );
    let _ = writeln!(
        s,
        "linf_initial: {}",
        format_value(run.records.first().map_or(0.0, |r| r.linf))
    );
    let _ = writeln!(s, "linf_max: {}", format_value(out.max_linf()));
    let _ = writeln!(s, "liapunov_final: {}", format_value(out.final_liapunov()));
    let _ = writeln!(s, "c_s: {}", format_value(th.c_s));
    let _ = writeln!(s, "c_s_provenance: {}", th.provenance);
    let _ = writeln!(s, "mean_density: {}", format_value(th.mass));
    let _ = writeln!(s, "m_star: {}", format_value(th.m_star));
    let _ = writeln!(s, "mass_ratio: {}", format_value(th.mass / th.m_star));
    let _ = writeln!(s, "omega_m: {}", format_value(th.omega));
    let _ = writeln!(
        s,
        "regime: {}",
        if th.subcritical {
            "subcritical"
        } else {
            "not subcritical"
        }
    );
    s
}

/// Exit status of a finished run: 3 when it ended `blowup_suspected`.
pub fn run_exit_code(outcome: &RunOutcome) -> i32 {
    match outcome.cause {
        Termination::Completed => 0,
        Termination::BlowupSuspected => 3,
    }
}

/// Reads a `series.csv` back into records.
pub fn read_series(path: &Path) -> Result<Vec<crate::DiagnosticsRecord>> {
    let mut reader = csv::Reader::from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if header != SERIES_HEADER {
        return Err(Error::Config(format!("{}: unexpected series header", path.display())));
    }
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row?;
        let mut values = [0.0; 13];
        for (slot, field) in values.iter_mut().zip(row.iter()) {
            *slot = field
                .parse()
                .map_err(|e| Error::Config(format!("{}: bad number {field:?}: {e}", path.display())))?;
        }
        out.push(crate::DiagnosticsRecord::from_row(values));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(dir: &Path, initial: &str, mass: f64) -> RunConfig {
        let text = format!(
            r#"
[grid]
dimension = 3
radius = 1.0
cells = 40

[physics]
delta = 0.01
mass = {mass}

[initial]
{initial}

[schedule]
t_end = 0.01
sample_interval = 0.001
snapshot_every = 5

[threshold]
c_s = 2.0

[output]
directory = "{}"
"#,
            dir.display()
        );
        RunConfig::from_toml(&text).unwrap().resolve(None).unwrap()
    }

    #[test]
    fn steady_state_series() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(dir.path(), "kind = \"constant\"", 1.0);
        let out = run_experiment(&cfg).unwrap();
        assert_eq!(out.run.cause, Termination::Completed);
        let series = read_series(&dir.path().join("series.csv")).unwrap();
        assert_eq!(series.len(), 11);
        let mass0 = series[0].mass;
        for r in &series {
            assert!((r.mass - mass0).abs() <= 1e-13 * mass0);
            assert!(r.liapunov.abs() < 1e-12);
        }
        assert!(dir.path().join(snapshot_name(0.0)).exists());
        assert!(dir.path().join(snapshot_name(0.005)).exists());
        assert!(dir.path().join(snapshot_name(0.01)).exists());
        let verdict = std::fs::read_to_string(dir.path().join("verdict.txt")).unwrap();
        assert!(verdict.contains("termination: completed"));
        assert!(verdict.contains("c_s_provenance: user-supplied"));
        let echoed = super::super::config::load_config(&dir.path().join("config.toml")).unwrap();
        assert_eq!(echoed, cfg);
    }

    #[test]
    fn series_is_reproducible() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let bump = "kind = \"gaussian_bump\"\namplitude = 5.0\nwidth = 0.2";
        run_experiment(&config(a.path(), bump, 2.0)).unwrap();
        run_experiment(&config(b.path(), bump, 2.0)).unwrap();
        let sa = std::fs::read(a.path().join("series.csv")).unwrap();
        let sb = std::fs::read(b.path().join("series.csv")).unwrap();
        assert_eq!(sa, sb);
    }

    #[test]
    fn value_format_round_trips() {
        for v in [0.1, 1.0 / 3.0, 6.02e23, -1e-300, 0.0] {
            assert_eq!(format_value(v).parse::<f64>().unwrap(), v);
        }
    }
}
