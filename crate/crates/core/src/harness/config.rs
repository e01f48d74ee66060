//! TOML run configuration.
//!
//! Grammar: an optional top-level `seed`, then the sections below. Every
//! section is flat (scalar values only) and unknown keys are rejected.
//!
//! ```toml
//! seed = 0                     # randomized components (Sobolev estimate, audit corpus)
//!
//! [grid]
//! dimension = 3                # N >= 3
//! radius = 1.0
//! cells = 200
//!
//! [physics]
//! delta = 1e-3                 # regularization, 0 <= delta < 1
//! mass = 1.0                   # target mean density M
//!
//! [stepper]                    # optional
//! cfl_safety = 0.4
//! dt_init = 1e-6
//! dt_min = 1e-12
//! dt_max = 1e-2
//! chemotaxis = true
//!
//! [initial]
//! kind = "gaussian_bump"       # "constant" | "gaussian_bump" | "table"
//! amplitude = 10.0             # gaussian_bump only
//! width = 0.1
//! center_radius = 0.0          # optional, default 0
//! background = 0.0             # optional, default 0
//! # file = "profile.csv"       # table only: CSV with header r,u
//!
//! [schedule]
//! t_end = 1.0
//! sample_interval = 0.01       # optional, default t_end / 100
//! snapshot_every = 10          # optional, snapshot every k-th sample
//! max_steps = 1000000          # optional
//! liapunov_patience = 3        # optional, 0 disables the monotonicity check
//!
//! [output]
//! directory = "out/run"        # optional, default $KS_CRITICAL_OUTPUT_ROOT/<config stem>
//!
//! [threshold]                  # optional
//! c_s = 2.3                    # user-supplied Sobolev constant; estimated when absent
//! cells = 400                  # grid of the radial estimate, default grid.cells
//! trials = 8
//! iterations = 400
//!
//! [blowup]                     # optional
//! window = 10
//! growth_factor = 1e3
//!
//! [audit]                      # optional
//! fields = 1000
//! gn_q1 = 1.0
//! gn_q2 = 2.0
//! poincare_q1 = 0.5
//! # gn_constant / poincare_constant: frozen constants, calibrated when absent
//! ```
//!
//! After loading, defaults are filled in and relative paths are resolved
//! against the config file, so the echoed file reloads to an equal value.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::BlowupConfig;
use crate::dynamics::{RunSchedule, StepperConfig};
use crate::error::{Error, Result};
use crate::field::CellField;
use crate::grid::RadialGrid;
use crate::params::ModelParams;

/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_VAR: &str = "KS_CRITICAL_OUTPUT_ROOT";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub grid: GridSection,
    pub physics: PhysicsSection,
    #[serde(default)]
    pub stepper: StepperConfig,
    pub initial: InitialCondition,
    pub schedule: ScheduleSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub threshold: ThresholdSection,
    #[serde(default)]
    pub blowup: BlowupConfig,
    #[serde(default)]
    pub audit: AuditSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub dimension: usize,
    pub radius: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSection {
    pub delta: f64,
    /// Target mean density `M`.
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    Constant {},
    GaussianBump {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center_radius: f64,
        #[serde(default)]
        background: f64,
    },
    Table {
        file: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub t_end: f64,
    pub sample_interval: Option<f64>,
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: usize,
    pub max_steps: Option<u64>,
    #[serde(default = "default_patience")]
    pub liapunov_patience: usize,
}

fn default_snapshot_every() -> usize {
    10
}

fn default_patience() -> usize {
    3
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub directory: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdSection {
    pub c_s: Option<f64>,
    pub cells: Option<usize>,
    pub trials: usize,
    pub iterations: usize,
}

impl Default for ThresholdSection {
    fn default() -> Self {
        Self {
            c_s: None,
            cells: None,
            trials: 8,
            iterations: 400,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditSection {
    pub fields: usize,
    pub gn_q1: f64,
    pub gn_q2: f64,
    pub poincare_q1: f64,
    pub gn_constant: Option<f64>,
    pub poincare_constant: Option<f64>,
}

impl Default for AuditSection {
    fn default() -> Self {
        Self {
            fields: 1000,
            gn_q1: 1.0,
            gn_q2: 2.0,
            poincare_q1: 0.5,
            gn_constant: None,
            poincare_constant: None,
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl RunConfig {
    /// Parses and validates TOML text without resolving paths or defaults
    /// that depend on the file location.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| invalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| invalid(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.params()?;
        self.grid()?;
        if self.grid.cells < 2 {
            return Err(invalid(format!(
                "grid.cells must be at least 2, got {}",
                self.grid.cells
            )));
        }
        self.stepper.validate()?;
        match &self.initial {
            InitialCondition::Constant {} | InitialCondition::Table { .. } => {}
            InitialCondition::GaussianBump {
                amplitude,
                width,
                center_radius,
                background,
            } => {
                if !(amplitude.is_finite() && *amplitude >= 0.0) {
                    return Err(invalid(format!("initial.amplitude must be >= 0, got {amplitude}")));
                }
                if !(width.is_finite() && *width > 0.0) {
                    return Err(invalid(format!("initial.width must be positive, got {width}")));
                }
                if !(*center_radius >= 0.0 && *center_radius <= self.grid.radius) {
                    return Err(invalid(format!(
                        "initial.center_radius must lie in [0, {}], got {center_radius}",
                        self.grid.radius
                    )));
                }
                if !(background.is_finite() && *background >= 0.0) {
                    return Err(invalid(format!("initial.background must be >= 0, got {background}")));
                }
                if *amplitude == 0.0 && *background == 0.0 && self.physics.mass > 0.0 {
                    return Err(invalid(
                        "gaussian_bump with zero amplitude and background cannot carry mass",
                    ));
                }
            }
        }
        let s = &self.schedule;
        if !(s.t_end.is_finite() && s.t_end >= 0.0) {
            return Err(invalid(format!(
                "schedule.t_end must be finite and >= 0, got {}",
                s.t_end
            )));
        }
        if let Some(dt) = s.sample_interval {
            if !(dt.is_finite() && dt >= 0.0) {
                return Err(invalid(format!("schedule.sample_interval must be >= 0, got {dt}")));
            }
        }
        if s.snapshot_every == 0 {
            return Err(invalid("schedule.snapshot_every must be at least 1"));
        }
        if self.blowup.window == 0 || !(self.blowup.growth_factor > 1.0) {
            return Err(invalid("blowup.window must be >= 1 and blowup.growth_factor > 1"));
        }
        let t = &self.threshold;
        if let Some(c) = t.c_s {
            if !(c.is_finite() && c > 0.0) {
                return Err(invalid(format!("threshold.c_s must be positive, got {c}")));
            }
        }
        if t.trials == 0 || t.cells.map_or(false, |c| c < 2) {
            return Err(invalid("threshold.trials must be >= 1 and threshold.cells >= 2"));
        }
        let a = &self.audit;
        if a.fields == 0 {
            return Err(invalid("audit.fields must be at least 1"));
        }
        for c in [a.gn_constant, a.poincare_constant].into_iter().flatten() {
            if !(c.is_finite() && c > 0.0) {
                return Err(invalid(format!("audit constants must be positive, got {c}")));
            }
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.grid.dimension, self.physics.delta, self.physics.mass)
    }

    pub fn grid(&self) -> Result<RadialGrid> {
        RadialGrid::uniform(self.grid.dimension, self.grid.radius, self.grid.cells)
    }

    pub fn sample_interval(&self) -> f64 {
        self.schedule.sample_interval.unwrap_or(self.schedule.t_end / 100.0)
    }

    pub fn run_schedule(&self) -> RunSchedule {
        let mut schedule = RunSchedule::new(self.schedule.t_end, self.sample_interval());
        schedule.max_steps = self.schedule.max_steps;
        schedule.blowup = self.blowup;
        schedule.liapunov_patience = match self.schedule.liapunov_patience {
            0 => None,
            k => Some(k),
        };
        schedule
    }

    /// Fills every location-dependent default: sample interval, estimate
    /// grid, absolute table path and output directory.
    pub fn resolve(mut self, config_path: Option<&Path>) -> Result<Self> {
        let base = config_path
            .and_then(Path::parent)
            .map(Path::to_path_buf)
            .unwrap_or_default();
        self.schedule.sample_interval = Some(self.sample_interval());
        self.threshold.cells.get_or_insert(self.grid.cells);
        if let InitialCondition::Table { file } = &mut self.initial {
            if file.is_relative() {
                *file = absolute(&base.join(&*file))?;
            }
        }
        let directory = match self.output.directory.take() {
            Some(dir) if dir.is_relative() => absolute(&base.join(dir))?,
            Some(dir) => dir,
            None => {
                let stem = config_path
                    .and_then(Path::file_stem)
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "run".into());
                absolute(&default_output_root().join(stem))?
            }
        };
        self.output.directory = Some(directory);
        Ok(self)
    }

    /// Output directory; only meaningful after [`RunConfig::resolve`].
    pub fn output_dir(&self) -> PathBuf {
        self.output
            .directory
            .clone()
            .unwrap_or_else(|| default_output_root().join("run"))
    }

    /// Initial density shaped by the descriptor and scaled to mean `M`.
    pub fn initial_field(&self, grid: &RadialGrid) -> Result<CellField> {
        let shape = match &self.initial {
            InitialCondition::Constant {} => CellField::constant(1.0, grid.cell_count())?,
            InitialCondition::GaussianBump {
                amplitude,
                width,
                center_radius,
                background,
            } => CellField::from_profile(grid, |r| {
                background + amplitude * (-(r - center_radius).powi(2) / (2.0 * width * width)).exp()
            })?,
            InitialCondition::Table { file } => CellField::new(read_table(file, grid)?)?,
        };
        normalize_to_mean(shape, self.physics.mass, grid)
    }
}

/// Scales `shape` so that its mean is `target`.
pub fn normalize_to_mean(shape: CellField, target: f64, grid: &RadialGrid) -> Result<CellField> {
    if target == 0.0 {
        return CellField::constant(0.0, shape.len());
    }
    let mean = grid.mean(shape.values())?;
    if !(mean > 0.0) {
        return Err(invalid("initial profile has zero mass and cannot be normalized"));
    }
    shape.scaled(target / mean)
}

fn absolute(path: &Path) -> Result<PathBuf> {
    std::path::absolute(path).map_err(|e| Error::io(path, e))
}

pub fn default_output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("ks-output"))
}

/// Reads a `r,u` table and interpolates it linearly onto the cell centers,
/// holding the end values constant outside the tabulated range.
fn read_table(path: &Path, grid: &RadialGrid) -> Result<Vec<f64>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let headers = reader.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "r" || &headers[1] != "u" {
        return Err(invalid(format!("{}: table header must be r,u", path.display())));
    }
    let mut points: Vec<(f64, f64)> = Vec::new();
    for row in reader.records() {
        let row = row?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| invalid(format!("{}: bad number {s:?}: {e}", path.display())))
        };
        let (r, u) = (parse(&row[0])?, parse(&row[1])?);
        if !(u >= 0.0 && u.is_finite() && r.is_finite()) {
            return Err(invalid(format!(
                "{}: table values must be finite and u >= 0",
                path.display()
            )));
        }
        if points.last().map_or(false, |&(prev, _)| r <= prev) {
            return Err(invalid(format!("{}: radii must increase strictly", path.display())));
        }
        points.push((r, u));
    }
    if points.is_empty() {
        return Err(invalid(format!("{}: empty table", path.display())));
    }
    Ok(grid.centers().iter().map(|&r| interpolate(&points, r)).collect())
}

fn interpolate(points: &[(f64, f64)], r: f64) -> f64 {
    let k = points.partition_point(|&(x, _)| x <= r);
    if k == 0 {
        return points[0].1;
    }
    if k == points.len() {
        return points[k - 1].1;
    }
    let (x0, y0) = points[k - 1];
    let (x1, y1) = points[k];
    y0 + (y1 - y0) * (r - x0) / (x1 - x0)
}

/// Reads, validates and resolves a config file. A missing or unreadable
/// file is a configuration error.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    RunConfig::from_toml(&text)?.resolve(Some(path))
}

/// Writes the resolved config to `<dir>/config.toml`.
pub fn echo_config(cfg: &RunConfig, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join("config.toml");
    std::fs::write(&path, cfg.to_toml()?).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}
