//! Explicit finite-volume stepping of `∂_t u = div(∇(u+δ)^m - u∇φ)`.
//!
//! The flux through an interior face `f` between cells `i` and `i+1` is
//!
//! ```text
//! G_f = (p_{i+1} - p_i) / h_f - u_f^up w_f,    p = (u + δ)^m,  w_f = φ'(r_f)
//! ```
//!
//! with `u_f^up = u_i` when `w_f > 0` and `u_{i+1}` otherwise. `G` is the
//! vector field inside the divergence, so the cell update is
//! `u_i += dt (A_{i+1/2} G_{i+1/2} - A_{i-1/2} G_{i-1/2}) / V_i`. Boundary
//! faces carry no flux, which makes the update telescope: mass is conserved
//! to round-off.

use serde::{Deserialize, Serialize};

use crate::analysis::blowup::{BlowupConfig, BlowupMonitor, BlowupVerdict};
use crate::diagnostics::DiagnosticsRecord;
use crate::elliptic::{gradient_into, solve_poisson, PoissonSolution};
use crate::energy::EntropyDensity;
use crate::error::{Error, Result};
use crate::field::CellField;
use crate::grid::RadialGrid;
use crate::params::ModelParams;

/// Fraction of the exact positivity bound a step may use.
const POSITIVITY_MARGIN: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepperConfig {
    pub cfl_safety: f64,
    pub dt_init: f64,
    /// Steps whose stable size falls below this are flagged as blow-up
    /// suspects.
    pub dt_min: f64,
    pub dt_max: f64,
    /// When false the drift term is dropped and the scheme is pure
    /// porous-medium diffusion.
    pub chemotaxis: bool,
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self {
            cfl_safety: 0.4,
            dt_init: 1e-6,
            dt_min: 1e-12,
            dt_max: 1e-2,
            chemotaxis: true,
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::Parameter(format!(
                "cfl_safety must lie in (0, 1], got {}",
                self.cfl_safety
            )));
        }
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt_init && self.dt_init <= self.dt_max)
            || !self.dt_max.is_finite()
        {
            return Err(Error::Parameter(format!(
                "need 0 < dt_min <= dt_init <= dt_max < inf, got {} / {} / {}",
                self.dt_min, self.dt_init, self.dt_max
            )));
        }
        Ok(())
    }
}

/// Outcome of the time-step controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeStep {
    /// Stable step clamped to `[dt_min, dt_max]`.
    pub dt: f64,
    /// The stable step before clamping (may be infinite for vacuum).
    pub unclamped: f64,
    /// Set when `unclamped < dt_min`.
    pub blowup_suspect: bool,
}

impl TimeStep {
    /// The step the integrator actually takes. A suspect step never uses
    /// the clamped `dt_min`, which may exceed the stability bound.
    pub fn applied(&self) -> f64 {
        if self.blowup_suspect {
            self.unclamped
        } else {
            self.dt
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub dt_used: f64,
    /// `max_f |G_f|`.
    pub max_flux: f64,
    /// Always false: a negative cell is reported as an error, never clipped.
    pub positivity_clipped: bool,
    pub blowup_suspect: bool,
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub u: CellField,
    /// Potential of the density the step started from.
    pub poisson: PoissonSolution,
    pub report: StepReport,
}

fn check_inputs(u: &CellField, grid: &RadialGrid) -> Result<()> {
    grid.check_len(u.len())?;
    if let Some((cell, &value)) = u.values().iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::NegativeDensity { cell, value });
    }
    Ok(())
}

/// Scratch buffers of the explicit update, reused across steps.
struct Kernel {
    /// `(u_i + δ)^{m-1}`, shared by the pressure and the diffusivity.
    coef: Vec<f64>,
    /// Face velocities `φ'(r_f)`; all zero when the drift is off.
    velocity: Vec<f64>,
    /// Face fluxes `G_f`.
    flux: Vec<f64>,
    drift: bool,
    // geometry: 1/h_f (0 on the boundary), A_f/V_i of the inner and outer
    // face of each cell, and Σ_f A_f/(h_f V_i) over both faces
    inv_spacing: Vec<f64>,
    inner_ratio: Vec<f64>,
    outer_ratio: Vec<f64>,
    diffusion_ratio: Vec<f64>,
}

impl Kernel {
    fn new(grid: &RadialGrid) -> Self {
        let n = grid.cell_count();
        let (areas, h, volumes) = (grid.face_areas(), grid.face_spacing(), grid.volumes());
        let inv_spacing: Vec<f64> = h.iter().map(|h| if *h > 0.0 { 1.0 / h } else { 0.0 }).collect();
        let inner_ratio: Vec<f64> = (0..n).map(|i| areas[i] / volumes[i]).collect();
        let outer_ratio: Vec<f64> = (0..n).map(|i| areas[i + 1] / volumes[i]).collect();
        let diffusion_ratio = (0..n)
            .map(|i| inner_ratio[i] * inv_spacing[i] + outer_ratio[i] * inv_spacing[i + 1])
            .collect();
        Self {
            coef: vec![0.0; n],
            velocity: vec![0.0; n + 1],
            flux: vec![0.0; n + 1],
            drift: false,
            inv_spacing,
            inner_ratio,
            outer_ratio,
            diffusion_ratio,
        }
    }

    /// Loads the coefficients and, for `velocity = Some`, the drift.
    fn load(&mut self, u: &[f64], velocity: Option<&[f64]>, params: &ModelParams) {
        for (c, &x) in self.coef.iter_mut().zip(u) {
            *c = params.power_coefficient(x);
        }
        self.drift = velocity.is_some();
        if let Some(w) = velocity {
            self.velocity.copy_from_slice(w);
        }
    }

    /// Solves for the drift of `u` and loads the coefficients.
    fn load_with_poisson(&mut self, u: &[f64], params: &ModelParams, cfg: &StepperConfig, grid: &RadialGrid) {
        for (c, &x) in self.coef.iter_mut().zip(u) {
            *c = params.power_coefficient(x);
        }
        self.drift = cfg.chemotaxis;
        if cfg.chemotaxis {
            gradient_into(u, grid, &mut self.velocity);
        }
    }

    fn velocity(&self) -> Option<&[f64]> {
        self.drift.then_some(self.velocity.as_slice())
    }

    /// Adaptive step size.
    ///
    /// The CFL part is `safety · min(Δr² / (2 max_i m(u_i+δ)^{m-1}), Δr / max_f |w_f|)`.
    /// It is further capped by the exact per-cell positivity bound: the mass a
    /// cell can lose through its faces in one step is at most
    /// `dt Σ_f A_f (D_i / h_f + outflow_f) u_i / V_i`, where
    /// `D_i = m(u_i+δ)^{m-1}` bounds the secant slope of the pressure. Near
    /// the origin, where `A_f / V_i ≈ N / Δr`, this cap is the one that binds
    /// for strong drift.
    fn stable_dt(&self, u: &[f64], params: &ModelParams, cfg: &StepperConfig, grid: &RadialGrid) -> TimeStep {
        let n = u.len();
        let dr = grid.min_width();
        let coef_max = self.coef.iter().fold(0.0f64, |a, c| a.max(*c));
        let d_max = params.m * coef_max;
        let w = self.velocity();
        let w_max = w.map_or(0.0, |w| w.iter().fold(0.0f64, |a, x| a.max(x.abs())));

        let diffusion_bound = if d_max > 0.0 {
            dr * dr / (2.0 * d_max)
        } else {
            f64::INFINITY
        };
        let drift_bound = if w_max > 0.0 { dr / w_max } else { f64::INFINITY };
        let cfl = cfg.cfl_safety * diffusion_bound.min(drift_bound);

        // inner face i, outer face i + 1; the boundary terms vanish because
        // A_0 = 0, 1/h_n = 0 and w_0 = w_n = 0. Empty cells cannot lose mass.
        let mut rate_max = 0.0f64;
        for i in 0..n {
            let mut rate = params.m * self.coef[i] * self.diffusion_ratio[i];
            if self.drift {
                rate += self.inner_ratio[i] * (-self.velocity[i]).max(0.0)
                    + self.outer_ratio[i] * self.velocity[i + 1].max(0.0);
            }
            if u[i] > 0.0 {
                rate_max = rate_max.max(rate);
            }
        }
        let positivity = if rate_max > 0.0 {
            POSITIVITY_MARGIN / rate_max
        } else {
            f64::INFINITY
        };

        let unclamped = cfl.min(positivity);
        TimeStep {
            dt: unclamped.clamp(cfg.dt_min, cfg.dt_max),
            unclamped,
            blowup_suspect: unclamped < cfg.dt_min,
        }
    }

    /// Face fluxes `G_f = (p_{i+1} - p_i) / h_f - u_f^up w_f` into `self.flux`.
    fn fluxes(&mut self, u: &[f64], params: &ModelParams) {
        let n = u.len();
        let inv_h = &self.inv_spacing;
        let drift = self.drift;
        let out = &mut self.flux;
        out[0] = 0.0;
        out[n] = 0.0;
        let mut p_left = (u[0] + params.delta) * self.coef[0];
        for f in 1..n {
            let p_right = (u[f] + params.delta) * self.coef[f];
            let mut g = (p_right - p_left) * inv_h[f];
            if drift {
                let w = self.velocity[f];
                let upwind = if w > 0.0 { u[f - 1] } else { u[f] };
                g -= upwind * w;
            }
            out[f] = g;
            p_left = p_right;
        }
    }

    /// Explicit update into `next`; returns `max_f |G_f|`.
    fn update(&mut self, u: &[f64], dt: f64, params: &ModelParams, next: &mut Vec<f64>) -> Result<f64> {
        self.fluxes(u, params);
        let max_flux = self.flux.iter().fold(0.0f64, |a, g| a.max(g.abs()));
        next.clear();
        for i in 0..u.len() {
            let change = self.outer_ratio[i] * self.flux[i + 1] - self.inner_ratio[i] * self.flux[i];
            let value = u[i] + dt * change;
            if value < 0.0 || !value.is_finite() {
                return Err(Error::PositivityViolation { cell: i, value });
            }
            next.push(value);
        }
        Ok(max_flux)
    }
}

/// Face fluxes `G_f` of the regularized density equation.
pub fn face_flux(u: &CellField, phi: &PoissonSolution, params: &ModelParams, grid: &RadialGrid) -> Result<Vec<f64>> {
    check_inputs(u, grid)?;
    grid.check_len(phi.face_gradient.len() - 1)?;
    let mut k = Kernel::new(grid);
    k.load(u.values(), Some(&phi.face_gradient), params);
    k.fluxes(u.values(), params);
    Ok(k.flux)
}

/// Face fluxes with the drift switched off: `G_f = (p_{i+1} - p_i) / h_f`.
pub fn diffusive_flux(u: &CellField, params: &ModelParams, grid: &RadialGrid) -> Result<Vec<f64>> {
    check_inputs(u, grid)?;
    let mut k = Kernel::new(grid);
    k.load(u.values(), None, params);
    k.fluxes(u.values(), params);
    Ok(k.flux)
}

/// Adaptive step size; see the positivity cap described on the kernel.
/// The CFL part is `safety · min(Δr² / (2 max_i m(u_i+δ)^{m-1}), Δr / max_f |w_f|)`,
/// further capped so that no cell can lose more than it holds.
pub fn stable_dt(
    u: &CellField,
    phi: &PoissonSolution,
    params: &ModelParams,
    cfg: &StepperConfig,
    grid: &RadialGrid,
) -> Result<TimeStep> {
    check_inputs(u, grid)?;
    cfg.validate()?;
    let mut k = Kernel::new(grid);
    k.load(u.values(), velocity_of(phi, cfg), params);
    Ok(k.stable_dt(u.values(), params, cfg, grid))
}

fn velocity_of<'a>(phi: &'a PoissonSolution, cfg: &StepperConfig) -> Option<&'a [f64]> {
    cfg.chemotaxis.then_some(phi.face_gradient.as_slice())
}

/// One explicit Euler update with a caller-chosen `dt`, using the potential
/// `phi` of `u`. Fails if any cell turns negative.
pub fn advance(
    u: &CellField,
    phi: &PoissonSolution,
    dt: f64,
    params: &ModelParams,
    cfg: &StepperConfig,
    grid: &RadialGrid,
) -> Result<(CellField, f64)> {
    check_inputs(u, grid)?;
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(Error::Parameter(format!("invalid time step {dt}")));
    }
    let mut k = Kernel::new(grid);
    k.load(u.values(), velocity_of(phi, cfg), params);
    let mut next = Vec::with_capacity(u.len());
    let max_flux = k.update(u.values(), dt, params, &mut next)?;
    Ok((CellField::from_trusted(next), max_flux))
}

/// One adaptive step: Poisson solve, step-size control, update.
pub fn step(u: &CellField, params: &ModelParams, cfg: &StepperConfig, grid: &RadialGrid) -> Result<StepOutcome> {
    step_capped(u, params, cfg, grid, f64::INFINITY)
}

/// Like [`step`] but never steps further than `dt_cap`.
pub fn step_capped(
    u: &CellField,
    params: &ModelParams,
    cfg: &StepperConfig,
    grid: &RadialGrid,
    dt_cap: f64,
) -> Result<StepOutcome> {
    check_inputs(u, grid)?;
    cfg.validate()?;
    let poisson = solve_poisson(u, grid)?;
    let mut k = Kernel::new(grid);
    k.load(u.values(), velocity_of(&poisson, cfg), params);
    let ts = k.stable_dt(u.values(), params, cfg, grid);
    let dt = ts.applied().min(dt_cap);
    let mut next = Vec::with_capacity(u.len());
    let max_flux = k.update(u.values(), dt, params, &mut next)?;
    Ok(StepOutcome {
        u: CellField::from_trusted(next),
        poisson,
        report: StepReport {
            dt_used: dt,
            max_flux,
            positivity_clipped: false,
            blowup_suspect: ts.blowup_suspect,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Completed,
    BlowupSuspected,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Termination::Completed => "completed",
            Termination::BlowupSuspected => "blowup_suspected",
        })
    }
}

/// Time-loop controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunSchedule {
    pub t_end: f64,
    /// Diagnostics are emitted at `0, Δ, 2Δ, ...` (steps are shortened to
    /// land on these times) and at the final time. Zero means only the
    /// initial and final states.
    pub sample_interval: f64,
    pub max_steps: Option<u64>,
    pub blowup: BlowupConfig,
    /// Consecutive samples allowed to violate Liapunov monotonicity before
    /// the run fails; `None` disables the check.
    pub liapunov_patience: Option<usize>,
}

impl RunSchedule {
    pub fn new(t_end: f64, sample_interval: f64) -> Self {
        Self {
            t_end,
            sample_interval,
            max_steps: None,
            blowup: BlowupConfig::default(),
            liapunov_patience: Some(3),
        }
    }
}

/// Relative Liapunov increase tolerated per unit time.
pub const LIAPUNOV_TOLERANCE: f64 = 1e-6;

/// `L(t₂) <= L(t₁) + tol (1 + |L(t₁)|) (t₂ - t₁)`.
pub fn liapunov_nonincreasing(l1: f64, t1: f64, l2: f64, t2: f64) -> bool {
    l2 <= l1 + LIAPUNOV_TOLERANCE * (1.0 + l1.abs()) * (t2 - t1).max(0.0)
}

/// A diagnostics sample handed to observers.
pub struct Sample<'a> {
    pub record: &'a DiagnosticsRecord,
    pub u: &'a CellField,
    pub poisson: &'a PoissonSolution,
}

/// Receives samples from a single producing run.
pub trait DiagnosticsSink {
    fn accept(&mut self, sample: &Sample<'_>) -> Result<()>;
}

impl<F: FnMut(&Sample<'_>) -> Result<()>> DiagnosticsSink for F {
    fn accept(&mut self, sample: &Sample<'_>) -> Result<()> {
        self(sample)
    }
}

/// Sink that drops every sample.
pub struct NullSink;

impl DiagnosticsSink for NullSink {
    fn accept(&mut self, _: &Sample<'_>) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub u: CellField,
    pub poisson: PoissonSolution,
    pub t: f64,
    pub steps: u64,
    pub cause: Termination,
    pub verdict: BlowupVerdict,
    pub records: Vec<DiagnosticsRecord>,
}

struct Recorder<'a> {
    params: &'a ModelParams,
    grid: &'a RadialGrid,
    entropy: EntropyDensity,
    records: Vec<DiagnosticsRecord>,
    patience: Option<usize>,
    violations: usize,
    violation_start: Option<f64>,
}

impl Recorder<'_> {
    fn record(
        &mut self,
        t: f64,
        dt: f64,
        u: &CellField,
        poisson: &PoissonSolution,
        sink: &mut dyn DiagnosticsSink,
    ) -> Result<()> {
        let rec = DiagnosticsRecord::compute(t, dt, u, poisson, self.params, &self.entropy, self.grid)?;
        if let (Some(patience), Some(prev)) = (self.patience, self.records.last()) {
            if liapunov_nonincreasing(prev.liapunov, prev.t, rec.liapunov, rec.t) {
                self.violations = 0;
                self.violation_start = None;
            } else {
                self.violations += 1;
                let from = *self.violation_start.get_or_insert(prev.liapunov);
                if self.violations >= patience {
                    return Err(Error::LiapunovIncrease {
                        from,
                        to: rec.liapunov,
                        samples: self.violations,
                    });
                }
            }
        }
        sink.accept(&Sample {
            record: &rec,
            u,
            poisson,
        })?;
        self.records.push(rec);
        Ok(())
    }
}

/// Integrates from `u0` until `t_end` or until the blow-up monitor fires.
pub fn run(
    u0: &CellField,
    params: &ModelParams,
    cfg: &StepperConfig,
    grid: &RadialGrid,
    schedule: &RunSchedule,
    sink: &mut dyn DiagnosticsSink,
) -> Result<RunOutcome> {
    check_inputs(u0, grid)?;
    cfg.validate()?;
    if !(schedule.t_end >= 0.0 && schedule.t_end.is_finite()) {
        return Err(Error::Parameter(format!(
            "t_end must be finite and >= 0, got {}",
            schedule.t_end
        )));
    }
    if !(schedule.sample_interval >= 0.0) {
        return Err(Error::Parameter("sample interval must be >= 0".into()));
    }

    let mut recorder = Recorder {
        params,
        grid,
        entropy: EntropyDensity::new(params.delta, params.m)?,
        records: Vec::new(),
        patience: schedule.liapunov_patience,
        violations: 0,
        violation_start: None,
    };
    let mut monitor = BlowupMonitor::new(schedule.blowup, u0.max());

    let n = u0.len();
    let mut kernel = Kernel::new(grid);
    let mut u = u0.values().to_vec();
    let mut next = Vec::with_capacity(n);
    let mut field = u0.clone();
    let mut poisson = solve_poisson(&field, grid)?;
    let mut t = 0.0;
    let mut steps = 0u64;
    recorder.record(t, 0.0, &field, &poisson, sink)?;
    monitor.note_sample(t, field.max());

    // sample times are k Δ, merged with t_end when they round onto it
    let interval = schedule.sample_interval;
    let t_end = schedule.t_end;
    let sample_time = |k: u64| {
        let s = k as f64 * interval;
        if (s - t_end).abs() <= 1e-9 * interval {
            t_end
        } else {
            s
        }
    };
    let mut sample_index = 1u64;
    let mut next_sample = if interval > 0.0 { sample_time(1) } else { f64::INFINITY };
    let mut cause = Termination::Completed;

    while t < t_end {
        if let Some(limit) = schedule.max_steps {
            if steps >= limit {
                return Err(Error::StepBudget(limit));
            }
        }
        kernel.load_with_poisson(&u, params, cfg, grid);
        let ts = kernel.stable_dt(&u, params, cfg, grid);
        let mut dt = ts.applied();
        if steps == 0 {
            dt = dt.min(cfg.dt_init);
        }
        let target = next_sample.min(t_end);
        let snapped = target - t <= dt * (1.0 + 1e-6);
        if snapped {
            dt = target - t;
        }
        kernel.update(&u, dt, params, &mut next)?;
        std::mem::swap(&mut u, &mut next);
        t = if snapped { target } else { t + dt };
        steps += 1;

        let sup = u.iter().copied().fold(0.0, f64::max);
        let flagged = monitor.observe(t, dt, ts.blowup_suspect, sup);
        if t >= next_sample || flagged || t >= t_end {
            field = CellField::from_trusted(u.clone());
            poisson = solve_poisson(&field, grid)?;
            recorder.record(t, dt, &field, &poisson, sink)?;
            monitor.note_sample(t, sup);
            while next_sample <= t {
                sample_index += 1;
                next_sample = sample_time(sample_index);
            }
        }
        if flagged {
            cause = Termination::BlowupSuspected;
            break;
        }
    }

    Ok(RunOutcome {
        u: field,
        poisson,
        t,
        steps,
        cause,
        verdict: monitor.verdict(),
        records: recorder.records,
    })
}
