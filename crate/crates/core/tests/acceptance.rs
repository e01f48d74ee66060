//! Acceptance suite. The twelve criteria run one after another inside a
//! single test so that their wall-clock budgets are measured without other
//! tests competing for the CPU. Each prints one line:
//!
//! ```text
//! [PASS]  1 mass conservation (1.7 s): ...
//! ```
//!
//! The lines go straight to stderr and are visible without `--nocapture`.
//! Set `KS_ACCEPTANCE_ONLY=1,4,7` to run a subset.

use std::io::Write as _;
use std::time::{Duration, Instant};

use ks_critical::analysis::{
    app_theta, audit_gn, audit_poincare, calibrate_gn, calibrate_poincare, dual_distance, gn_theta, gronwall_check,
    smooth_corpus, BlowupReason, GronwallConfig, GronwallReport, Snapshot,
};
use ks_critical::dynamics::{
    advance, liapunov_nonincreasing, run, stable_dt, step, RunSchedule, Sample, StepperConfig, Termination,
};
use ks_critical::elliptic::{mean_value, solve_poisson, solve_source};
use ks_critical::energy::{
    b_delta, b_delta_lower_bound, b_delta_upper_bound, b_zero_closed_form, liapunov, m_star, omega_m,
};
use ks_critical::harness::config::normalize_to_mean;
use ks_critical::harness::{continuation_delta, resolve_sobolev, run_experiment_with, RunConfig};
use ks_critical::{critical_exponent, make_uniform_grid, CellField, ModelParams, RadialGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn report(line: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

fn gaussian(grid: &RadialGrid, background: f64, width: f64, mean: f64) -> CellField {
    let shape = CellField::from_profile(grid, |r| background + (-(r * r) / (2.0 * width * width)).exp()).unwrap();
    normalize_to_mean(shape, mean, grid).unwrap()
}

fn fast_stepper() -> StepperConfig {
    StepperConfig {
        cfl_safety: 0.6,
        ..StepperConfig::default()
    }
}

fn config(text: &str, dir: &std::path::Path) -> RunConfig {
    let text = format!("{text}\n[output]\ndirectory = \"{}\"\n", dir.display());
    RunConfig::from_toml(&text).unwrap().resolve(None).unwrap()
}

// 1 and 3 share one run.
struct LongRun {
    mass_drift: f64,
    liapunov: Vec<(f64, f64)>,
    elapsed: Duration,
}

fn long_run() -> Result<LongRun, String> {
    let start = Instant::now();
    let grid = make_uniform_grid(3, 1.0, 400).map_err(fail)?;
    let u0 = gaussian(&grid, 0.05, 0.15, 10.0);
    let params = ModelParams::new(3, 1e-3, 10.0).map_err(fail)?;
    let cfg = StepperConfig::default();
    let mass0 = grid.integrate(u0.values()).map_err(fail)?;
    let mut u = u0;
    let mut t = 0.0;
    let mut samples = Vec::new();
    for k in 0..=100_000u32 {
        if k % 1000 == 0 {
            let phi = solve_poisson(&u, &grid).map_err(fail)?;
            samples.push((t, liapunov(&u, &phi, &params, &grid).map_err(fail)?.total));
        }
        if k == 100_000 {
            break;
        }
        let out = step(&u, &params, &cfg, &grid).map_err(fail)?;
        t += out.report.dt_used;
        u = out.u;
    }
    let mass = grid.integrate(u.values()).map_err(fail)?;
    Ok(LongRun {
        mass_drift: (mass - mass0).abs() / mass0,
        liapunov: samples,
        elapsed: start.elapsed(),
    })
}

fn criterion_1(run: &Result<LongRun, String>) -> Verdict {
    let run = run.as_ref().map_err(Clone::clone)?;
    ensure(run.mass_drift <= 1e-10, || {
        format!("relative mass drift {:e}", run.mass_drift)
    })?;
    ensure(run.elapsed.as_secs_f64() <= 60.0, || format!("took {:?}", run.elapsed))?;
    Ok(format!(
        "1e5 steps at n = 400, relative drift {:.2e}, run {:.1} s",
        run.mass_drift,
        run.elapsed.as_secs_f64()
    ))
}

fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let cfg = StepperConfig::default();
    let mut negatives = 0usize;
    let mut clips = 0usize;
    for _ in 0..1000 {
        let dimension = rng.gen_range(3..=5);
        let cells = rng.gen_range(3..=120);
        let grid = make_uniform_grid(dimension, rng.gen_range(0.5..3.0), cells).map_err(fail)?;
        let scale = 10f64.powf(rng.gen_range(-3.0..3.0));
        let values: Vec<f64> = (0..cells)
            .map(|_| {
                if rng.gen_bool(0.3) {
                    0.0
                } else {
                    scale * rng.gen::<f64>()
                }
            })
            .collect();
        let u = CellField::new(values).map_err(fail)?;
        let params =
            ModelParams::new(dimension, rng.gen_range(0.0..0.5), mean_value(&u, &grid).map_err(fail)?).map_err(fail)?;
        let phi = solve_poisson(&u, &grid).map_err(fail)?;
        let dt = stable_dt(&u, &phi, &params, &cfg, &grid).map_err(fail)?.applied() * rng.gen_range(0.01..=1.0);
        let (next, _) = advance(&u, &phi, dt, &params, &cfg, &grid).map_err(fail)?;
        negatives += next.values().iter().filter(|v| **v < 0.0).count();
        let out = step(&u, &params, &cfg, &grid).map_err(fail)?;
        clips += usize::from(out.report.positivity_clipped);
        negatives += out.u.values().iter().filter(|v| **v < 0.0).count();
    }
    ensure(negatives == 0 && clips == 0, || {
        format!("{negatives} negative cells, {clips} clips")
    })?;
    Ok("1000 random fields, 2000 steps, no negative cell, no clip".into())
}

fn criterion_3(run: &Result<LongRun, String>) -> Verdict {
    let run = run.as_ref().map_err(Clone::clone)?;
    for w in run.liapunov.windows(2) {
        let ((t1, l1), (t2, l2)) = (w[0], w[1]);
        ensure(liapunov_nonincreasing(l1, t1, l2, t2), || {
            format!("L rose from {l1:e} to {l2:e} between t = {t1:e} and {t2:e}")
        })?;
    }
    let first = run.liapunov[0].1;
    let last = run.liapunov[run.liapunov.len() - 1].1;
    ensure(last < first, || format!("no net decrease: {first:e} -> {last:e}"))?;
    Ok(format!(
        "{} samples nonincreasing, L {:.6e} -> {:.6e}",
        run.liapunov.len(),
        first,
        last
    ))
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let exponents = [4.0 / 3.0, 1.5, 1.6];
    for _ in 0..10_000 {
        let u = rng.gen_range(0.0..=100.0);
        let delta = rng.gen_range(0.0..1.0);
        let m = exponents[rng.gen_range(0..3)];
        let b = b_delta(u, delta, m).map_err(fail)?;
        let lower = b_delta_lower_bound(u, m);
        let upper = b_delta_upper_bound(u, m);
        ensure(b >= lower - 1e-9 * (1.0 + lower.abs()), || {
            format!("below lower bound at u = {u}, delta = {delta}, m = {m}: {b} < {lower}")
        })?;
        ensure(b <= upper + 1e-9 * (1.0 + upper.abs()), || {
            format!("above upper bound at u = {u}, delta = {delta}, m = {m}: {b} > {upper}")
        })?;
    }
    let mut worst = 0.0f64;
    for k in 0..=1000 {
        let u = 0.1 * k as f64;
        for m in exponents {
            let err = (b_delta(u, 0.0, m).map_err(fail)? - b_zero_closed_form(u, m)).abs();
            worst = worst.max(err);
        }
    }
    ensure(worst <= 1e-9, || format!("delta = 0 quadrature off by {worst:e}"))?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed <= 30.0, || format!("took {elapsed:.1} s"))?;
    Ok(format!("1e4 samples inside the bounds, delta = 0 error {worst:.1e}"))
}

fn criterion_5() -> Verdict {
    let volume = 4.0 * std::f64::consts::PI / 3.0;
    // (2 / ((1/3) |Ω|^{2/3}))^{3/2} = 6^{3/2} / |Ω| = 14.696938... / 4.188790...
    let hand = 14.696_938_456_699_067 / 4.188_790_204_786_391;
    let star = m_star(3, volume, 1.0).map_err(fail)?;
    ensure((star - 3.5086).abs() <= 1e-3 && (star - hand).abs() <= 1e-12, || {
        format!("m_star = {star}, hand value {hand}")
    })?;
    let at_star = omega_m(star, 3, volume, 1.0).map_err(fail)?;
    ensure(at_star.abs() <= 1e-12, || format!("omega(M*) = {at_star:e}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10_000 {
        let n = rng.gen_range(3..=6);
        let nf = n as f64;
        let m = 2.0 * (nf - 1.0) / nf;
        let volume: f64 = rng.gen_range(0.1..10.0);
        let c_s: f64 = rng.gen_range(0.2..5.0);
        let mass: f64 = rng.gen_range(0.0..100.0);
        let e = 2.0 / nf;
        let star = (2.0 * c_s * c_s / ((m - 1.0) * volume.powf(e))).powf(nf / 2.0);
        let pull = 0.5 * mass.powf(e) * volume.powf(e) / (c_s * c_s);
        let direct = 1.0 / (m - 1.0) - pull;
        let factored = volume.powf(e) / (2.0 * c_s * c_s) * (star.powf(e) - mass.powf(e));
        let scale = 1.0 / (m - 1.0) + pull;
        ensure((direct - factored).abs() <= 1e-12 * scale, || {
            format!("forms disagree at N = {n}, M = {mass}: {direct} vs {factored}")
        })?;
        let got = omega_m(mass, n, volume, c_s).map_err(fail)?;
        ensure((got - direct).abs() <= 1e-12 * scale, || {
            format!("omega_m = {got}, expected {direct}")
        })?;
    }
    Ok(format!(
        "m_star = {star:.6}, omega(M*) = {at_star:.1e}, 1e4 random inputs agree"
    ))
}

fn criterion_6() -> Verdict {
    let exact = |r: f64| r * r / 2.0 - r.powi(4) / 4.0 - 27.0 / 140.0;
    let mut errors = Vec::new();
    let mut worst_identity = 0.0f64;
    for cells in [100usize, 200, 400, 800, 1600] {
        let grid = make_uniform_grid(3, 1.0, cells).map_err(fail)?;
        let source: Vec<f64> = grid.centers().iter().map(|r| 5.0 * r * r - 3.0).collect();
        let sol = solve_source(&source, &grid).map_err(fail)?;
        let err = grid
            .centers()
            .iter()
            .zip(sol.phi.values())
            .map(|(r, p)| (p - exact(*r)).abs())
            .fold(0.0, f64::max);
        errors.push(err);
        let mean = grid.mean(&source).map_err(fail)?;
        let work: f64 = grid
            .volumes()
            .iter()
            .zip(&source)
            .zip(sol.phi.values())
            .map(|((v, s), p)| v * (s - mean) * p)
            .sum();
        let energy = sol.dirichlet_energy(&grid);
        worst_identity = worst_identity.max((energy - work).abs() / energy);
    }
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    ensure(ratios.iter().all(|r| (3.2..=4.8).contains(r)), || {
        format!("ratios {ratios:?}")
    })?;
    ensure(worst_identity <= 1e-9, || {
        format!("energy identity off by {worst_identity:e}")
    })?;
    Ok(format!(
        "error ratios {}, energy identity {:.1e}",
        ratios.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>().join(" "),
        worst_identity
    ))
}

const REGIME_TEMPLATE: &str = r#"
[grid]
dimension = 3
radius = 1.0
cells = 400

[physics]
delta = 0.001
mass = 1.0

[stepper]
cfl_safety = 0.6
"#;

fn regime_config(dir: &std::path::Path, width: f64, t_end: f64) -> RunConfig {
    let text = format!(
        "{REGIME_TEMPLATE}\n[initial]\nkind = \"gaussian_bump\"\namplitude = 1.0\nwidth = {width}\nbackground = 0.0\n\n\
         [schedule]\nt_end = {t_end}\nsample_interval = {}\nsnapshot_every = 1000\n",
        t_end / 100.0
    );
    config(&text, dir)
}

fn criterion_7() -> Verdict {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(fail)?;
    let mut cfg = regime_config(dir.path(), 0.15, 5.0);
    let sobolev = resolve_sobolev(&cfg).map_err(fail)?;
    let grid = cfg.grid().map_err(fail)?;
    cfg.physics.mass = 0.5 * m_star(3, grid.total_volume(), sobolev.c_s).map_err(fail)?;
    let out = run_experiment_with(&cfg, sobolev).map_err(fail)?;
    let elapsed = start.elapsed().as_secs_f64();
    let initial = out.run.records[0].linf;
    let peak = out.max_linf();
    ensure(out.run.cause == Termination::Completed, || {
        format!("ended {}", out.run.cause)
    })?;
    ensure(!out.run.verdict.flagged, || "blow-up flag raised".into())?;
    ensure(peak <= 10.0 * initial, || {
        format!("sup grew from {initial:e} to {peak:e}")
    })?;
    ensure(elapsed <= 300.0, || format!("took {elapsed:.0} s"))?;
    Ok(format!(
        "M = {:.4} (C_s = {:.6}), completed t = 5 in {} steps, max sup / initial sup = {:.3}",
        cfg.physics.mass,
        sobolev.c_s,
        out.run.steps,
        peak / initial
    ))
}

fn criterion_8() -> Verdict {
    let dir = tempfile::tempdir().map_err(fail)?;
    let mut cfg = regime_config(dir.path(), 0.05, 1.0);
    let sobolev = resolve_sobolev(&cfg).map_err(fail)?;
    let grid = cfg.grid().map_err(fail)?;
    cfg.physics.mass = 20.0 * m_star(3, grid.total_volume(), sobolev.c_s).map_err(fail)?;
    let out = run_experiment_with(&cfg, sobolev).map_err(fail)?;
    ensure(out.run.cause == Termination::BlowupSuspected, || {
        format!("ended {}", out.run.cause)
    })?;
    let verdict = &out.run.verdict;
    ensure(verdict.reason != BlowupReason::None, || "no reason recorded".into())?;
    ensure(out.run.t < cfg.schedule.t_end, || "flag came at t_end".into())?;
    let window = cfg.blowup.window.min(verdict.sup_history.len());
    let tail = &verdict.sup_history[verdict.sup_history.len() - window..];
    ensure(tail.windows(2).all(|w| w[1].1 >= w[0].1), || {
        format!("sup not monotone: {tail:?}")
    })?;

    // The step at the flag against the first stable step. The diffusive
    // limit alone scales like sup^{-1/3}, so a thousandfold sup growth
    // shrinks it about tenfold.
    let u0 = cfg.initial_field(&grid).map_err(fail)?;
    let phi0 = solve_poisson(&u0, &grid).map_err(fail)?;
    let params = cfg.params().map_err(fail)?;
    let dt0 = stable_dt(&u0, &phi0, &params, &cfg.stepper, &grid)
        .map_err(fail)?
        .applied();
    let dt_flag = out.run.records.last().map_or(f64::NAN, |r| r.dt);
    ensure(dt_flag < 0.2 * dt0, || {
        format!("dt went from {dt0:e} only to {dt_flag:e}")
    })?;
    let (sup0, sup1) = (tail[0].1, tail[tail.len() - 1].1);
    Ok(format!(
        "flagged {} at t = {:.3e} after {} steps, sup {:.2e} -> {:.2e}, dt {:.1e} -> {:.1e}",
        verdict.reason, out.run.t, out.run.steps, sup0, sup1, dt0, dt_flag
    ))
}

fn criterion_9() -> Verdict {
    let dir = tempfile::tempdir().map_err(fail)?;
    // radius 3 slows the relaxation, so the δ-dependence survives to T = 1;
    // the mean density is half the critical value for this ball
    let text = r#"
[grid]
dimension = 3
radius = 3.0
cells = 400

[physics]
delta = 0.1
mass = 0.66

[initial]
kind = "gaussian_bump"
amplitude = 5.0
width = 0.5
background = 0.05

[stepper]
cfl_safety = 0.6

[schedule]
t_end = 1.0
sample_interval = 0.1
"#;
    let cfg = config(text, dir.path());
    let report = continuation_delta(&cfg, 0.1, 5).map_err(fail)?;
    let decay = report.average_decay.unwrap_or(0.0);
    ensure(report.aborted_at.is_none(), || "a ladder member blew up".into())?;
    ensure(report.strictly_decreasing, || {
        format!("distances {:?}", report.distances)
    })?;
    ensure(decay >= 1.3, || format!("average decay {decay}"))?;
    Ok(format!(
        "distances {}, average decay {decay:.3}",
        report
            .distances
            .iter()
            .map(|d| format!("{d:.3e}"))
            .collect::<Vec<_>>()
            .join(" ")
    ))
}

/// Fixed-step integration to `steps * dt`.
fn fixed_step_run(
    u0: &CellField,
    params: &ModelParams,
    grid: &RadialGrid,
    dt: f64,
    steps: usize,
) -> Result<CellField, String> {
    let cfg = StepperConfig::default();
    let mut u = u0.clone();
    for _ in 0..steps {
        let phi = solve_poisson(&u, grid).map_err(fail)?;
        u = advance(&u, &phi, dt, params, &cfg, grid).map_err(fail)?.0;
    }
    Ok(u)
}

fn gronwall_slope(cells: usize, interval: f64) -> Result<f64, String> {
    let grid = make_uniform_grid(3, 1.0, cells).map_err(fail)?;
    let mass = 5.0;
    let u0 = gaussian(&grid, 0.5, 0.2, mass);
    let bump = CellField::from_profile(&grid, |r| 1e-6 * (-(r - 0.5).powi(2) / 0.02).exp()).map_err(fail)?;
    let raised: Vec<f64> = u0.values().iter().zip(bump.values()).map(|(a, b)| a + b).collect();
    let u1 = normalize_to_mean(CellField::new(raised).map_err(fail)?, mass, &grid).map_err(fail)?;
    let params = ModelParams::new(3, 1e-2, mass).map_err(fail)?;
    let schedule = RunSchedule::new(0.05, interval);
    let collect = |u: &CellField| -> Result<Vec<Snapshot>, String> {
        let mut snaps = Vec::new();
        let mut sink = |s: &Sample<'_>| -> ks_critical::Result<()> {
            snaps.push(Snapshot {
                t: s.record.t,
                u: s.u.clone(),
            });
            Ok(())
        };
        run(u, &params, &fast_stepper(), &grid, &schedule, &mut sink).map_err(fail)?;
        Ok(snaps)
    };
    let (a, b) = (collect(&u0)?, collect(&u1)?);
    match gronwall_check(&a, &b, &grid, &GronwallConfig::default()).map_err(fail)? {
        GronwallReport::Growth(fit) if fit.pass && fit.fitted_slope.is_finite() => Ok(fit.fitted_slope),
        other => Err(format!("unexpected Gronwall report {other:?}")),
    }
}

fn criterion_10() -> Verdict {
    let grid = make_uniform_grid(3, 1.0, 100).map_err(fail)?;
    let mass = 5.0;
    let u0 = gaussian(&grid, 0.5, 0.2, mass);
    let params = ModelParams::new(3, 1e-2, mass).map_err(fail)?;
    let phi0 = solve_poisson(&u0, &grid).map_err(fail)?;
    let dt = 0.5
        * stable_dt(&u0, &phi0, &params, &StepperConfig::default(), &grid)
            .map_err(fail)?
            .applied();
    let steps = 200;
    let coarse = fixed_step_run(&u0, &params, &grid, dt, steps)?;
    let mid = fixed_step_run(&u0, &params, &grid, dt / 2.0, 2 * steps)?;
    let fine = fixed_step_run(&u0, &params, &grid, dt / 4.0, 4 * steps)?;
    let d1 = dual_distance(&coarse, &mid, &grid).map_err(fail)?;
    let d2 = dual_distance(&mid, &fine, &grid).map_err(fail)?;
    let order = (d1 / d2).log2();
    ensure((0.8..=1.2).contains(&order), || {
        format!("observed order {order} ({d1:e}, {d2:e})")
    })?;

    let base = gronwall_slope(100, 0.005)?;
    let refined = gronwall_slope(200, 0.005)?;
    let denser = gronwall_slope(100, 0.0025)?;
    for (label, other) in [("n -> 2n", refined), ("sampling x2", denser)] {
        ensure((other - base).abs() <= 0.1 * base.abs(), || {
            format!("slope {base} moved to {other} under {label}")
        })?;
    }
    Ok(format!(
        "dt order {order:.3}; log-distance slopes {base:.4} (n = 100), {refined:.4} (n = 200), {denser:.4} (half interval)"
    ))
}

fn criterion_11() -> Verdict {
    let gn = gn_theta(1.0, 2.0, 3).map_err(fail)?;
    ensure(gn == 0.6, || format!("gn_theta(1, 2, 3) = {gn:?}"))?;
    let app = app_theta(4.0, 4.0 / 3.0, 3).map_err(fail)?;
    ensure(app == 0.8125, || format!("app_theta(4, 4/3, 3) = {app:?}"))?;
    let mut count = 0;
    for n in 3..=10usize {
        let m = critical_exponent(n).map_err(fail)?;
        let cap = 3.0 * n as f64 / (3.0 * n as f64 + 2.0);
        for r in (0..200).map(|k| 4.0 + 0.25 * k as f64).chain([1e3, 1e6]) {
            let theta = app_theta(r, m, n).map_err(fail)?;
            ensure(theta > 0.0 && theta < 1.0 && theta <= cap, || {
                format!("app_theta({r}, {m}, {n}) = {theta} outside (0, {cap}]")
            })?;
            count += 1;
        }
    }
    Ok(format!("gn 0.6 and app 0.8125 exact, {count} lattice points in range"))
}

/// Constants calibrated on the seed-20240611 corpus (n = 200, unit ball)
/// and rounded up in the fifth digit.
const FROZEN_GN: f64 = 0.72658;
const FROZEN_POINCARE: f64 = 1.01258;

fn criterion_12() -> Verdict {
    let grid = make_uniform_grid(3, 1.0, 200).map_err(fail)?;
    let corpus = smooth_corpus(&grid, 1000, 20240611);
    let gn = audit_gn(&corpus, 1.0, 2.0, FROZEN_GN, &grid).map_err(fail)?;
    let poincare = audit_poincare(&corpus, 0.5, FROZEN_POINCARE, &grid).map_err(fail)?;
    let gn_pass = gn.iter().filter(|r| r.pass).count();
    let poincare_pass = poincare.iter().filter(|r| r.pass).count();
    ensure(gn_pass == 1000 && poincare_pass == 1000, || {
        format!("gn {gn_pass}/1000, poincare {poincare_pass}/1000")
    })?;
    // the literals still bound a fresh calibration
    let gn_fresh = calibrate_gn(&corpus, 1.0, 2.0, &grid).map_err(fail)?;
    let poincare_fresh = calibrate_poincare(&corpus, 0.5, &grid).map_err(fail)?;
    ensure(gn_fresh <= FROZEN_GN && poincare_fresh <= FROZEN_POINCARE, || {
        format!("calibration moved: {gn_fresh}, {poincare_fresh}")
    })?;

    let mut worst = 0.0f64;
    for lambda in [1e-3, 0.5, 7.0, 1e4] {
        let scaled: Vec<Vec<f64>> = corpus.iter().map(|f| f.iter().map(|v| lambda * v).collect()).collect();
        let again = audit_gn(&scaled, 1.0, 2.0, FROZEN_GN, &grid).map_err(fail)?;
        for (a, b) in gn.iter().zip(&again) {
            worst = worst.max((a.ratio - b.ratio).abs() / a.ratio);
        }
    }
    ensure(worst <= 1e-12, || format!("GN ratio moved by {worst:e} under scaling"))?;
    Ok(format!(
        "2000/2000 audits pass, scaling changes GN ratios by at most {worst:.1e}"
    ))
}

#[test]
fn acceptance_criteria() {
    let only: Option<Vec<usize>> = std::env::var("KS_ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|k| k.trim().parse().ok()).collect());
    let wanted = |k: usize| only.as_ref().map_or(true, |list| list.contains(&k));

    let shared = if wanted(1) || wanted(3) {
        long_run()
    } else {
        Err("not run".into())
    };
    let criteria: Vec<(usize, &str, Box<dyn Fn() -> Verdict + '_>)> = vec![
        (1, "mass conservation", Box::new(|| criterion_1(&shared))),
        (2, "positivity", Box::new(criterion_2)),
        (3, "Liapunov dissipation", Box::new(|| criterion_3(&shared))),
        (4, "entropy density bounds", Box::new(criterion_4)),
        (5, "threshold formula", Box::new(criterion_5)),
        (6, "Poisson manufactured solution", Box::new(criterion_6)),
        (7, "subcritical boundedness", Box::new(criterion_7)),
        (8, "supercritical growth", Box::new(criterion_8)),
        (9, "delta continuation", Box::new(criterion_9)),
        (10, "uniqueness and Gronwall", Box::new(criterion_10)),
        (11, "exponent formulas", Box::new(criterion_11)),
        (12, "inequality audits", Box::new(criterion_12)),
    ];

    report("");
    let mut failed = Vec::new();
    for (k, name, check) in &criteria {
        if !wanted(*k) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| check()))
            .unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => report(&format!("[PASS] {k:>2} {name} ({secs:.1} s): {detail}")),
            Err(detail) => {
                report(&format!("[FAIL] {k:>2} {name} ({secs:.1} s): {detail}"));
                failed.push(*k);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
