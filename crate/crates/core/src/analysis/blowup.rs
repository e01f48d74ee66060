//! Heuristic blow-up verdicts: a time step pinned at its floor, or a sup
//! norm that has grown by a large factor and is still rising.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::diagnostics::DiagnosticsRecord;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlowupConfig {
    /// Consecutive steps (or records) that must agree before flagging.
    pub window: usize,
    /// Sup-norm growth factor relative to the initial sup norm.
    pub growth_factor: f64,
}

impl Default for BlowupConfig {
    fn default() -> Self {
        Self {
            window: 10,
            growth_factor: 1e3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlowupReason {
    None,
    DtCollapse,
    SupGrowth,
}

impl std::fmt::Display for BlowupReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BlowupReason::None => "none",
            BlowupReason::DtCollapse => "dt_collapse",
            BlowupReason::SupGrowth => "sup_growth",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupVerdict {
    pub flagged: bool,
    pub reason: BlowupReason,
    pub t_flag: Option<f64>,
    /// `(t, ‖u‖_∞)` at the sampled times.
    pub sup_history: Vec<(f64, f64)>,
}

/// Streaming detector fed once per step.
#[derive(Debug, Clone)]
pub struct BlowupMonitor {
    cfg: BlowupConfig,
    initial_sup: f64,
    floor_streak: usize,
    recent: VecDeque<f64>,
    reason: BlowupReason,
    t_flag: Option<f64>,
    sup_history: Vec<(f64, f64)>,
}

impl BlowupMonitor {
    pub fn new(cfg: BlowupConfig, initial_sup: f64) -> Self {
        Self {
            cfg,
            initial_sup,
            floor_streak: 0,
            recent: VecDeque::with_capacity(cfg.window.max(1) + 1),
            reason: BlowupReason::None,
            t_flag: None,
            sup_history: Vec::new(),
        }
    }

    /// Feeds one step. `at_floor` marks a step limited by the `dt_min`
    /// sentinel. Returns true once the verdict is flagged.
    pub fn observe(&mut self, t: f64, _dt: f64, at_floor: bool, sup: f64) -> bool {
        if self.reason != BlowupReason::None {
            return true;
        }
        let window = self.cfg.window.max(1);
        self.floor_streak = if at_floor { self.floor_streak + 1 } else { 0 };
        self.recent.push_back(sup);
        if self.recent.len() > window {
            self.recent.pop_front();
        }

        if self.floor_streak >= window {
            self.flag(BlowupReason::DtCollapse, t, sup);
        } else if sup > self.cfg.growth_factor * self.initial_sup
            && self.recent.len() == window
            && self.recent.iter().zip(self.recent.iter().skip(1)).all(|(a, b)| b >= a)
            && self.recent.back() > self.recent.front()
        {
            self.flag(BlowupReason::SupGrowth, t, sup);
        }
        self.reason != BlowupReason::None
    }

    fn flag(&mut self, reason: BlowupReason, t: f64, sup: f64) {
        self.reason = reason;
        self.t_flag = Some(t);
        self.note_sample(t, sup);
    }

    pub fn note_sample(&mut self, t: f64, sup: f64) {
        if self.sup_history.last().map_or(true, |&(last, _)| last != t) {
            self.sup_history.push((t, sup));
        }
    }

    pub fn verdict(&self) -> BlowupVerdict {
        BlowupVerdict {
            flagged: self.reason != BlowupReason::None,
            reason: self.reason,
            t_flag: self.t_flag,
            sup_history: self.sup_history.clone(),
        }
    }
}

/// Verdict over a recorded series: a record counts as at the floor when its
/// step equals `dt_min` (up to round-off).
pub fn blowup_detector(history: &[DiagnosticsRecord], cfg: &BlowupConfig, dt_min: f64) -> BlowupVerdict {
    let initial = history.first().map_or(0.0, |r| r.linf);
    let mut monitor = BlowupMonitor::new(*cfg, initial);
    for (k, rec) in history.iter().enumerate() {
        monitor.note_sample(rec.t, rec.linf);
        if k == 0 {
            continue;
        }
        let at_floor = rec.dt <= dt_min * (1.0 + 1e-12);
        if monitor.observe(rec.t, rec.dt, at_floor, rec.linf) {
            break;
        }
    }
    monitor.verdict()
}
