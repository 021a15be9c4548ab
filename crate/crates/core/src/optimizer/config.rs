use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::localmove::AngleMode;

/// Default population size. The method does not pin one down; small
/// populations suit a search that follows a single attractor.
pub const DEFAULT_NP: usize = 20;

/// Restart parameters `(pb, lb, c)` for a problem of dimension `d`.
pub fn default_params(d: usize) -> (u64, u64, usize) {
    if d < 45 {
        (50, 10, 5)
    } else {
        (25, 5, 10)
    }
}

/// Reported energies are compared against a target at the printed precision
/// of four decimals: a run hits when it rounds to the target or better.
pub const TARGET_SLACK: f64 = 5e-5;

#[inline]
pub fn hits_target(reported: f64, target: f64) -> bool {
    reported >= target - TARGET_SLACK
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ablation {
    pub local_search: bool,
    pub component_reinit: bool,
    pub temporal_locality: bool,
}

impl Default for Ablation {
    fn default() -> Self {
        Self { local_search: true, component_reinit: true, temporal_locality: true }
    }
}

impl Ablation {
    /// No local search (the `cr` variant).
    pub fn without_local_search() -> Self {
        Self { local_search: false, ..Self::default() }
    }

    /// No component reinitialization: every restart is random (the `ls` variant).
    pub fn without_component_reinit() -> Self {
        Self { component_reinit: false, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Stopping {
    /// Maximum number of solution evaluations.
    pub nse_limit: Option<u64>,
    /// Wall-clock limit in seconds, checked once per generation.
    pub time_limit: Option<f64>,
    /// Reported (negated) energy at which the run stops.
    pub target: Option<f64>,
}

impl Stopping {
    pub fn nse(limit: u64) -> Self {
        Self { nse_limit: Some(limit), ..Self::default() }
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.target = Some(target);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.nse_limit.is_none() && self.time_limit.is_none() && self.target.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub np: usize,
    /// Best-population stagnation multiplier; `None` uses [`default_params`].
    pub pb: Option<u64>,
    /// Local-best stagnation multiplier.
    pub lb: Option<u64>,
    /// Components redrawn by a component reinitialization.
    pub c: Option<usize>,
    pub seed: u64,
    pub stopping: Stopping,
    pub ablation: Ablation,
    pub angle_mode: AngleMode,
    /// Record `(nse, seconds, best)` whenever the global best improves.
    pub trace: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            np: DEFAULT_NP,
            pb: None,
            lb: None,
            c: None,
            seed: 0,
            stopping: Stopping::default(),
            ablation: Ablation::default(),
            angle_mode: AngleMode::Offset,
            trace: false,
        }
    }
}

/// Restart parameters after applying defaults for a given dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RestartParams {
    pub pb: u64,
    pub lb: u64,
    pub c: usize,
}

impl OptimizerConfig {
    pub fn with_stopping(mut self, stopping: Stopping) -> Self {
        self.stopping = stopping;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn restart_params(&self, d: usize) -> RestartParams {
        let (pb, lb, c) = default_params(d);
        RestartParams { pb: self.pb.unwrap_or(pb), lb: self.lb.unwrap_or(lb), c: self.c.unwrap_or(c) }
    }

    pub fn validate(&self, d: usize) -> Result<RestartParams> {
        if self.np < 4 {
            return Err(Error::Config(format!("population size {} is below 4", self.np)));
        }
        let p = self.restart_params(d);
        if p.pb == 0 || p.lb == 0 || p.c == 0 {
            return Err(Error::Config("pb, lb and c must be positive".into()));
        }
        if p.c > d {
            return Err(Error::Config(format!("c = {} exceeds the dimension {d}", p.c)));
        }
        if self.stopping.is_empty() {
            return Err(Error::Config("no stopping criterion given".into()));
        }
        if let Some(t) = self.stopping.time_limit {
            if t.is_nan() || t < 0.0 {
                return Err(Error::Config(format!("invalid time limit {t}")));
            }
        }
        if let Some(t) = self.stopping.target {
            if !t.is_finite() {
                return Err(Error::Config(format!("invalid target {t}")));
            }
        }
        Ok(p)
    }
}
