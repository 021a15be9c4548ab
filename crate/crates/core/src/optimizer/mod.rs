//! Self-adaptive DE/best/1/bin with temporal locality, local search on the
//! best population individual and a two-tier restart scheme.
//!
//! # Evaluation accounting
//!
//! Every energy evaluation counts as one solution evaluation (NSE), and so
//! does every local move proposal, feasible or not. Reinitialization
//! re-evaluates the whole population. The NSE limit and the target are
//! checked after every single evaluation; only the initial population is
//! evaluated as an uninterruptible batch, so a run ends with
//! `nse <= max(limit, Np)`.
//!
//! # Stagnation bookkeeping
//!
//! The best population individual counts as changed only when its energy
//! strictly improves; the run then remembers the NSE at which that
//! happened. A restart fires once `pb * D` evaluations have passed without
//! such an improvement. Consecutive restarts that fail to strictly improve
//! the local best are counted; after `lb * D` of them the restart is random
//! instead of component-wise.

mod config;

use std::f64::consts::PI;
use std::time::Instant;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use config::{
    default_params, hits_target, Ablation, OptimizerConfig, RestartParams, Stopping, DEFAULT_NP,
    TARGET_SLACK,
};

use crate::error::Result;
use crate::localmove::{commit_move, delta_energy, move_geometry_into, LocalMoveProposal, MoveOutcome};
use crate::model::{reported_energy, Chain, Conformation, EnergyModel, Sequence};

pub type Rng64 = ChaCha8Rng;

/// Wraps a DE component back into `(-pi, pi]` with a single shift.
#[inline]
pub fn wrap_angle(u: f64) -> f64 {
    let mut u = u;
    if u <= -PI {
        u += 2.0 * PI;
    }
    if u > PI {
        u -= 2.0 * PI;
    }
    u
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub x: Vec<f64>,
    pub f: f64,
    pub cr: f64,
    /// Raw energy of `x`.
    pub e: f64,
}

/// jDE control parameters for one trial.
///
/// Each parameter is regenerated with probability 0.1 and inherited
/// otherwise. The caller writes them back only if the trial survives.
pub fn jde_sample<R: Rng + ?Sized>(ind: &Individual, rng: &mut R) -> (f64, f64) {
    let f = if rng.random::<f64>() < 0.1 { 0.1 + 0.9 * rng.random::<f64>() } else { ind.f };
    let cr = if rng.random::<f64>() < 0.1 { rng.random::<f64>() } else { ind.cr };
    (f, cr)
}

/// Mutant component `wrap(best + f * (r1 - r2))`.
#[inline]
pub fn mutant_component(best: f64, r1: f64, r2: f64, f: f64) -> f64 {
    wrap_angle(best + f * (r1 - r2))
}

/// Second trial component `wrap(best + 0.5 * (u - x))`.
#[inline]
pub fn temporal_component(best: f64, u: f64, x: f64) -> f64 {
    wrap_angle(best + 0.5 * (u - x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    NseLimit,
    TimeLimit,
    Target,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub nse: u64,
    pub seconds: f64,
    /// Best reported energy so far.
    pub best: f64,
}

/// Outcome of a single optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub best: Conformation,
    pub best_raw: f64,
    pub best_reported: f64,
    pub nse: u64,
    pub seconds: f64,
    pub stop: StopReason,
    pub hit: Option<bool>,
    pub generations: u64,
    pub restarts: RestartCounts,
    pub trace: Vec<TracePoint>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestartCounts {
    pub component: u64,
    pub random: u64,
}

/// The run state of one optimizer instance.
pub struct Optimizer {
    model: EnergyModel,
    config: OptimizerConfig,
    params: RestartParams,
    dim: usize,
    rng: Rng64,

    population: Vec<Individual>,
    /// Index of the best population individual; local search edits it in place.
    best_idx: usize,
    best_chain: Chain,
    /// Best-population energy at its last strict improvement.
    best_record: f64,
    best_improved_at: u64,

    local_best: Individual,
    local_stall: u64,

    global_best: Vec<f64>,
    global_energy: f64,

    nse: u64,
    stop: Option<StopReason>,
    start: Instant,
    generations: u64,
    restarts: RestartCounts,
    trace: Vec<TracePoint>,
    outcome_buf: MoveOutcome,
    trial_buf: Vec<f64>,
}

impl Optimizer {
    /// Validates the configuration and evaluates a random initial population.
    pub fn new(seq: &Sequence, config: OptimizerConfig) -> Result<Self> {
        let dim = seq.dimension();
        let params = config.validate(dim)?;
        let model = EnergyModel::new(seq);
        let rng = Rng64::seed_from_u64(config.seed);
        let placeholder = Chain::from_angles(&model, vec![0.0; dim]);
        let np = config.np;
        let mut opt = Self {
            model,
            params,
            dim,
            rng,
            population: Vec::with_capacity(np),
            best_idx: 0,
            best_chain: placeholder,
            best_record: f64::INFINITY,
            best_improved_at: 0,
            local_best: Individual { x: vec![0.0; dim], f: 0.5, cr: 0.9, e: f64::INFINITY },
            local_stall: 0,
            global_best: vec![0.0; dim],
            global_energy: f64::INFINITY,
            nse: 0,
            stop: None,
            start: Instant::now(),
            generations: 0,
            restarts: RestartCounts::default(),
            trace: Vec::new(),
            outcome_buf: MoveOutcome::default(),
            trial_buf: vec![0.0; dim],
            config,
        };
        opt.init_population();
        Ok(opt)
    }

    fn random_vector(&mut self) -> Vec<f64> {
        (0..self.dim).map(|_| -PI + 2.0 * PI * self.rng.random::<f64>()).collect()
    }

    fn init_population(&mut self) {
        for _ in 0..self.config.np {
            let x = self.random_vector();
            let e = self.model.evaluate(&x);
            self.count(e, &x);
            self.population.push(Individual { x, f: 0.5, cr: 0.9, e });
        }
        self.select_best_population();
        self.best_record = self.population[self.best_idx].e;
        self.best_improved_at = self.nse;
        self.local_best = self.population[self.best_idx].clone();
    }

    /// Books one evaluation and updates the global best and stop flag.
    #[inline]
    fn count(&mut self, e: f64, x: &[f64]) {
        self.nse += 1;
        if e < self.global_energy {
            self.global_energy = e;
            self.global_best.copy_from_slice(x);
            if self.config.trace {
                self.trace.push(TracePoint {
                    nse: self.nse,
                    seconds: self.start.elapsed().as_secs_f64(),
                    best: reported_energy(e),
                });
            }
        }
        self.check_budget();
    }

    #[inline]
    fn check_budget(&mut self) {
        let s = &self.config.stopping;
        if let Some(t) = s.target {
            if hits_target(reported_energy(self.global_energy), t) {
                self.stop = Some(StopReason::Target);
                return;
            }
        }
        if let Some(limit) = s.nse_limit {
            if self.nse >= limit {
                self.stop = Some(StopReason::NseLimit);
            }
        }
    }

    fn select_best_population(&mut self) {
        let mut best = self.best_idx.min(self.population.len() - 1);
        for (i, ind) in self.population.iter().enumerate() {
            if ind.e < self.population[best].e {
                best = i;
            }
        }
        self.best_idx = best;
        self.best_chain = Chain::from_angles(&self.model, self.population[best].x.clone());
    }

    pub fn population(&self) -> &[Individual] {
        &self.population
    }

    pub fn best_population(&self) -> &Individual {
        &self.population[self.best_idx]
    }

    pub fn best_chain(&self) -> &Chain {
        &self.best_chain
    }

    pub fn local_best(&self) -> &Individual {
        &self.local_best
    }

    pub fn global_best(&self) -> (&[f64], f64) {
        (&self.global_best, self.global_energy)
    }

    pub fn nse(&self) -> u64 {
        self.nse
    }

    pub fn restart_params(&self) -> RestartParams {
        self.params
    }

    pub fn rng_mut(&mut self) -> &mut Rng64 {
        &mut self.rng
    }

    pub fn stopped(&self) -> Option<StopReason> {
        self.stop
    }

    /// DE/best/1/bin trial for individual `i`, written into `trial`.
    pub fn mutate_crossover(&mut self, i: usize, f: f64, cr: f64, trial: &mut Vec<f64>) {
        let np = self.population.len();
        let r1 = loop {
            let r = self.rng.random_range(0..np);
            if r != i {
                break r;
            }
        };
        let r2 = loop {
            let r = self.rng.random_range(0..np);
            if r != i && r != r1 {
                break r;
            }
        };
        let j_rand = self.rng.random_range(0..self.dim);
        let best = &self.population[self.best_idx].x;
        let (xr1, xr2, xi) = (&self.population[r1].x, &self.population[r2].x, &self.population[i].x);
        trial.clear();
        for j in 0..self.dim {
            if self.rng.random::<f64>() < cr || j == j_rand {
                trial.push(mutant_component(best[j], xr1[j], xr2[j], f));
            } else {
                trial.push(xi[j]);
            }
        }
    }

    /// One trial, selection and (on improvement) local search for individual `i`.
    fn step_individual(&mut self, i: usize) {
        let (f, cr) = jde_sample(&self.population[i], &mut self.rng);
        let mut trial = std::mem::take(&mut self.trial_buf);
        self.mutate_crossover(i, f, cr, &mut trial);
        let e_u = self.model.evaluate(&trial);
        self.count(e_u, &trial);
        if self.stop.is_some() || e_u > self.population[i].e {
            self.trial_buf = trial;
            return;
        }
        let adopted = self.temporal_locality(i, trial, e_u, f, cr);
        self.trial_buf = adopted;
        if self.stop.is_some() {
            return;
        }
        if self.config.ablation.local_search {
            self.local_search(i);
        }
    }

    /// Replaces individual `i` by the better of the trial and its
    /// temporal-locality companion; returns the discarded buffer.
    fn temporal_locality(&mut self, i: usize, trial: Vec<f64>, e_u: f64, f: f64, cr: f64) -> Vec<f64> {
        let (mut x, mut e) = (trial, e_u);
        if self.config.ablation.temporal_locality {
            let best = &self.population[self.best_idx].x;
            let xi = &self.population[i].x;
            let star: Vec<f64> =
                (0..self.dim).map(|j| temporal_component(best[j], x[j], xi[j])).collect();
            let e_star = self.model.evaluate(&star);
            self.count(e_star, &star);
            if e_star <= e {
                x = star;
                e = e_star;
            }
        }
        let ind = &mut self.population[i];
        let old = std::mem::replace(&mut ind.x, x);
        ind.e = e;
        ind.f = f;
        ind.cr = cr;
        if i == self.best_idx {
            self.best_chain = Chain::from_angles(&self.model, self.population[i].x.clone());
        }
        old
    }

    /// Local moves on the best population individual guided by individual `i`.
    pub fn local_search(&mut self, i: usize) {
        let length = self.model.length();
        let mut outcome = std::mem::take(&mut self.outcome_buf);
        for n in 2..length {
            let theta_idx = n - 2;
            let beta_idx = n + length - 5;
            let (r1, r2): (f64, f64) = (self.rng.random(), self.rng.random());
            let xb = self.best_chain.angles();
            let xi = &self.population[i].x;
            let proposal =
                LocalMoveProposal::new(n, r1 * (xb[theta_idx] - xi[theta_idx]), r2 * (xb[beta_idx] - xi[beta_idx]));
            move_geometry_into(&self.best_chain, proposal, self.config.angle_mode, &mut outcome)
                .expect("pivot range is valid by construction");
            let mut accepted = false;
            let mut e_v = f64::INFINITY;
            if outcome.feasible {
                e_v = delta_energy(&self.model, &self.best_chain, &mut outcome)
                    .expect("feasible outcome on a matching chain");
                if e_v <= self.best_chain.energy() {
                    commit_move(&mut self.best_chain, &outcome).expect("evaluated feasible outcome");
                    let best = &mut self.population[self.best_idx];
                    for &(idx, value) in outcome.angle_updates() {
                        best.x[idx] = value;
                    }
                    best.e = e_v;
                    if e_v < self.best_record {
                        self.best_record = e_v;
                        self.best_improved_at = self.nse + 1;
                    }
                    accepted = true;
                }
            }
            if accepted {
                // Borrow dance: count() needs &mut self and the angles.
                let x = std::mem::take(&mut self.population[self.best_idx].x);
                self.count(e_v, &x);
                self.population[self.best_idx].x = x;
            } else {
                self.nse += 1;
                self.check_budget();
            }
            if self.stop.is_some() {
                break;
            }
        }
        self.outcome_buf = outcome;
    }

    /// End-of-generation restart logic.
    pub fn reinitialize(&mut self) {
        let threshold = self.params.pb * self.dim as u64;
        if self.nse - self.best_improved_at < threshold {
            return;
        }
        let bp = &self.population[self.best_idx];
        let mut improved = false;
        if bp.e <= self.local_best.e {
            improved = bp.e < self.local_best.e;
            self.local_best = bp.clone();
        }
        if improved {
            self.local_stall = 0;
        } else {
            self.local_stall += 1;
        }

        let random = !self.config.ablation.component_reinit
            || self.local_stall >= self.params.lb * self.dim as u64;
        if random {
            self.restarts.random += 1;
            for i in 0..self.population.len() {
                let x = self.random_vector();
                self.replace_and_evaluate(i, x);
                if self.stop.is_some() {
                    return;
                }
            }
        } else {
            self.restarts.component += 1;
            let c = self.params.c;
            for i in 0..self.population.len() {
                let mut x = self.local_best.x.clone();
                for j in index::sample(&mut self.rng, self.dim, c) {
                    x[j] = -PI + 2.0 * PI * self.rng.random::<f64>();
                }
                self.replace_and_evaluate(i, x);
                if self.stop.is_some() {
                    return;
                }
            }
        }

        self.select_best_population();
        self.best_record = self.population[self.best_idx].e;
        self.best_improved_at = self.nse;
        if random {
            self.local_best = self.population[self.best_idx].clone();
            self.local_stall = 0;
        }
    }

    fn replace_and_evaluate(&mut self, i: usize, x: Vec<f64>) {
        let e = self.model.evaluate(&x);
        self.count(e, &x);
        let ind = &mut self.population[i];
        ind.x = x;
        ind.e = e;
    }

    /// Runs one generation. Returns `false` once a stopping condition holds.
    pub fn step_generation(&mut self) -> bool {
        if self.stop.is_some() {
            return false;
        }
        for i in 0..self.population.len() {
            self.step_individual(i);
            if self.stop.is_some() {
                return false;
            }
        }
        self.generations += 1;

        let prev = self.best_idx;
        let mut best = prev;
        for (i, ind) in self.population.iter().enumerate() {
            if ind.e < self.population[best].e {
                best = i;
            }
        }
        if best != prev {
            self.best_idx = best;
            self.best_chain = Chain::from_angles(&self.model, self.population[best].x.clone());
        }
        let e = self.population[best].e;
        if e < self.best_record {
            self.best_record = e;
            self.best_improved_at = self.nse;
        }

        self.reinitialize();
        if self.stop.is_some() {
            return false;
        }
        if let Some(limit) = self.config.stopping.time_limit {
            if self.start.elapsed().as_secs_f64() >= limit {
                self.stop = Some(StopReason::TimeLimit);
                return false;
            }
        }
        true
    }

    /// Runs to completion and reports the global best.
    pub fn run(mut self) -> RunOutcome {
        if self.stop.is_none() {
            if let Some(limit) = self.config.stopping.time_limit {
                if limit <= 0.0 {
                    self.stop = Some(StopReason::TimeLimit);
                }
            }
        }
        while self.step_generation() {}
        self.finish()
    }

    fn finish(self) -> RunOutcome {
        let seconds = self.start.elapsed().as_secs_f64().max(1e-9);
        let best_reported = reported_energy(self.global_energy);
        RunOutcome {
            best: Conformation::new(self.model.length(), self.global_best).expect("angles stay wrapped"),
            best_raw: self.global_energy,
            best_reported,
            nse: self.nse,
            seconds,
            stop: self.stop.unwrap_or(StopReason::NseLimit),
            hit: self.config.stopping.target.map(|t| hits_target(best_reported, t)),
            generations: self.generations,
            restarts: self.restarts,
            trace: self.trace,
        }
    }
}

/// Runs the optimizer on `seq` with `config`.
pub fn run(seq: &Sequence, config: &OptimizerConfig) -> Result<RunOutcome> {
    Ok(Optimizer::new(seq, config.clone())?.run())
}

#[cfg(test)]
mod tests;
