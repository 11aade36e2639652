//! Monte Carlo fleets run by competing decision rules on common draws.
//!
//! Every bus gets its own generator. Each month it draws one shock per action
//! and one uniform for the mileage jump, and every candidate rule sees the
//! same three numbers, so rules that agree produce identical histories.

use rand::RngExt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::seed;
use crate::zurcher::{mean_zero_gumbel, ChoiceProbabilities, JumpLaw, ZurcherConfig};
use crate::{Error, Result};

/// Buses are reduced in fixed blocks so sums never depend on thread count.
const BLOCK: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FleetSimConfig {
    pub n_buses: usize,
    pub n_months: usize,
    pub seed: u64,
    /// Scale of the extreme-value shocks.
    pub shock_scale: f64,
    pub initial_state: usize,
    /// Buses whose full state and action history is kept.
    pub recorded_buses: usize,
}

impl Default for FleetSimConfig {
    fn default() -> Self {
        Self {
            n_buses: 1_000,
            n_months: 100_000,
            seed: 0,
            shock_scale: 1.0,
            initial_state: 0,
            recorded_buses: 3,
        }
    }
}

impl FleetSimConfig {
    pub fn validate(&self, config: &ZurcherConfig) -> Result<()> {
        if self.n_months == 0 {
            return Err(Error::InvalidArgument("simulation horizon must be at least one month".into()));
        }
        if self.n_buses == 0 {
            return Err(Error::InvalidArgument("fleet needs at least one bus".into()));
        }
        if !(self.shock_scale > 0.0 && self.shock_scale.is_finite()) {
            return Err(Error::InvalidArgument(format!("shock scale {} must be positive", self.shock_scale)));
        }
        if self.initial_state >= config.n_states {
            return Err(Error::InvalidArgument(format!("initial state {} outside the grid", self.initial_state)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    /// Mileage state at the start of each month.
    pub states: Vec<usize>,
    pub replaced: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FleetPaths {
    /// Fleet mean of discounted utility accumulated through each month,
    /// `[candidate][month]`.
    pub mean_path: Vec<Vec<f64>>,
    /// Total discounted utility of each bus, `[candidate][bus]`.
    pub bus_totals: Vec<Vec<f64>>,
    /// Standard error of the fleet mean total.
    pub std_error: Vec<f64>,
    /// `[candidate][recorded bus]`
    pub trajectories: Vec<Vec<Trajectory>>,
}

impl FleetPaths {
    pub fn mean_total(&self, candidate: usize) -> f64 {
        *self.mean_path[candidate].last().expect("non-empty horizon")
    }
}

struct BlockResult {
    path_sums: Vec<Vec<f64>>,
    totals: Vec<Vec<f64>>,
    trajectories: Vec<Vec<Trajectory>>,
}

pub fn simulate_fleet(
    config: &ZurcherConfig,
    rules: &[ChoiceProbabilities],
    truth: &JumpLaw,
    sim: &FleetSimConfig,
) -> Result<FleetPaths> {
    config.validate()?;
    sim.validate(config)?;
    if rules.is_empty() {
        return Err(Error::InvalidArgument("no decision rules to simulate".into()));
    }
    let n = config.n_states;
    for rule in rules {
        if rule.maintain_value.len() != n || rule.replace_value.len() != n {
            return Err(Error::SupportMismatch {
                left: rule.maintain_value.len(),
                right: n,
            });
        }
    }
    for x in 0..n {
        if truth.at(x).support_size() != config.max_jump + 1 {
            return Err(Error::SupportMismatch {
                left: truth.at(x).support_size(),
                right: config.max_jump + 1,
            });
        }
    }
    let k = rules.len();
    let months = sim.n_months;
    let buses: Vec<usize> = (0..sim.n_buses).collect();
    let blocks: Vec<BlockResult> = buses
        .par_chunks(BLOCK)
        .map(|chunk| {
            let mut path_sums = vec![vec![0.0; months]; k];
            let mut totals = vec![Vec::with_capacity(chunk.len()); k];
            let mut trajectories = vec![Vec::new(); k];
            let mut total = vec![0.0; k];
            let mut state = vec![0usize; k];
            for &bus in chunk {
                let mut rng = seed::cell_rng(sim.seed, &[bus as u64]);
                let record = bus < sim.recorded_buses;
                let mut history = vec![Trajectory::default(); if record { k } else { 0 }];
                total.fill(0.0);
                state.fill(sim.initial_state);
                let mut discount = 1.0;
                #[allow(clippy::needless_range_loop)]
                for month in 0..months {
                    let e0 = sim.shock_scale * mean_zero_gumbel(&mut rng);
                    let e1 = sim.shock_scale * mean_zero_gumbel(&mut rng);
                    let u: f64 = rng.random();
                    for c in 0..k {
                        let x = state[c];
                        let replace = rules[c].replaces(x, e0, e1);
                        let reward = config.utility(x, replace) + if replace { e1 } else { e0 };
                        total[c] += discount * reward;
                        path_sums[c][month] += total[c];
                        if record {
                            history[c].states.push(x);
                            history[c].replaced.push(replace);
                        }
                        let from = if replace { 0 } else { x };
                        state[c] = config.destination(from, truth.at(from).quantile_index(u));
                    }
                    discount *= config.discount;
                }
                for (t, &v) in totals.iter_mut().zip(&total) {
                    t.push(v);
                }
                if record {
                    for (c, h) in history.into_iter().enumerate() {
                        trajectories[c].push(h);
                    }
                }
            }
            BlockResult {
                path_sums,
                totals,
                trajectories,
            }
        })
        .collect();

    let mut mean_path = vec![vec![0.0; months]; k];
    let mut bus_totals = vec![Vec::with_capacity(sim.n_buses); k];
    let mut trajectories = vec![Vec::new(); k];
    for block in blocks {
        for (path, sums) in mean_path.iter_mut().zip(&block.path_sums) {
            for (m, s) in path.iter_mut().zip(sums) {
                *m += s;
            }
        }
        for (c, (t, h)) in block.totals.into_iter().zip(block.trajectories).enumerate() {
            bus_totals[c].extend(t);
            trajectories[c].extend(h);
        }
    }
    let count = sim.n_buses as f64;
    for path in &mut mean_path {
        path.iter_mut().for_each(|m| *m /= count);
    }
    let std_error = bus_totals
        .iter()
        .map(|t| {
            if t.len() < 2 {
                return f64::NAN;
            }
            let mean = t.iter().sum::<f64>() / count;
            let var = t.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1.0);
            (var / count).sqrt()
        })
        .collect();
    Ok(FleetPaths {
        mean_path,
        bus_totals,
        std_error,
        trajectories,
    })
}
