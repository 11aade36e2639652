//! Ex-ante comparison of confidence levels across possible true laws.
//!
//! For each interior point `p0` of a simplex grid, samples of monthly jumps
//! are drawn from `p0`, rules are solved on each sample's estimate at every
//! confidence level, and each rule is scored under `p0` itself. The scores,
//! averaged over samples, form a [`PerformanceSurface`] for the criteria.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{exact_performance, simulate_fleet, Evaluation, Preset};
use crate::criteria::PerformanceSurface;
use crate::simplex::{build_simplex_grid, multinomial_sample_with, Distribution};
use crate::zurcher::{solve_rule, solve_rule_from, ChoiceProbabilities, JumpLaw, ZurcherConfig};
use crate::{seed, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExAnteConfig {
    /// Number of jump sizes, `0..dim` bins.
    pub dim: usize,
    pub increment: f64,
    pub samples_per_point: usize,
    pub draws_per_sample: u64,
    pub omega_grid: Vec<f64>,
    pub evaluation: Evaluation,
    pub seed: u64,
    pub kappa: f64,
}

fn tenths() -> Vec<f64> {
    (0..=10).map(|i| f64::from(i) / 10.0).collect()
}

impl ExAnteConfig {
    pub fn preset(preset: Preset) -> Self {
        match preset {
            Preset::Desk => Self {
                dim: 3,
                increment: 0.2,
                samples_per_point: 20,
                draws_per_sample: 55,
                omega_grid: tenths(),
                evaluation: Evaluation::Exact,
                seed: 0,
                kappa: 1e-8,
            },
            Preset::Paper => Self {
                dim: 3,
                increment: 0.1,
                samples_per_point: 100,
                draws_per_sample: 55,
                omega_grid: tenths(),
                evaluation: Evaluation::Exact,
                seed: 0,
                kappa: 1e-8,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.omega_grid.is_empty() || self.omega_grid.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(Error::InvalidArgument("confidence grid must be non-empty and within [0, 1]".into()));
        }
        if self.samples_per_point == 0 || self.draws_per_sample == 0 {
            return Err(Error::InvalidArgument("samples and draws must be positive".into()));
        }
        if !(self.kappa > 0.0) {
            return Err(Error::InvalidArgument(format!("kappa {} must be positive", self.kappa)));
        }
        build_simplex_grid(self.dim, self.increment).map(|_| ())
    }

    /// The model used inside the sweep: jumps span the simplex and every
    /// estimate rests on one sample.
    pub fn model(&self, config: &ZurcherConfig) -> ZurcherConfig {
        ZurcherConfig {
            max_jump: self.dim - 1,
            pooled_n_obs: self.draws_per_sample,
            ..config.clone()
        }
    }
}

/// A cell whose solve or evaluation failed; it is left out of the average.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub point: usize,
    pub sample: usize,
    pub omega: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExAnteResult {
    /// Candidates are the confidence levels, points the grid laws.
    pub surface: PerformanceSurface,
    /// The single law generating every sample at each grid point.
    pub truths: Vec<Distribution>,
    pub failures: Vec<CellFailure>,
}

/// Jump counts of one sample at one grid point.
pub fn sample_counts(cfg: &ExAnteConfig, point: usize, sample: usize, truth: &Distribution) -> Vec<u64> {
    let mut rng = seed::cell_rng(cfg.seed, &[point as u64, sample as u64]);
    multinomial_sample_with(truth, cfg.draws_per_sample, &mut rng)
}

/// Scores of the rules solved on `counts` at every confidence level, under
/// the pooled law `truth`. Solves reuse the previous level's solution as a
/// starting point.
pub fn ex_ante_cell(
    cfg: &ExAnteConfig,
    model: &ZurcherConfig,
    truth: &Distribution,
    counts: &[u64],
    coords: (usize, usize),
) -> Vec<std::result::Result<f64, String>> {
    let estimate = match Distribution::from_counts(counts) {
        Ok(e) => e,
        Err(e) => return vec![Err(e.to_string()); cfg.omega_grid.len()],
    };
    let law = JumpLaw::Pooled(truth.clone());
    let mut warm: Option<Vec<f64>> = None;
    let mut rules: Vec<std::result::Result<ChoiceProbabilities, String>> = Vec::new();
    for &omega in &cfg.omega_grid {
        match solve_rule_from(&model.with_confidence(omega), &estimate, cfg.kappa, warm.as_deref()) {
            Ok(rule) => {
                warm = Some(rule.solution.ev.values.clone());
                rules.push(Ok(rule.choice));
            }
            Err(e) => rules.push(Err(e.to_string())),
        }
    }
    match &cfg.evaluation {
        Evaluation::Exact => rules
            .into_iter()
            .map(|r| r.and_then(|rule| exact_performance(model, &rule, &law).map_err(|e| e.to_string())))
            .collect(),
        Evaluation::Simulate(sim) => {
            let ok: Vec<ChoiceProbabilities> = rules.iter().filter_map(|r| r.as_ref().ok().cloned()).collect();
            let sim = super::FleetSimConfig {
                seed: seed::derive(cfg.seed, &[coords.0 as u64, coords.1 as u64, sim.seed]),
                ..sim.clone()
            };
            let paths = if ok.is_empty() {
                Err("no rule solved".to_string())
            } else {
                simulate_fleet(model, &ok, &law, &sim).map_err(|e| e.to_string())
            };
            let mut next = 0;
            rules
                .into_iter()
                .map(|r| {
                    r.and_then(|_| {
                        let c = next;
                        next += 1;
                        paths.as_ref().map(|p| p.mean_total(c)).map_err(Clone::clone)
                    })
                })
                .collect()
        }
    }
}

/// Performance of the optimal rule for a known law.
fn optimum(cfg: &ExAnteConfig, model: &ZurcherConfig, truth: &Distribution, point: usize) -> Result<f64> {
    let rule = solve_rule(&model.with_confidence(0.0), truth, cfg.kappa)?;
    let law = JumpLaw::Pooled(truth.clone());
    match &cfg.evaluation {
        Evaluation::Exact => exact_performance(model, &rule.choice, &law),
        Evaluation::Simulate(sim) => {
            let sim = super::FleetSimConfig {
                seed: seed::derive(cfg.seed, &[point as u64, u64::MAX, sim.seed]),
                ..sim.clone()
            };
            Ok(simulate_fleet(model, &[rule.choice], &law, &sim)?.mean_total(0))
        }
    }
}

/// Scores every confidence level at every interior grid law.
///
/// The best attainable performance at a point is that of the rule solved on
/// the true law, raised to the best candidate score when simulation noise
/// puts a candidate above it.
pub fn ex_ante_sweep(cfg: &ExAnteConfig, config: &ZurcherConfig) -> Result<ExAnteResult> {
    cfg.validate()?;
    let model = cfg.model(config);
    model.validate()?;
    let grid = build_simplex_grid(cfg.dim, cfg.increment)?;
    let truths: Vec<Distribution> = grid.points().to_vec();
    let jobs: Vec<(usize, usize)> = (0..truths.len())
        .flat_map(|p| (0..cfg.samples_per_point).map(move |s| (p, s)))
        .collect();
    let cells: Vec<Vec<std::result::Result<f64, String>>> = jobs
        .par_iter()
        .map(|&(p, s)| {
            let counts = sample_counts(cfg, p, s, &truths[p]);
            ex_ante_cell(cfg, &model, &truths[p], &counts, (p, s))
        })
        .collect();
    let optima = (0..truths.len())
        .into_par_iter()
        .map(|p| optimum(cfg, &model, &truths[p], p))
        .collect::<Result<Vec<f64>>>()?;

    let n_omega = cfg.omega_grid.len();
    let mut sums = vec![vec![0.0; truths.len()]; n_omega];
    let mut counts = vec![vec![0usize; truths.len()]; n_omega];
    let mut failures = Vec::new();
    for (&(p, s), cell) in jobs.iter().zip(&cells) {
        for (c, outcome) in cell.iter().enumerate() {
            match outcome {
                Ok(v) => {
                    sums[c][p] += v;
                    counts[c][p] += 1;
                }
                Err(message) => failures.push(CellFailure {
                    point: p,
                    sample: s,
                    omega: cfg.omega_grid[c],
                    message: message.clone(),
                }),
            }
        }
    }
    let mut scores = vec![vec![0.0; truths.len()]; n_omega];
    for c in 0..n_omega {
        for p in 0..truths.len() {
            if counts[c][p] == 0 {
                return Err(Error::InvalidArgument(format!(
                    "every sample failed for confidence {} at grid point {p}",
                    cfg.omega_grid[c]
                )));
            }
            scores[c][p] = sums[c][p] / counts[c][p] as f64;
        }
    }
    let best = optima
        .iter()
        .enumerate()
        .map(|(p, &b)| scores.iter().map(|row| row[p]).fold(b, f64::max))
        .collect();
    let surface = PerformanceSurface::new(
        cfg.omega_grid.clone(),
        truths.iter().map(|d| d.probs().to_vec()).collect(),
        scores,
        Some(best),
    )?;
    Ok(ExAnteResult {
        surface,
        truths,
        failures,
    })
}
