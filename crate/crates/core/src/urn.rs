//! Guessing the share of black balls in an urn.
//!
//! After `n` draws with replacement the guess shrinks the sample share
//! `r / n` toward one half: `lambda * r / n + (1 - lambda) / 2`. The payoff is
//! one minus the squared error, so the best attainable payoff is one at every
//! true share.

use rayon::prelude::*;

use crate::ambiguity::ln_gamma;
use crate::criteria::{bayes_select, maximin_select, minimax_regret_select, PerformanceSurface, Selection};
use crate::{Error, Result};

pub const DEFAULT_DRAWS: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UrnSetup {
    pub n_draws: u32,
    pub lambda: f64,
}

impl UrnSetup {
    pub fn new(n_draws: u32, lambda: f64) -> Result<Self> {
        if n_draws == 0 {
            return Err(Error::InvalidArgument("at least one draw is needed".into()));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidArgument(format!("lambda {lambda} outside [0, 1]")));
        }
        Ok(Self { n_draws, lambda })
    }
}

/// The shrunk guess after `black` black draws.
pub fn urn_decision(black: u32, setup: &UrnSetup) -> f64 {
    setup.lambda * (f64::from(black) / f64::from(setup.n_draws)) + (1.0 - setup.lambda) * 0.5
}

/// Binomial probabilities of `0..=n` black draws.
pub fn binomial_pmf(n: u32, theta: f64) -> Vec<f64> {
    let nf = f64::from(n);
    (0..=n)
        .map(|r| {
            let rf = f64::from(r);
            // 0^0 = 1 at the edges of the parameter space
            let log_success = if r == 0 { 0.0 } else { rf * theta.ln() };
            let log_failure = if r == n { 0.0 } else { (nf - rf) * (1.0 - theta).ln() };
            let log_choose = ln_gamma(nf + 1.0) - ln_gamma(rf + 1.0) - ln_gamma(nf - rf + 1.0);
            (log_choose + log_success + log_failure).exp()
        })
        .collect()
}

fn payoff_with_pmf(setup: &UrnSetup, theta: f64, pmf: &[f64]) -> f64 {
    pmf.iter()
        .enumerate()
        .map(|(r, p)| {
            let err = urn_decision(r as u32, setup) - theta;
            p * (1.0 - err * err)
        })
        .sum()
}

/// Expected payoff at true share `theta`, by exact summation over draws.
pub fn expected_payoff(setup: &UrnSetup, theta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidArgument(format!("share {theta} outside [0, 1]")));
    }
    Ok(payoff_with_pmf(setup, theta, &binomial_pmf(setup.n_draws, theta)))
}

/// `1 - lambda^2 theta (1 - theta) / n - (1 - lambda)^2 (theta - 1/2)^2`.
pub fn closed_form_payoff(setup: &UrnSetup, theta: f64) -> f64 {
    let l = setup.lambda;
    let n = f64::from(setup.n_draws);
    1.0 - l * l * theta * (1.0 - theta) / n - (1.0 - l) * (1.0 - l) * (theta - 0.5) * (theta - 0.5)
}

/// `k / steps` for `k = 0..=steps`.
pub fn unit_grid(steps: u32) -> Vec<f64> {
    (0..=steps).map(|k| f64::from(k) / f64::from(steps)).collect()
}

/// Expected payoff of every `lambda` at every `theta`, with best attainable
/// payoff one everywhere.
pub fn payoff_surface(n_draws: u32, lambdas: &[f64], thetas: &[f64]) -> Result<PerformanceSurface> {
    if lambdas.is_empty() || thetas.is_empty() {
        return Err(Error::InvalidArgument("lambda and theta grids must be non-empty".into()));
    }
    if let Some(t) = thetas.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::InvalidArgument(format!("share {t} outside [0, 1]")));
    }
    let setups = lambdas
        .iter()
        .map(|&l| UrnSetup::new(n_draws, l))
        .collect::<Result<Vec<_>>>()?;
    let pmfs: Vec<Vec<f64>> = thetas.par_iter().map(|&t| binomial_pmf(n_draws, t)).collect();
    let scores: Vec<Vec<f64>> = setups
        .par_iter()
        .map(|setup| {
            thetas
                .iter()
                .zip(&pmfs)
                .map(|(&t, pmf)| payoff_with_pmf(setup, t, pmf))
                .collect()
        })
        .collect();
    PerformanceSurface::new(
        lambdas.to_vec(),
        thetas.iter().map(|&t| vec![t]).collect(),
        scores,
        Some(vec![1.0; thetas.len()]),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionCurves {
    pub surface: PerformanceSurface,
    pub maximin: Selection,
    pub regret: Selection,
    pub bayes: Selection,
}

/// Maximin, minimax-regret and Bayes scores for each `lambda`.
pub fn criterion_curves(n_draws: u32, lambdas: &[f64], thetas: &[f64], prior: &[f64]) -> Result<CriterionCurves> {
    let surface = payoff_surface(n_draws, lambdas, thetas)?;
    let maximin = maximin_select(&surface);
    let regret = minimax_regret_select(&surface)?;
    let bayes = bayes_select(&surface, prior)?;
    Ok(CriterionCurves {
        surface,
        maximin,
        regret,
        bayes,
    })
}

/// Maximin-optimal shrinkage, balancing the center and boundary worst cases.
pub fn analytic_maximin_lambda(n_draws: u32) -> f64 {
    let s = f64::from(n_draws).sqrt();
    s / (1.0 + s)
}

/// Bayes-optimal shrinkage under a uniform prior on the share.
pub fn analytic_bayes_lambda(n_draws: u32) -> f64 {
    let n = f64::from(n_draws);
    n / (n + 2.0)
}
