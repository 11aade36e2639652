//! Performance of fixed rules when the truth is a worst case of some other
//! confidence level.

use rayon::prelude::*;

use super::{exact_performance, simulate_fleet, Evaluation};
use crate::simplex::Distribution;
use crate::zurcher::{solve_ev, solve_rule, JumpLaw, ZurcherConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MisspecificationCurve {
    pub candidates: Vec<f64>,
    /// Confidence levels whose worst cases act as the true law.
    pub omega_primes: Vec<f64>,
    /// `[candidate][omega']`
    pub performance: Vec<Vec<f64>>,
    /// Monte Carlo standard errors, when simulated.
    pub std_error: Option<Vec<Vec<f64>>>,
    /// Performance minus the as-if rule's, `[candidate][omega']`.
    pub difference: Vec<Vec<f64>>,
    /// First `omega'` at which each rule beats the as-if rule, interpolated
    /// linearly between grid points.
    pub crossings: Vec<Option<f64>>,
}

/// First zero up-crossing of `diff` over `grid`.
pub fn crossing_point(grid: &[f64], diff: &[f64]) -> Option<f64> {
    let first = diff.iter().position(|&d| d > 0.0)?;
    if first == 0 {
        return Some(grid[0]);
    }
    let (x0, x1) = (grid[first - 1], grid[first]);
    let (d0, d1) = (diff[first - 1], diff[first]);
    Some(x0 + (0.0 - d0) * (x1 - x0) / (d1 - d0))
}

/// Evaluates rules solved at `candidates` (which must include the as-if rule
/// at 0) under the per-state worst-case law of each `omega'`.
pub fn misspecification_curve(
    config: &ZurcherConfig,
    estimate: &Distribution,
    candidates: &[f64],
    omega_primes: &[f64],
    kappa: f64,
    evaluation: &Evaluation,
) -> Result<MisspecificationCurve> {
    let baseline = candidates
        .iter()
        .position(|&c| c == 0.0)
        .ok_or_else(|| Error::InvalidArgument("candidates must include the as-if rule at 0".into()))?;
    if omega_primes.is_empty() {
        return Err(Error::InvalidArgument("no misspecification levels given".into()));
    }
    let rules = candidates
        .par_iter()
        .map(|&omega| solve_rule(&config.with_confidence(omega), estimate, kappa).map(|r| r.choice))
        .collect::<Result<Vec<_>>>()?;
    let per_level = omega_primes
        .par_iter()
        .map(|&omega| -> Result<(Vec<f64>, Vec<f64>)> {
            let law = JumpLaw::PerState(solve_ev(&config.with_confidence(omega), estimate, kappa)?.worst_case);
            match evaluation {
                Evaluation::Exact => {
                    let perf = rules
                        .iter()
                        .map(|r| exact_performance(config, r, &law))
                        .collect::<Result<Vec<_>>>()?;
                    Ok((perf, Vec::new()))
                }
                Evaluation::Simulate(sim) => {
                    let paths = simulate_fleet(config, &rules, &law, sim)?;
                    let perf = (0..rules.len()).map(|c| paths.mean_total(c)).collect();
                    Ok((perf, paths.std_error))
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let k = candidates.len();
    let (perf_levels, se_levels): (Vec<Vec<f64>>, Vec<Vec<f64>>) = per_level.into_iter().unzip();
    let transpose = |levels: &[Vec<f64>]| -> Vec<Vec<f64>> {
        (0..k).map(|c| levels.iter().map(|lvl| lvl[c]).collect()).collect()
    };
    let performance = transpose(&perf_levels);
    let std_error = match evaluation {
        Evaluation::Exact => None,
        Evaluation::Simulate(_) => Some(transpose(&se_levels)),
    };
    let difference: Vec<Vec<f64>> = performance
        .iter()
        .map(|row| row.iter().zip(&performance[baseline]).map(|(a, b)| a - b).collect())
        .collect();
    let crossings = difference
        .iter()
        .enumerate()
        .map(|(c, d)| if c == baseline { None } else { crossing_point(omega_primes, d) })
        .collect();
    Ok(MisspecificationCurve {
        candidates: candidates.to_vec(),
        omega_primes: omega_primes.to_vec(),
        performance,
        std_error,
        difference,
        crossings,
    })
}
