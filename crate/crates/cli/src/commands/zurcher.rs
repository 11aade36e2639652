use serde::Serialize;

use robust_mdp::zurcher::{solve_rule, worst_case_jump_table, REPRESENTATIVE_STATE};

use super::model::{load_estimate, zurcher_config};
use crate::error::CliResult;
use crate::output::{fmt, Output};
use crate::settings::Settings;

#[derive(Serialize)]
struct RuleSummary {
    omega: f64,
    iterations: usize,
    residual: f64,
    error_bound: f64,
    maintain_prob_at_state: f64,
    worst_case_at_state: Vec<f64>,
}

#[derive(Serialize)]
struct Summary {
    source: String,
    n_obs: u64,
    counts: Vec<u64>,
    mle: Vec<f64>,
    state: usize,
    mileage: f64,
    rules: Vec<RuleSummary>,
}

pub fn run(settings: &Settings, out: &Output) -> CliResult<()> {
    let cfg = zurcher_config(settings)?;
    let kappa = settings.get("kappa", 1e-8)?;
    let omegas = settings.list("omegas", &[0.0, 0.5, 0.95])?;
    let state = settings.get("state", REPRESENTATIVE_STATE.min(cfg.n_states - 1))?;
    let variants = settings.list_u64("n_obs_variants", &[cfg.pooled_n_obs, 200, 1_000])?;
    let (est, source) = load_estimate(settings, &cfg, out)?;
    let mle = est.jump_probs.clone();

    out.csv(
        "mle.csv",
        &["jump", "count", "probability"],
        est.counts
            .iter()
            .zip(mle.probs())
            .enumerate()
            .map(|(j, (c, p))| [j.to_string(), c.to_string(), fmt(*p)]),
    )?;

    let mut ev_rows = Vec::new();
    let mut rules = Vec::new();
    for &omega in &omegas {
        let rule = solve_rule(&cfg.with_confidence(omega), &mle, kappa)?;
        for x in 0..cfg.n_states {
            ev_rows.push([
                fmt(omega),
                x.to_string(),
                fmt(cfg.mileage(x)),
                fmt(rule.solution.ev.values[x]),
                fmt(rule.choice.maintain_prob[x]),
            ]);
        }
        rules.push(RuleSummary {
            omega,
            iterations: rule.solution.iterations,
            residual: rule.solution.residual,
            error_bound: rule.solution.error_bound,
            maintain_prob_at_state: rule.choice.maintain_prob[state],
            worst_case_at_state: rule.solution.worst_case[state].probs().to_vec(),
        });
    }
    out.csv("ev.csv", &["omega", "state", "mileage", "ev", "maintain_prob"], ev_rows)?;

    let table_omegas: Vec<f64> = omegas.iter().copied().filter(|&w| w < 1.0).collect();
    let table = worst_case_jump_table(&cfg, &mle, &table_omegas, &variants, state, kappa)?;
    out.csv(
        "worst_case.csv",
        &["omega", "n_obs", "state", "jump", "probability"],
        table.iter().flat_map(|row| {
            row.probs.probs().iter().enumerate().map(move |(j, p)| {
                [fmt(row.confidence), row.n_obs.to_string(), row.state.to_string(), j.to_string(), fmt(*p)]
            })
        }),
    )?;

    out.json(
        "zurcher_summary.json",
        &Summary {
            source: source.describe(),
            n_obs: est.n_obs,
            counts: est.counts.clone(),
            mle: mle.probs().to_vec(),
            state,
            mileage: cfg.mileage(state),
            rules,
        },
    )
}
