use serde::Serialize;

use robust_mdp::criteria::{uniform_prior, Selection};
use robust_mdp::urn::{analytic_bayes_lambda, analytic_maximin_lambda, criterion_curves, unit_grid, DEFAULT_DRAWS};

use crate::error::CliResult;
use crate::output::{fmt, Output};
use crate::settings::Settings;

#[derive(Serialize)]
struct Summary {
    n_draws: u32,
    n_lambdas: usize,
    n_thetas: usize,
    lambda_maximin: f64,
    lambda_regret: f64,
    lambda_bayes: f64,
    analytic_maximin: f64,
    analytic_bayes: f64,
}

pub fn run(settings: &Settings, out: &Output) -> CliResult<()> {
    let n = settings.get("n_draws", DEFAULT_DRAWS)?;
    let lambdas = match settings.raw("lambda_grid") {
        Some(_) => settings.list("lambda_grid", &[])?,
        None => unit_grid(settings.get("lambda_steps", 1000)?),
    };
    let thetas = unit_grid(settings.get("theta_steps", 100)?);
    let curves = criterion_curves(n, &lambdas, &thetas, &uniform_prior(thetas.len()))?;

    let s = &curves.surface;
    out.csv(
        "urn_payoffs.csv",
        &["lambda", "theta", "payoff"],
        lambdas.iter().enumerate().flat_map(|(c, l)| {
            thetas
                .iter()
                .enumerate()
                .map(move |(p, t)| [fmt(*l), fmt(*t), fmt(s.score(c, p))])
        }),
    )?;
    let named: [(&str, &Selection); 3] = [
        ("maximin", &curves.maximin),
        ("minimax_regret", &curves.regret),
        ("bayes", &curves.bayes),
    ];
    out.csv(
        "urn_rankings.csv",
        &["criterion", "lambda", "value"],
        named.iter().flat_map(|(name, sel)| {
            lambdas
                .iter()
                .zip(&sel.criterion)
                .map(move |(l, v)| [name.to_string(), fmt(*l), fmt(*v)])
        }),
    )?;
    out.csv(
        "urn_optima.csv",
        &["criterion", "lambda", "value"],
        named
            .iter()
            .map(|(name, sel)| [name.to_string(), fmt(sel.candidate), fmt(sel.criterion[sel.index])]),
    )?;
    out.json(
        "urn_summary.json",
        &Summary {
            n_draws: n,
            n_lambdas: lambdas.len(),
            n_thetas: thetas.len(),
            lambda_maximin: curves.maximin.candidate,
            lambda_regret: curves.regret.candidate,
            lambda_bayes: curves.bayes.candidate,
            analytic_maximin: analytic_maximin_lambda(n),
            analytic_bayes: analytic_bayes_lambda(n),
        },
    )
}
