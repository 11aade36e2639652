use std::fs::File;

use serde::Serialize;

use robust_mdp::criteria::{bayes_select, maximin_select, minimax_regret_select, uniform_prior, PerformanceSurface};

use crate::error::{CliError, CliResult};
use crate::output::{fmt, Output};
use crate::settings::Settings;

#[derive(Debug, Serialize)]
pub struct Choice {
    pub candidate: f64,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub maximin: Choice,
    pub minimax_regret: Option<Choice>,
    pub bayes: Choice,
}

/// Selections under the three criteria, with a uniform prior for Bayes.
pub fn report(surface: &PerformanceSurface, out: &Output) -> CliResult<Report> {
    let maximin = maximin_select(surface);
    let regret = surface
        .best_attainable()
        .map(|_| minimax_regret_select(surface))
        .transpose()?;
    let bayes = bayes_select(surface, &uniform_prior(surface.points().len()))?;
    let mut rows = Vec::new();
    for (name, sel) in [("maximin", Some(&maximin)), ("minimax_regret", regret.as_ref()), ("bayes", Some(&bayes))] {
        if let Some(sel) = sel {
            for (c, v) in surface.candidates().iter().zip(&sel.criterion) {
                rows.push([name.to_string(), fmt(*c), fmt(*v)]);
            }
        }
    }
    out.csv("criteria.csv", &["criterion", "candidate", "value"], rows)?;
    let choice = |s: &robust_mdp::criteria::Selection| Choice {
        candidate: s.candidate,
        value: s.criterion[s.index],
    };
    let report = Report {
        maximin: choice(&maximin),
        minimax_regret: regret.as_ref().map(choice),
        bayes: choice(&bayes),
    };
    out.json("criteria.json", &report)?;
    Ok(report)
}

pub fn run(settings: &Settings, out: &Output) -> CliResult<()> {
    let path = settings
        .raw("surface")
        .ok_or_else(|| CliError::Config("criteria needs surface=<path to surface.csv>".into()))?;
    let file = File::open(path).map_err(|e| CliError::Data(format!("cannot open {path}: {e}")))?;
    let surface = PerformanceSurface::read_csv(file).map_err(|e| CliError::Data(format!("{path}: {e}")))?;
    report(&surface, out).map(|_| ())
}
