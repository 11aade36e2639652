use serde::Serialize;

use robust_mdp::experiments::{ex_ante_sweep, ExAnteConfig};

use super::criteria::{report, Report};
use super::expost::evaluation;
use super::model::zurcher_config;
use crate::error::{CliError, CliResult};
use crate::output::{fmt, Output};
use crate::settings::Settings;

#[derive(Serialize)]
struct Summary {
    preset: robust_mdp::experiments::Preset,
    seed: u64,
    increment: f64,
    n_points: usize,
    samples_per_point: usize,
    draws_per_sample: u64,
    omega_grid: Vec<f64>,
    failed_cells: usize,
    selection: Report,
}

pub fn run(settings: &Settings, out: &Output) -> CliResult<()> {
    let base = ExAnteConfig::preset(settings.preset);
    let cfg = ExAnteConfig {
        dim: base.dim,
        increment: settings.get("increment", base.increment)?,
        samples_per_point: settings.get("samples_per_point", base.samples_per_point)?,
        draws_per_sample: settings.get("draws_per_sample", base.draws_per_sample)?,
        omega_grid: settings.list("omega_grid", &base.omega_grid)?,
        evaluation: evaluation(settings)?,
        seed: settings.seed,
        kappa: settings.get("kappa", base.kappa)?,
    };
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let zcfg = zurcher_config(settings)?;
    let contrast = settings.get("contrast_omega", 0.1)?;

    let result = ex_ante_sweep(&cfg, &zcfg)?;
    let surface = &result.surface;
    surface.write_csv(out.file("surface.csv")?)?;

    // difference of one robust level against the as-if rule over the simplex
    let find = |w: f64| surface.candidates().iter().position(|&c| c == w);
    if let (Some(r), Some(a)) = (find(contrast), find(0.0)) {
        out.csv(
            "contrast.csv",
            &["point_id", "p0", "p1", "p2", "omega", "difference"],
            surface.points().iter().enumerate().map(|(p, x)| {
                let mut row = vec![p.to_string()];
                row.extend((0..3).map(|i| x.get(i).map_or(String::new(), |v| fmt(*v))));
                row.push(fmt(contrast));
                row.push(fmt(surface.score(r, p) - surface.score(a, p)));
                row
            }),
        )?;
    }
    out.csv(
        "errors.csv",
        &["point_id", "sample", "omega", "message"],
        result
            .failures
            .iter()
            .map(|f| [f.point.to_string(), f.sample.to_string(), fmt(f.omega), f.message.clone()]),
    )?;
    let selection = report(surface, out)?;
    out.json(
        "exante_summary.json",
        &Summary {
            preset: settings.preset,
            seed: cfg.seed,
            increment: cfg.increment,
            n_points: surface.points().len(),
            samples_per_point: cfg.samples_per_point,
            draws_per_sample: cfg.draws_per_sample,
            omega_grid: cfg.omega_grid.clone(),
            failed_cells: result.failures.len(),
            selection,
        },
    )?;
    if result.failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::NotConverged(format!(
            "{} cells failed; see errors.csv",
            result.failures.len()
        )))
    }
}
