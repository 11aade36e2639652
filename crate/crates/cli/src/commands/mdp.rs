use serde::Serialize;

use robust_mdp::mdp::{robust_value_iteration, MdpSpec, DEFAULT_KAPPA, DEFAULT_MAX_ITER};

use crate::error::{CliError, CliResult};
use crate::output::Output;
use crate::settings::Settings;

#[derive(Serialize)]
struct Solution {
    values: Vec<f64>,
    policy: Vec<usize>,
    /// `[state][action]` worst-case probabilities over each support.
    worst_case: Vec<Vec<Vec<f64>>>,
    iterations: usize,
    residual: f64,
    error_bound: f64,
}

pub fn run(settings: &Settings, out: &Output) -> CliResult<()> {
    let path = settings
        .raw("spec")
        .ok_or_else(|| CliError::Config("solve-mdp needs spec=<path to JSON>".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("cannot read {path}: {e}")))?;
    let spec: MdpSpec = serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{path}: {e}")))?;
    let kappa = settings.get("kappa", DEFAULT_KAPPA)?;
    let max_iter = settings.get("max_iter", DEFAULT_MAX_ITER)?;
    let sol = robust_value_iteration(&spec, kappa, max_iter)?;
    out.json(
        "mdp_solution.json",
        &Solution {
            values: sol.values,
            policy: sol.policy,
            worst_case: sol
                .worst_case
                .iter()
                .map(|row| row.iter().map(|d| d.probs().to_vec()).collect())
                .collect(),
            iterations: sol.iterations,
            residual: sol.residual,
            error_bound: sol.error_bound,
        },
    )
}
