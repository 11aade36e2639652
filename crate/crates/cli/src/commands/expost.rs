use serde::Serialize;

use robust_mdp::experiments::{
    misspecification_curve, savitzky_golay_smooth, simulate_fleet, Evaluation, FleetSimConfig, DEFAULT_ORDER,
    DEFAULT_WINDOW,
};
use robust_mdp::mdp::{evaluate_policy_finite_horizon, Policy};
use robust_mdp::zurcher::{solve_ev, solve_rule, true_mdp, JumpLaw};

use super::model::{load_estimate, zurcher_config};
use crate::error::{CliError, CliResult};
use crate::output::{fmt, Output};
use crate::settings::Settings;

#[derive(Serialize)]
struct FleetCheck {
    omega: f64,
    simulated: f64,
    std_error: f64,
    exact: f64,
    within_three_se: bool,
}

#[derive(Serialize)]
struct Summary {
    source: String,
    mle: Vec<f64>,
    candidates: Vec<f64>,
    evaluation: String,
    crossings: Vec<Option<f64>>,
    asif_degradation: f64,
    fleet_truth_omega: f64,
    fleet: Vec<FleetCheck>,
}

pub fn fleet_config(settings: &Settings) -> CliResult<FleetSimConfig> {
    let base = settings.preset.fleet();
    Ok(FleetSimConfig {
        n_buses: settings.get("n_buses", base.n_buses)?,
        n_months: settings.get("n_months", base.n_months)?,
        seed: settings.seed,
        shock_scale: settings.get("shock_scale", base.shock_scale)?,
        initial_state: 0,
        recorded_buses: settings.get("recorded_buses", base.recorded_buses)?,
    })
}

pub fn evaluation(settings: &Settings) -> CliResult<Evaluation> {
    match settings.raw("evaluation").unwrap_or("exact") {
        "exact" => Ok(Evaluation::Exact),
        "simulate" => Ok(Evaluation::Simulate(fleet_config(settings)?)),
        other => Err(CliError::Config(format!("evaluation must be exact or simulate, got {other:?}"))),
    }
}

fn default_primes() -> Vec<f64> {
    (0..=19).map(|i| f64::from(i) / 20.0).collect()
}

pub fn run(settings: &Settings, out: &Output) -> CliResult<()> {
    let cfg = zurcher_config(settings)?;
    let kappa = settings.get("kappa", 1e-8)?;
    let candidates = settings.list("omegas", &[0.0, 0.5, 0.95])?;
    let primes = settings.list("omega_primes", &default_primes())?;
    let window = settings.get("window", DEFAULT_WINDOW)?;
    let order = settings.get("poly_order", DEFAULT_ORDER)?;
    let stride = settings.get("path_stride", 10usize)?.max(1);
    let eval = evaluation(settings)?;
    let (est, source) = load_estimate(settings, &cfg, out)?;
    let mle = est.jump_probs.clone();

    let curve = misspecification_curve(&cfg, &mle, &candidates, &primes, kappa, &eval)?;
    let smoothed: Vec<Option<Vec<f64>>> = curve
        .difference
        .iter()
        .map(|d| savitzky_golay_smooth(d, window, order).ok())
        .collect();
    let mut rows = Vec::new();
    for (c, &omega) in candidates.iter().enumerate() {
        for (k, &prime) in primes.iter().enumerate() {
            rows.push([
                fmt(prime),
                fmt(omega),
                fmt(curve.performance[c][k]),
                fmt(curve.difference[c][k]),
                smoothed[c].as_ref().map_or(String::new(), |s| fmt(s[k])),
                curve.std_error.as_ref().map_or(String::new(), |s| fmt(s[c][k])),
            ]);
        }
    }
    out.csv(
        "misspecification.csv",
        &["omega_prime", "omega", "performance", "difference", "smoothed_difference", "std_error"],
        rows,
    )?;

    // fleets run by each candidate under the harshest truth
    let fleet = fleet_config(settings)?;
    let truth_omega = primes.iter().copied().fold(0.0, f64::max);
    let law = JumpLaw::PerState(solve_ev(&cfg.with_confidence(truth_omega), &mle, kappa)?.worst_case);
    let rules = candidates
        .iter()
        .map(|&w| solve_rule(&cfg.with_confidence(w), &mle, kappa).map(|r| r.choice))
        .collect::<Result<Vec<_>, _>>()?;
    let paths = simulate_fleet(&cfg, &rules, &law, &fleet)?;
    let truth = true_mdp(&cfg, &law)?;
    let mut checks = Vec::new();
    for (c, rule) in rules.iter().enumerate() {
        let exact = evaluate_policy_finite_horizon(&truth, &Policy::Logit(rule.action_probs()), fleet.n_months)?[0];
        let simulated = paths.mean_total(c);
        checks.push(FleetCheck {
            omega: candidates[c],
            simulated,
            std_error: paths.std_error[c],
            exact,
            within_three_se: (simulated - exact).abs() <= 3.0 * paths.std_error[c],
        });
    }
    out.csv(
        "fleet_paths.csv",
        &["omega", "month", "mean_discounted_utility"],
        candidates.iter().enumerate().flat_map(|(c, &w)| {
            let path = &paths.mean_path[c];
            (0..path.len())
                .filter(move |m| (m + 1) % stride == 0 || m + 1 == path.len())
                .map(move |m| [fmt(w), (m + 1).to_string(), fmt(path[m])])
        }),
    )?;
    out.csv(
        "fleet_trajectories.csv",
        &["omega", "bus", "month", "state", "replaced"],
        candidates.iter().enumerate().flat_map(|(c, &w)| {
            paths.trajectories[c].iter().enumerate().flat_map(move |(b, t)| {
                t.states.iter().zip(&t.replaced).enumerate().map(move |(m, (s, r))| {
                    [fmt(w), b.to_string(), (m + 1).to_string(), s.to_string(), u8::from(*r).to_string()]
                })
            })
        }),
    )?;

    let asif = candidates.iter().position(|&c| c == 0.0).expect("checked by the curve");
    let last = primes.len() - 1;
    let base = curve.performance[asif][0];
    out.json(
        "expost_summary.json",
        &Summary {
            source: source.describe(),
            mle: mle.probs().to_vec(),
            candidates: candidates.clone(),
            evaluation: match eval {
                Evaluation::Exact => "exact".into(),
                Evaluation::Simulate(_) => "simulate".into(),
            },
            crossings: curve.crossings.clone(),
            asif_degradation: (base - curve.performance[asif][last]) / base.abs(),
            fleet_truth_omega: truth_omega,
            fleet: checks,
        },
    )
}
