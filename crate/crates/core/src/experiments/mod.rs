//! Drivers for the robustness studies: fleets run under misspecified laws
//! (ex post) and a sweep over true laws on the simplex (ex ante).

mod exante;
mod expost;
mod fleet;
mod savgol;

pub use exante::{ex_ante_cell, ex_ante_sweep, sample_counts, CellFailure, ExAnteConfig, ExAnteResult};
pub use expost::{crossing_point, misspecification_curve, MisspecificationCurve};
pub use fleet::{simulate_fleet, FleetPaths, FleetSimConfig, Trajectory};
pub use savgol::{savitzky_golay_smooth, DEFAULT_ORDER, DEFAULT_WINDOW};

use serde::{Deserialize, Serialize};

use crate::mdp::{evaluate_policy_under_truth, Policy};
use crate::zurcher::{true_mdp, ChoiceProbabilities, JumpLaw, ZurcherConfig};
use crate::Result;

/// How the performance of a decision rule under a known law is measured.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Evaluation {
    /// Expected discounted utility from a new bus, shocks integrated out.
    Exact,
    /// Fleet mean of simulated discounted utility from a new bus.
    Simulate(FleetSimConfig),
}

/// Run size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Small enough for a laptop and for tests.
    Desk,
    /// Full published scale, for offline runs.
    Paper,
}

impl Preset {
    pub fn zurcher_config(self) -> ZurcherConfig {
        match self {
            Preset::Desk => ZurcherConfig {
                n_states: 30,
                ..ZurcherConfig::default()
            },
            Preset::Paper => ZurcherConfig::default(),
        }
    }

    pub fn fleet(self) -> FleetSimConfig {
        match self {
            Preset::Desk => FleetSimConfig {
                n_buses: 200,
                n_months: 5_000,
                ..FleetSimConfig::default()
            },
            Preset::Paper => FleetSimConfig::default(),
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Preset::Desk),
            "paper" => Ok(Preset::Paper),
            other => Err(crate::Error::InvalidArgument(format!("unknown preset {other:?}"))),
        }
    }
}

/// Exact expected discounted utility of a logit rule from state 0.
pub fn exact_performance(config: &ZurcherConfig, rule: &ChoiceProbabilities, law: &JumpLaw) -> Result<f64> {
    let truth = true_mdp(config, law)?;
    let values = evaluate_policy_under_truth(&truth, &Policy::Logit(rule.action_probs()))?;
    Ok(values[0])
}
