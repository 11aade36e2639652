//! Bus model and jump estimate shared by the bus commands.

use robust_mdp::zurcher::{
    generate_synthetic_fleet, ingest_odometer_data, read_odometer_csv, write_odometer_csv, SyntheticFleet,
    TransitionEstimate, ZurcherConfig,
};

use crate::error::{CliError, CliResult};
use crate::output::Output;
use crate::settings::Settings;

pub fn zurcher_config(settings: &Settings) -> CliResult<ZurcherConfig> {
    let base = settings.preset.zurcher_config();
    let cfg = ZurcherConfig {
        n_states: settings.get("n_states", base.n_states)?,
        bin_width: settings.get("bin_width", base.bin_width)?,
        replacement_cost: settings.get("replacement_cost", base.replacement_cost)?,
        maintenance_slope: settings.get("maintenance_slope", base.maintenance_slope)?,
        discount: settings.get("discount", base.discount)?,
        max_jump: settings.get("max_jump", base.max_jump)?,
        confidence: 0.0,
        pooled_n_obs: settings.get("pooled_n_obs", base.pooled_n_obs)?,
    };
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

/// Where the estimate came from.
pub enum Source {
    File(String),
    Synthetic,
}

/// Estimates jump probabilities from the `data` file, or from a synthetic
/// fleet (also written out as `odometer.csv`) when none is given.
pub fn load_estimate(settings: &Settings, cfg: &ZurcherConfig, out: &Output) -> CliResult<(TransitionEstimate, Source)> {
    match settings.raw("data") {
        Some(path) => {
            let file = std::fs::File::open(path).map_err(|e| CliError::Data(format!("cannot open {path}: {e}")))?;
            let rows = read_odometer_csv(file).map_err(|e| CliError::Data(format!("{path}: {e}")))?;
            let est = ingest_odometer_data(&rows, cfg).map_err(|e| CliError::Data(format!("{path}: {e}")))?;
            Ok((est, Source::File(path.to_string())))
        }
        None => {
            let fleet = SyntheticFleet {
                n_buses: settings.get("synthetic_buses", SyntheticFleet::default().n_buses)?,
                n_months: settings.get("synthetic_months", SyntheticFleet::default().n_months)?,
                seed: settings.seed,
                ..SyntheticFleet::default()
            };
            let rows = generate_synthetic_fleet(cfg, &fleet)?;
            write_odometer_csv(&rows, out.file("odometer.csv")?)?;
            let est = ingest_odometer_data(&rows, cfg)?;
            Ok((est, Source::Synthetic))
        }
    }
}

impl Source {
    pub fn describe(&self) -> String {
        match self {
            Source::File(p) => p.clone(),
            Source::Synthetic => "synthetic".into(),
        }
    }
}
