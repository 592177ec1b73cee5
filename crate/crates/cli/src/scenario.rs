//! Scenario files and their merge with command-line flags.
//!
//! Precedence is flags, then file, then built-in defaults.

use std::path::Path;

use improper_ic::region::{PfVariant, DEFAULT_EPS};
use improper_ic::{ChannelParams, PowerConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Default channel: asymmetric with `2·g12 = g21`.
pub const DEFAULT_CHANNEL: (f64, f64, f64, f64) = (0.5, 1.0, 0.3, -0.7);
pub const DEFAULT_SNR_DB: f64 = 10.0;
pub const DEFAULT_SNR_LIST: [f64; 6] = [-10.0, 0.0, 10.0, 20.0, 30.0, 40.0];

const MAX_DTAU_POINTS: usize = 10_000_000;
const MAX_GRID: usize = 64;
const MAX_BOUNDARY_POINTS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub dtau_points: usize,
    pub fullrank_grid: usize,
    pub boundary_points: usize,
    pub eps_dominance: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { dtau_points: 4096, fullrank_grid: 33, boundary_points: 256, eps_dominance: DEFAULT_EPS }
    }
}

/// On-disk form; every field is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub g12: Option<f64>,
    pub g21: Option<f64>,
    pub phi12: Option<f64>,
    pub phi21: Option<f64>,
    pub snr_db: Option<f64>,
    pub seed: Option<u64>,
    pub snr_list_db: Option<Vec<f64>>,
    pub pf_variant: Option<PfVariant>,
    #[serde(default)]
    pub grids: GridsFile,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridsFile {
    pub dtau_points: Option<usize>,
    pub fullrank_grid: Option<usize>,
    pub boundary_points: Option<usize>,
    pub eps_dominance: Option<f64>,
}

/// Flag values, `None` when not given.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub g12: Option<f64>,
    pub g21: Option<f64>,
    pub phi12: Option<f64>,
    pub phi21: Option<f64>,
    pub snr_db: Option<f64>,
    pub seed: Option<u64>,
    pub snr_list_db: Option<Vec<f64>>,
    pub pf_variant: Option<PfVariant>,
    pub dtau_points: Option<usize>,
    pub fullrank_grid: Option<usize>,
    pub boundary_points: Option<usize>,
    pub eps_dominance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub channel: ChannelParams,
    pub snr_db: f64,
    pub grids: SweepConfig,
    pub seed: Option<u64>,
    pub snr_list_db: Vec<f64>,
    pub pf_variant: PfVariant,
}

impl Scenario {
    pub fn power(&self) -> PowerConfig {
        PowerConfig::from_snr_db(self.snr_db).expect("validated snr_db")
    }
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::BadInput(format!("{}: {e}", path.display())))
    }
}

fn pick<T: Clone>(flag: &Option<T>, file: &Option<T>, default: T) -> T {
    flag.clone().or_else(|| file.clone()).unwrap_or(default)
}

fn bounded(name: &str, value: usize, lo: usize, hi: usize) -> Result<usize, CliError> {
    if (lo..=hi).contains(&value) {
        Ok(value)
    } else {
        Err(CliError::BadInput(format!("{name} = {value} must lie in [{lo}, {hi}]")))
    }
}

pub fn resolve(file: Option<ScenarioFile>, flags: &Overrides) -> Result<Scenario, CliError> {
    let file = file.unwrap_or_default();
    let (dg12, dg21, dp12, dp21) = DEFAULT_CHANNEL;
    let channel = ChannelParams::new(
        pick(&flags.g12, &file.g12, dg12),
        pick(&flags.g21, &file.g21, dg21),
        pick(&flags.phi12, &file.phi12, dp12),
        pick(&flags.phi21, &file.phi21, dp21),
    )
    .map_err(|e| CliError::BadInput(e.to_string()))?;

    let snr_db = pick(&flags.snr_db, &file.snr_db, DEFAULT_SNR_DB);
    PowerConfig::from_snr_db(snr_db).map_err(|e| CliError::BadInput(e.to_string()))?;

    let defaults = SweepConfig::default();
    let g = &file.grids;
    let grids = SweepConfig {
        dtau_points: bounded(
            "dtau_points",
            pick(&flags.dtau_points, &g.dtau_points, defaults.dtau_points),
            8,
            MAX_DTAU_POINTS,
        )?,
        fullrank_grid: bounded(
            "grid",
            pick(&flags.fullrank_grid, &g.fullrank_grid, defaults.fullrank_grid),
            8,
            MAX_GRID,
        )?,
        boundary_points: bounded(
            "boundary_points",
            pick(&flags.boundary_points, &g.boundary_points, defaults.boundary_points),
            2,
            MAX_BOUNDARY_POINTS,
        )?,
        eps_dominance: pick(&flags.eps_dominance, &g.eps_dominance, defaults.eps_dominance),
    };
    if !(grids.eps_dominance.is_finite() && grids.eps_dominance >= 0.0) {
        return Err(CliError::BadInput(format!("eps_dominance = {} must be finite and >= 0", grids.eps_dominance)));
    }

    let mut snr_list_db = pick(&flags.snr_list_db, &file.snr_list_db, DEFAULT_SNR_LIST.to_vec());
    if snr_list_db.is_empty() {
        return Err(CliError::BadInput("the SNR list is empty".into()));
    }
    for &s in &snr_list_db {
        PowerConfig::from_snr_db(s).map_err(|e| CliError::BadInput(e.to_string()))?;
    }
    snr_list_db.sort_by(f64::total_cmp);

    Ok(Scenario {
        channel,
        snr_db,
        grids,
        seed: flags.seed.or(file.seed),
        snr_list_db,
        pf_variant: pick(&flags.pf_variant, &file.pf_variant, PfVariant::Threat),
    })
}
