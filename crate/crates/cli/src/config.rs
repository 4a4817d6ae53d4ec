//! TOML run configuration.
//!
//! ```toml
//! [system]            # any SystemParams field; omitted keys keep defaults
//! rho_s_db = 20.0
//! eta = 0.7
//!
//! [sweep]
//! axis = "rho_db"     # rho_db | d_s1 | d_sr | rth | a1_fixed
//! grid = [0, 5, 10, 15, 20]
//! schemes = ["DPU", "DPR", "MDPR"]
//! mode = "both"       # mc | analytic | both
//! n_trials = 1000000
//! seed = 2024
//!
//! [optimize]
//! schemes = ["DPU", "DPR", "MDPR"]
//! range = [0.01, 2.0]
//! resolution = 200
//!
//! [output]
//! format = "csv"      # csv | json
//! path = "out.csv"    # stdout when absent
//! ```

use std::path::PathBuf;

use cdrt_core::experiments::{SweepAxis, SweepMode, SweepSpec, RTH_RANGE};
use cdrt_core::{SchemeKind, SystemParams};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_TRIALS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 2024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    #[serde(default = "all_schemes")]
    pub schemes: Vec<SchemeKind>,
    #[serde(default = "default_mode")]
    pub mode: SweepMode,
    #[serde(default = "default_trials")]
    pub n_trials: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeSection {
    pub schemes: Vec<SchemeKind>,
    pub range: [f64; 2],
    pub resolution: usize,
    /// Trials per objective evaluation for schemes without closed forms.
    pub n_trials: u64,
    pub seed: u64,
}

impl Default for OptimizeSection {
    fn default() -> Self {
        OptimizeSection {
            schemes: vec![SchemeKind::Dpu, SchemeKind::Dpr, SchemeKind::Mdpr],
            range: [RTH_RANGE.0, RTH_RANGE.1],
            resolution: 200,
            n_trials: 100_000,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub format: Format,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemParams,
    pub sweep: Option<SweepSection>,
    pub optimize: OptimizeSection,
    pub output: OutputSection,
}

fn all_schemes() -> Vec<SchemeKind> {
    SchemeKind::ALL.to_vec()
}
fn default_mode() -> SweepMode {
    SweepMode::Both
}
fn default_trials() -> u64 {
    DEFAULT_TRIALS
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl RunConfig {
    pub fn sweep_spec(&self) -> Option<SweepSpec> {
        self.sweep.as_ref().map(|s| SweepSpec {
            axis: s.axis,
            grid: s.grid.clone(),
            schemes: s.schemes.clone(),
            fixed: self.system.clone(),
            n_trials: s.n_trials,
            seed: s.seed,
            mode: s.mode,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.system.validate()?;
        if let Some(spec) = self.sweep_spec() {
            spec.validate()?;
        }
        let [lo, hi] = self.optimize.range;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(CliError::Config(format!(
                "optimize.range: need 0 < lo < hi, got [{lo}, {hi}]"
            )));
        }
        if self.optimize.resolution < 3 {
            return Err(CliError::Config("optimize.resolution: must be >= 3".into()));
        }
        Ok(())
    }
}

/// Parses and validates a configuration document. Unknown keys are errors.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}
