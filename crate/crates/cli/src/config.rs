//! JSON experiment configuration.
//!
//! Angles are given in degrees and PA factors as linear squared values,
//! mirroring how system parameters are usually quoted. SNR points are
//! realized by fixing the noise variance and sweeping the total transmit
//! power (`P_s = sigma^2 * 10^(SNR/10)`), which keeps a single power knob.

use serde::{Deserialize, Serialize};

use dm_secrecy::array_channel::{deg_to_rad, ArrayConfig, Scenario};
use dm_secrecy::beamformers::InitKind;
use dm_secrecy::link_sim::LinkConfig;
use dm_secrecy::secrecy_metrics::PowerProfile;

use crate::CliError;

fn default_spacing() -> f64 {
    ArrayConfig::HALF_WAVELENGTH
}

fn default_noise_var() -> f64 {
    1.0
}

fn default_delta() -> f64 {
    dm_secrecy::beamformers::DEFAULT_DELTA
}

fn default_max_outer() -> usize {
    dm_secrecy::beamformers::DEFAULT_MAX_OUTER
}

fn default_snr_db() -> f64 {
    10.0
}

fn default_num_symbols() -> usize {
    20_000
}

/// Initializer named in a config file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitConfig {
    #[default]
    Leakage,
    Random {
        seed: u64,
    },
}

impl InitConfig {
    pub fn to_init_kind(self) -> InitKind {
        match self {
            InitConfig::Leakage => InitKind::Leakage,
            InitConfig::Random { seed } => InitKind::Random { seed },
        }
    }
}

/// Inclusive degree range `start, start+step, ..., stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleGridDeg {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Default for AngleGridDeg {
    fn default() -> Self {
        Self {
            start: 0.0,
            stop: 180.0,
            step: 1.0,
        }
    }
}

impl AngleGridDeg {
    pub fn degrees(&self) -> Result<Vec<f64>, CliError> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(CliError::Config(format!(
                "angle grid step must be positive, got {}",
                self.step
            )));
        }
        if self.stop < self.start {
            return Err(CliError::Config(format!(
                "angle grid stop {} precedes start {}",
                self.stop, self.start
            )));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| self.start + i as f64 * self.step).collect())
    }
}

/// One experiment description, shared by every subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub num_elements: usize,
    #[serde(default = "default_spacing")]
    pub spacing_over_wavelength: f64,
    pub theta_d_deg: f64,
    pub theta_e_deg: f64,
    pub beta1_sq: f64,
    pub beta2_sq: f64,
    #[serde(default = "default_noise_var")]
    pub noise_var: f64,
    /// SNR points for the rate-versus-SNR sweep (dB).
    pub snr_db_list: Vec<f64>,
    /// Operating SNR for the convergence and BER experiments (dB).
    #[serde(default = "default_snr_db")]
    pub snr_db: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_max_outer")]
    pub max_outer: usize,
    #[serde(default)]
    pub init: InitConfig,
    /// Random-init seeds for the convergence experiment.
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default = "default_num_symbols")]
    pub num_symbols: usize,
    #[serde(default)]
    pub angle_grid_deg: AngleGridDeg,
}

impl ExperimentConfig {
    pub fn from_file(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let config: ExperimentConfig = serde_json::from_str(&text).map_err(|e| {
            CliError::Config(format!("malformed config {}: {e}", path.display()))
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.snr_db_list.is_empty() {
            return Err(CliError::Config("snr_db_list must not be empty".into()));
        }
        if self.num_symbols == 0 {
            return Err(CliError::Config("num_symbols must be positive".into()));
        }
        // Scenario, power profile and grid constructors carry the rest of
        // the validation; run them once so errors surface at load time.
        self.scenario()?;
        self.power(self.snr_db)?;
        for &snr in &self.snr_db_list {
            self.power(snr)?;
        }
        self.angle_grid_deg.degrees()?;
        if !(self.delta > 0.0) {
            return Err(CliError::Config(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        if self.max_outer == 0 {
            return Err(CliError::Config("max_outer must be positive".into()));
        }
        Ok(())
    }

    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let array = ArrayConfig::new(self.num_elements, self.spacing_over_wavelength)?;
        Ok(Scenario::new(
            array,
            deg_to_rad(self.theta_d_deg),
            deg_to_rad(self.theta_e_deg),
        )?)
    }

    /// Power profile realizing the given SNR point.
    pub fn power(&self, snr_db: f64) -> Result<PowerProfile, CliError> {
        let total_power = self.noise_var * 10f64.powf(snr_db / 10.0);
        Ok(PowerProfile::from_power_split(
            total_power,
            self.beta1_sq,
            self.beta2_sq,
            self.noise_var,
        )?)
    }

    pub fn link_config(&self, seed: u64) -> Result<LinkConfig, CliError> {
        let angle_grid = self
            .angle_grid_deg
            .degrees()?
            .into_iter()
            .map(deg_to_rad)
            .collect();
        Ok(LinkConfig {
            num_symbols: self.num_symbols,
            seed,
            snr_db: self.snr_db,
            angle_grid,
        })
    }
}
