use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Semicircle radius for the chosen entry variance.
pub const BAND_HALF_WIDTH: f64 = 2.0;
pub const MIN_DIM: usize = 50;
pub const MAX_WINDOW: f64 = 0.2;
/// Parasitic channels below this count do not model homogeneous absorption.
pub const MIN_PARASITIC: u32 = 50;

/// Antenna and parasitic coupling strengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub t_a: f64,
    pub t_b: f64,
    pub m: u32,
    pub t_c: f64,
}

impl ChannelModel {
    pub fn new(t_a: f64, t_b: f64, m: u32, t_c: f64) -> Result<Self> {
        let c = Self { t_a, t_b, m, t_c };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, t) in [("T_a", self.t_a), ("T_b", self.t_b)] {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::invalid(name, format!("must lie in (0, 1], got {t}")));
            }
        }
        if self.m > 0 && !(self.t_c > 0.0 && self.t_c < 1.0) {
            return Err(Error::invalid("T_c", format!("must lie in (0, 1), got {}", self.t_c)));
        }
        Ok(())
    }

    /// `γ = T_a + T_b + M·T_c`.
    pub fn gamma(&self) -> f64 {
        self.t_a + self.t_b + self.m as f64 * self.t_c
    }

    /// The absorption part `M·T_c` of `γ`.
    pub fn internal_gamma(&self) -> f64 {
        self.m as f64 * self.t_c
    }
}

pub const PRESET_NAMES: [&str; 2] = ["gamma5.39", "gamma27.18"];

/// The two measured parameter sets.
pub fn preset(name: &str) -> Result<ChannelModel> {
    match name {
        "gamma5.39" => Ok(ChannelModel { t_a: 0.89, t_b: 0.89, m: 100, t_c: 0.0361 }),
        "gamma27.18" => Ok(ChannelModel { t_a: 0.56, t_b: 0.56, m: 100, t_c: 0.261 }),
        other => Err(Error::invalid(
            "preset",
            format!("unknown preset {other:?}; available: {}", PRESET_NAMES.join(", ")),
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum AbsorptionMode {
    /// `M` explicit parasitic channels.
    #[default]
    Channels,
    /// A uniform imaginary energy shift carrying `M·T_c`.
    UniformShift,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub enabled: bool,
    pub pilot_samples: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Parasitic channels whose reflection is measured in the pilot; they
    /// are statistically equivalent so a few suffice.
    pub probe_channels: usize,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            pilot_samples: 10_000,
            tolerance: 0.01,
            max_iterations: 12,
            probe_channels: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub beta: u8,
    pub n_dim: usize,
    pub n_samples: usize,
    pub seed: u64,
    /// Half-width of the energy window as a fraction of the band half-width.
    pub energy_window: f64,
    pub channels: ChannelModel,
    #[serde(default)]
    pub absorption: AbsorptionMode,
    #[serde(default)]
    pub calibration: CalibrationConfig,
}

impl EnsembleConfig {
    pub fn new(beta: u8, channels: ChannelModel, n_samples: usize, seed: u64) -> Self {
        Self {
            beta,
            n_dim: 200,
            n_samples,
            seed,
            energy_window: 0.05,
            channels,
            absorption: AbsorptionMode::Channels,
            calibration: CalibrationConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta != 1 && self.beta != 2 {
            return Err(Error::invalid("beta", format!("must be 1 or 2, got {}", self.beta)));
        }
        if self.n_dim < MIN_DIM {
            return Err(Error::invalid(
                "n_dim",
                format!("must be at least {MIN_DIM}, got {}", self.n_dim),
            ));
        }
        if !(self.energy_window >= 0.0 && self.energy_window <= MAX_WINDOW) {
            return Err(Error::invalid(
                "energy_window",
                format!("must lie in [0, {MAX_WINDOW}], got {}", self.energy_window),
            ));
        }
        self.channels.validate()?;
        if self.absorption == AbsorptionMode::Channels {
            let m = self.channels.m;
            if m > 0 && m < MIN_PARASITIC {
                return Err(Error::invalid(
                    "M",
                    format!("{m} parasitic channels cannot model homogeneous absorption; need at least {MIN_PARASITIC}"),
                ));
            }
            let total = 2 + self.channels.m as usize;
            if total > self.n_dim {
                return Err(Error::invalid(
                    "channels",
                    format!("{total} channels exceed n_dim = {}", self.n_dim),
                ));
            }
        }
        let cal = &self.calibration;
        if cal.enabled && (cal.pilot_samples < 100 || !(cal.tolerance > 0.0)) {
            return Err(Error::invalid("calibration", "need ≥ 100 pilot samples and a positive tolerance"));
        }
        Ok(())
    }

    /// Energies are drawn uniformly from `[−e_max, e_max]`.
    pub fn e_max(&self) -> f64 {
        self.energy_window * BAND_HALF_WIDTH
    }

    pub fn scale(&self) -> SpectralScale {
        SpectralScale::new(self.n_dim, self.channels.gamma())
    }
}

/// Band-center level density and spacing for a given `N` and `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralScale {
    pub rho0: f64,
    pub mean_spacing: f64,
    pub gamma_over_delta: f64,
}

impl SpectralScale {
    pub fn new(n_dim: usize, gamma: f64) -> Self {
        let rho0 = 1.0 / PI;
        Self {
            rho0,
            mean_spacing: 1.0 / (n_dim as f64 * rho0),
            gamma_over_delta: gamma / (2.0 * PI),
        }
    }
}

/// Semicircle density `√(4 − λ²)/(2π)`.
pub fn semicircle(lambda: f64) -> f64 {
    let r = BAND_HALF_WIDTH;
    if lambda.abs() >= r {
        0.0
    } else {
        (r * r - lambda * lambda).sqrt() / (2.0 * PI)
    }
}

/// Semicircle cumulative distribution.
pub fn semicircle_cdf(lambda: f64) -> f64 {
    let t = (lambda / BAND_HALF_WIDTH).clamp(-1.0, 1.0);
    0.5 + (t * (1.0 - t * t).sqrt() + t.asin()) / PI
}
