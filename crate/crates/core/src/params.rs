//! Scenario description shared by the analytic, design and simulation code.
//!
//! All quantities are linear and SI: intensities in m⁻², powers in watts.
//! Decibel conversions live in [`crate::units`] and are meant for the
//! CLI boundary only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest Nakagami shape accepted by the closed forms.
pub const MAX_NAKAGAMI_M: u32 = 8;

/// Nakagami shapes of the desired and interfering links. `m = 1` is Rayleigh.
///
/// Rician fading with factor `K` maps to `m = (K+1)²/(2K+1)`
/// (see [`rician_to_nakagami`]); the sums in the closed forms need integer
/// shapes, so callers round before building a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelModel {
    pub m_s: u32,
    pub m_i: u32,
}

impl ChannelModel {
    pub const RAYLEIGH: ChannelModel = ChannelModel { m_s: 1, m_i: 1 };

    pub fn new(m_s: u32, m_i: u32) -> Result<Self> {
        let model = Self { m_s, m_i };
        model.validate()?;
        Ok(model)
    }

    /// Same shape on desired and interfering links.
    pub fn nakagami(m: u32) -> Result<Self> {
        Self::new(m, m)
    }

    pub fn is_rayleigh(&self) -> bool {
        self.m_s == 1 && self.m_i == 1
    }

    pub fn validate(&self) -> Result<()> {
        for (name, m) in [("m_s", self.m_s), ("m_i", self.m_i)] {
            if m == 0 {
                return Err(Error::InvalidParameter(format!("{name} must be >= 1")));
            }
            if m > MAX_NAKAGAMI_M {
                return Err(Error::Unsupported(format!(
                    "{name} = {m} outside supported range 1..={MAX_NAKAGAMI_M}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for ChannelModel {
    fn default() -> Self {
        Self::RAYLEIGH
    }
}

/// Nakagami shape equivalent to a Rician channel with factor `k`.
pub fn rician_to_nakagami(k: f64) -> f64 {
    (k + 1.0).powi(2) / (2.0 * k + 1.0)
}

/// Full scenario: deployment intensities, activity, propagation and powers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Intensity of all sensors, active or not (m⁻²).
    pub lambda_s_total: f64,
    /// Probability that a sensor transmits in a given slot.
    pub rho: f64,
    /// Number of random-access resources a sensor picks from uniformly.
    pub n_channels: u32,
    /// Collector intensity (m⁻²).
    pub lambda_c: f64,
    pub alpha: f64,
    /// Sensor transmit power (W).
    pub tx_power: f64,
    /// Receiver noise power (W); zero means interference limited.
    pub noise_power: f64,
    pub channel: ChannelModel,
}

impl SystemParams {
    /// Baseline deployment used throughout the numerical study:
    /// 10⁻² sensors/m², activity 10⁻⁴, one resource, α = 4, Rayleigh,
    /// λc/λs = 10, σ² = -110 dBm and P/σ² = 100 dB.
    pub fn baseline() -> Self {
        let noise_power = 1e-14;
        Self {
            lambda_s_total: 1e-2,
            rho: 1e-4,
            n_channels: 1,
            lambda_c: 1e-5,
            alpha: 4.0,
            tx_power: noise_power * 1e10,
            noise_power,
            channel: ChannelModel::RAYLEIGH,
        }
    }

    /// Parameters expressed directly by the effective interferer intensity
    /// and the normalized noise `σ²/P` (unit transmit power, full activity).
    pub fn normalized(
        lambda_s: f64,
        lambda_c: f64,
        alpha: f64,
        sigma_tilde_sq: f64,
        channel: ChannelModel,
    ) -> Self {
        Self {
            lambda_s_total: lambda_s,
            rho: 1.0,
            n_channels: 1,
            lambda_c,
            alpha,
            tx_power: 1.0,
            noise_power: sigma_tilde_sq,
            channel,
        }
    }

    /// Effective interferer intensity `λs = λs,total·ρ/N`.
    pub fn lambda_s(&self) -> f64 {
        self.lambda_s_total * self.rho / self.n_channels as f64
    }

    /// Normalized noise `σ̃² = σ²/P`.
    pub fn sigma_tilde_sq(&self) -> f64 {
        self.noise_power / self.tx_power
    }

    pub fn is_noiseless(&self) -> bool {
        self.noise_power == 0.0
    }

    /// Sets `λc` so that `λc/λs` equals `ratio`.
    pub fn with_lc_over_ls(mut self, ratio: f64) -> Self {
        self.lambda_c = ratio * self.lambda_s();
        self
    }

    /// Sets the transmit power so that `P/σ²` equals `db` decibels.
    pub fn with_snr_db(mut self, db: f64) -> Self {
        self.tx_power = self.noise_power * crate::units::db_to_linear(db);
        self
    }

    pub fn noiseless(mut self) -> Self {
        self.noise_power = 0.0;
        self
    }

    pub fn with_channel(mut self, channel: ChannelModel) -> Self {
        self.channel = channel;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lambda_s_total", self.lambda_s_total),
            ("lambda_c", self.lambda_c),
            ("tx_power", self.tx_power),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(Error::InvalidParameter(format!(
                "rho must lie in [0, 1], got {}",
                self.rho
            )));
        }
        if self.n_channels == 0 {
            return Err(Error::InvalidParameter("n_channels must be >= 1".into()));
        }
        if !(self.noise_power >= 0.0) || !self.noise_power.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise_power must be finite and >= 0, got {}",
                self.noise_power
            )));
        }
        if !(self.alpha > 2.0) || !self.alpha.is_finite() {
            return Err(Error::Domain(format!(
                "path-loss exponent must be > 2, got {}",
                self.alpha
            )));
        }
        self.channel.validate()
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::baseline()
    }
}
