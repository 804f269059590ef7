//! Inverse problems: how many collectors per m² and how much transmit power
//! are needed to hold the outage below a target.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::analytic::{sir_ccdf_nakagami, sir_ccdf_rayleigh, K_ALPHA4};
use crate::error::{Error, Result};
use crate::params::{ChannelModel, SystemParams};
use crate::specialfn::c_factor;

/// Default power-design constant.
pub const DEFAULT_DESIGN_C: f64 = 0.1;

/// Required SINR `beta_t` (linear) and tolerated outage `epsilon_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignTarget {
    pub beta_t: f64,
    pub epsilon_t: f64,
}

impl DesignTarget {
    pub fn new(beta_t: f64, epsilon_t: f64) -> Result<Self> {
        let t = Self { beta_t, epsilon_t };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon_t > 0.0 && self.epsilon_t < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "target outage must lie in (0, 1), got {}",
                self.epsilon_t
            )));
        }
        if !(self.beta_t > 0.0) || !self.beta_t.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "threshold must be finite and > 0, got {}",
                self.beta_t
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RequirementKind {
    /// Outage ≤ target iff λc ≥ bound (noiseless Rayleigh).
    NecessaryAndSufficient,
    /// λc ≥ bound guarantees the target; smaller λc may also work.
    Sufficient,
    /// Two-step power/density plan; the noise margin is only approximately
    /// absorbed, so the target is not guaranteed.
    Approximate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeploymentRequirement {
    pub lambda_c_min: f64,
    pub kind: RequirementKind,
    /// Designed transmit power (W), when the plan includes one.
    pub tx_power: Option<f64>,
    /// Power-design constant `c` used to pick `tx_power`.
    pub design_c: Option<f64>,
}

fn check_intensity(lambda_s: f64) -> Result<()> {
    if !(lambda_s > 0.0) || !lambda_s.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "interferer intensity must be finite and > 0, got {lambda_s}"
        )));
    }
    Ok(())
}

/// Interference-limited Rayleigh requirement
/// `λc ≥ (1-ε)/ε · C(1,α) · β^(2/α) · λs`, which is exact.
pub fn required_lambda_c_sir(
    lambda_s: f64,
    alpha: f64,
    target: &DesignTarget,
) -> Result<DeploymentRequirement> {
    target.validate()?;
    check_intensity(lambda_s)?;
    let c = c_factor(1.0, alpha)?;
    let eps = target.epsilon_t;
    Ok(DeploymentRequirement {
        lambda_c_min: (1.0 - eps) / eps * c * target.beta_t.powf(2.0 / alpha) * lambda_s,
        kind: RequirementKind::NecessaryAndSufficient,
        tx_power: None,
        design_c: None,
    })
}

/// Noisy Rayleigh requirement for `α = 4`:
///
/// ```text
/// λc ≥ Kβ^½ / (2πε) · [(1-2ε) + √(1 + 8ε(1-ε)σ̃²/(Kλs)²)] · λs
/// ```
///
/// It follows from a lower bound on `erfcx`, so it is sufficient only; at
/// `σ̃² = 0` it coincides with [`required_lambda_c_sir`] for `α = 4`.
pub fn required_lambda_c_sinr(
    lambda_s: f64,
    sigma_tilde_sq: f64,
    target: &DesignTarget,
) -> Result<DeploymentRequirement> {
    target.validate()?;
    check_intensity(lambda_s)?;
    if !(sigma_tilde_sq >= 0.0) || !sigma_tilde_sq.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "normalized noise must be finite and >= 0, got {sigma_tilde_sq}"
        )));
    }
    let eps = target.epsilon_t;
    let k_ls = K_ALPHA4 * lambda_s;
    let root = (1.0 + 8.0 * eps * (1.0 - eps) * sigma_tilde_sq / (k_ls * k_ls)).sqrt();
    let lambda_c_min =
        K_ALPHA4 * target.beta_t.sqrt() / (2.0 * PI * eps) * ((1.0 - 2.0 * eps) + root) * lambda_s;
    Ok(DeploymentRequirement {
        lambda_c_min,
        kind: RequirementKind::Sufficient,
        tx_power: None,
        design_c: None,
    })
}

/// Result of the transmit-power rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TxPowerDesign {
    /// Transmit power (W).
    pub tx_power: f64,
    pub c: f64,
    /// `8(σ²/P)/(π²λs)²`; the noise term is negligible when this is ≪ 1.
    pub noise_merit: f64,
}

/// `P = c · 8σ² / (π⁴ λs²)`.
pub fn design_tx_power(lambda_s: f64, noise_power: f64, c: f64) -> Result<TxPowerDesign> {
    check_intensity(lambda_s)?;
    if !(noise_power > 0.0) || !noise_power.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "noise power must be finite and > 0, got {noise_power}"
        )));
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "design constant c must lie in (0, 1), got {c}"
        )));
    }
    let tx_power = c * 8.0 * noise_power / (PI.powi(4) * lambda_s * lambda_s);
    Ok(TxPowerDesign {
        tx_power,
        c,
        noise_merit: noise_merit(lambda_s, noise_power / tx_power),
    })
}

/// `8σ̃² / (π²λs)²`, the noise term of the α = 4 density bound after the
/// AM–GM step.
pub fn noise_merit(lambda_s: f64, sigma_tilde_sq: f64) -> f64 {
    8.0 * sigma_tilde_sq / (PI * PI * lambda_s).powi(2)
}

/// Two-step plan for `α = 4`, Rayleigh: transmit power from
/// [`design_tx_power`], then the collector intensity from the
/// interference-limited rule.
pub fn plan_deployment(
    lambda_s: f64,
    noise_power: f64,
    target: &DesignTarget,
    c: f64,
) -> Result<DeploymentRequirement> {
    let power = design_tx_power(lambda_s, noise_power, c)?;
    let density = required_lambda_c_sir(lambda_s, 4.0, target)?;
    Ok(DeploymentRequirement {
        lambda_c_min: density.lambda_c_min,
        kind: RequirementKind::Approximate,
        tx_power: Some(power.tx_power),
        design_c: Some(c),
    })
}

/// Equivalent-density ratio `(1/ε_m - 1) / (1/ε_o - 1)` between a channel
/// with outage `outage_other` and Rayleigh with outage `outage_rayleigh` at
/// the same deployment. Values above 1 mean the other channel behaves like a
/// denser Rayleigh deployment.
pub fn channel_density_ratio(outage_rayleigh: f64, outage_other: f64) -> Result<f64> {
    for (name, v) in [
        ("outage_rayleigh", outage_rayleigh),
        ("outage_other", outage_other),
    ] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::Domain(format!("{name} must lie in (0, 1), got {v}")));
        }
    }
    Ok((1.0 / outage_other - 1.0) / (1.0 / outage_rayleigh - 1.0))
}

/// Interference-limited outages of `channel` and of Rayleigh at the same
/// deployment, and their density ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelComparison {
    pub outage_rayleigh: f64,
    pub outage_other: f64,
    pub density_ratio: f64,
}

pub fn compare_channels(
    params: &SystemParams,
    channel: ChannelModel,
    beta_t: f64,
) -> Result<ChannelComparison> {
    let reference = params.noiseless().with_channel(ChannelModel::RAYLEIGH);
    let other = params.noiseless().with_channel(channel);
    let outage_rayleigh = 1.0 - sir_ccdf_rayleigh(&reference, beta_t)?;
    let outage_other = 1.0 - sir_ccdf_nakagami(&other, beta_t)?;
    Ok(ChannelComparison {
        outage_rayleigh,
        outage_other,
        density_ratio: channel_density_ratio(outage_rayleigh, outage_other)?,
    })
}
