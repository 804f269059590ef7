//! Complementary CDFs of the SIR/SINR seen by a sensor served by its nearest
//! collector.
//!
//! Three closed forms are provided: the interference-limited Nakagami form,
//! its Rayleigh special case, and the noisy Rayleigh form for `α = 4`. The
//! general evaluator integrates the radial expression numerically and works
//! for any Nakagami shapes, exponent and noise level; it is the reference the
//! closed forms are checked against.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::quad::{integrate, QuadratureSpec};
use crate::specialfn::{binomial, c_factor, delta_table, erfcx, factorial, falling_factorial};

/// `K = π C(1,4) = π²/2`.
pub const K_ALPHA4: f64 = PI * PI / 2.0;

/// The radial integral is truncated where its exponential envelope
/// `e^-(t + g(t))` has fallen to `e^-RADIAL_DECAY`.
const RADIAL_DECAY: f64 = 60.0;

fn check_beta(beta: f64) -> Result<()> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "threshold must be finite and >= 0, got {beta}"
        )));
    }
    Ok(())
}

fn is_alpha4(alpha: f64) -> bool {
    (alpha - 4.0).abs() < 1e-12
}

/// Noiseless Rayleigh CCDF `λc / (λc + λs C(1,α) β^(2/α))`. Noise in
/// `params` is ignored.
pub fn sir_ccdf_rayleigh(params: &SystemParams, beta: f64) -> Result<f64> {
    params.validate()?;
    check_beta(beta)?;
    let c = c_factor(1.0, params.alpha)?;
    let load = params.lambda_s() / params.lambda_c * c * beta.powf(2.0 / params.alpha);
    Ok(1.0 / (1.0 + load))
}

/// Noiseless Nakagami CCDF. With `D = λs C(m_i,α)(m_s β)^(2/α)` and
/// `q = D/(λc + D)`:
///
/// ```text
/// Pr{SIR > β} = (1 - q) Σ_{k<m_s} (1/k!) Σ_{l≤k} (-1)^(l+k) Δ_{k,l} q^l
/// ```
pub fn sir_ccdf_nakagami(params: &SystemParams, beta: f64) -> Result<f64> {
    params.validate()?;
    check_beta(beta)?;
    let m_s = params.channel.m_s as usize;
    let c = c_factor(params.channel.m_i as f64, params.alpha)?;
    let load =
        params.lambda_s() / params.lambda_c * c * (m_s as f64 * beta).powf(2.0 / params.alpha);
    let lead = 1.0 / (1.0 + load);
    let q = load / (1.0 + load);
    let deltas = delta_table(m_s, params.alpha)?;
    let mut sum = 0.0;
    for (k, row) in deltas.rows().iter().enumerate() {
        let mut inner = 0.0;
        for (l, d) in row.iter().enumerate() {
            let sign = if (l + k) % 2 == 0 { 1.0 } else { -1.0 };
            inner += sign * d * q.powi(l as i32);
        }
        sum += inner / factorial(k);
    }
    Ok((lead * sum).clamp(0.0, 1.0))
}

/// Noisy Rayleigh CCDF for `α = 4`, `κ·erfcx(τ)` with
/// `τ = (πλc + Kβ^½λs) / (2√(βσ̃²))` and `κ = π^(3/2) λc / (2√(βσ̃²))`.
pub fn sinr_ccdf_rayleigh_alpha4(params: &SystemParams, beta: f64) -> Result<f64> {
    params.validate()?;
    check_beta(beta)?;
    if !is_alpha4(params.alpha) {
        return Err(Error::Domain(format!(
            "the noisy Rayleigh closed form needs alpha = 4, got {}",
            params.alpha
        )));
    }
    if !params.channel.is_rayleigh() {
        return Err(Error::Domain(
            "the noisy Rayleigh closed form needs m_s = m_i = 1".into(),
        ));
    }
    if params.is_noiseless() {
        return Err(Error::Domain(
            "noise_power = 0: use the interference-limited form instead".into(),
        ));
    }
    if beta == 0.0 {
        return Ok(1.0);
    }
    let lambda_s = params.lambda_s();
    let lambda_c = params.lambda_c;
    let denom = 2.0 * (beta * params.sigma_tilde_sq()).sqrt();
    let tau = (PI * lambda_c + K_ALPHA4 * beta.sqrt() * lambda_s) / denom;
    let kappa = PI.powf(1.5) * lambda_c / denom;
    Ok((kappa * erfcx(tau)).clamp(0.0, 1.0))
}

/// Laplace transform of the aggregate interference at the typical collector,
/// `exp(-λs π ζ^(2/α) C(m_i,α))`.
pub fn interference_laplace(params: &SystemParams, zeta: f64) -> Result<f64> {
    params.validate()?;
    if !(zeta >= 0.0) || !zeta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "zeta must be finite and >= 0, got {zeta}"
        )));
    }
    let c = c_factor(params.channel.m_i as f64, params.alpha)?;
    Ok((-params.lambda_s() * PI * zeta.powf(2.0 / params.alpha) * c).exp())
}

/// Density of the distance to the nearest collector, `2πλc r e^(-λc π r²)`.
pub fn nearest_distance_pdf(lambda_c: f64, r: f64) -> f64 {
    if r < 0.0 {
        return 0.0;
    }
    2.0 * PI * lambda_c * r * (-lambda_c * PI * r * r).exp()
}

pub fn nearest_distance_cdf(lambda_c: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    -(-lambda_c * PI * r * r).exp_m1()
}

pub fn nearest_distance_median(lambda_c: f64) -> f64 {
    (std::f64::consts::LN_2 / (PI * lambda_c)).sqrt()
}

/// Radial-integral evaluation valid for every Nakagami channel, exponent and
/// noise level.
///
/// The k-th derivative of `exp(-g(ζ))`, `g = λs π C(m_i,α) ζ^(2/α) + σ̃² ζ`,
/// is assembled from the chain-rule expansion with `∂^k g^p` obtained by
/// expanding `g^p` binomially into powers of `ζ` and differentiating each
/// monomial through a falling factorial. After substituting `x = r²` and
/// `t = λc π x` the CCDF is `∫₀^∞ e^(-t) H(t) dt`.
pub fn sinr_ccdf_general(params: &SystemParams, beta: f64, quad: &QuadratureSpec) -> Result<f64> {
    params.validate()?;
    check_beta(beta)?;
    if beta == 0.0 {
        return Ok(1.0);
    }
    let integrand = RadialIntegrand::new(params, beta)?;
    let result = integrate(|t| integrand.eval(t), 0.0, integrand.cutoff(), quad)?;
    Ok(result.value.clamp(0.0, 1.0))
}

/// Pre-computed coefficients of the radial integrand for one `(params, β)`.
struct RadialIntegrand {
    alpha: f64,
    m_s: usize,
    /// u(t) = u_coef · t
    u_coef: f64,
    /// w(t) = w_coef · t^(α/2)
    w_coef: f64,
    /// Flattened (coefficient, q, p) triples of the derivative expansion,
    /// grouped per k.
    terms: Vec<Term>,
}

#[derive(Debug, Clone, Copy)]
struct Term {
    coef: f64,
    /// power of g
    j: i32,
    /// power of u
    q: i32,
    /// power of w
    r: i32,
}

impl RadialIntegrand {
    fn new(params: &SystemParams, beta: f64) -> Result<Self> {
        let alpha = params.alpha;
        let m_s = params.channel.m_s as usize;
        let c = c_factor(params.channel.m_i as f64, alpha)?;
        let lambda_c = params.lambda_c;
        let scale = m_s as f64 * beta;
        // x = t / (λc π); ζ = m_s β x^(α/2)
        let u_coef = params.lambda_s() * PI * c * scale.powf(2.0 / alpha) / (PI * lambda_c);
        let w_coef = params.sigma_tilde_sq() * scale * (PI * lambda_c).powf(-alpha / 2.0);
        let delta = 2.0 / alpha;

        let mut terms = Vec::new();
        for k in 0..m_s {
            let k_sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let k_coef = k_sign / factorial(k);
            for l in 0..=k {
                let l_coef = 1.0 / factorial(l);
                for j in 0..=l {
                    let sign = if (l + j) % 2 == 0 { 1.0 } else { -1.0 };
                    let p = l - j;
                    for q in 0..=p {
                        let s = delta * q as f64 + (p - q) as f64;
                        let ff = falling_factorial(s, k);
                        if ff == 0.0 {
                            continue;
                        }
                        let coef = k_coef * l_coef * sign * binomial(l, j) * binomial(p, q) * ff;
                        terms.push(Term {
                            coef,
                            j: j as i32,
                            q: q as i32,
                            r: (p - q) as i32,
                        });
                    }
                }
            }
        }
        Ok(Self {
            alpha,
            m_s,
            u_coef,
            w_coef,
            terms,
        })
    }

    fn exponent(&self, t: f64) -> f64 {
        t + self.u_coef * t + self.w_coef * t.powf(self.alpha / 2.0)
    }

    /// Point where the envelope exponent reaches [`RADIAL_DECAY`]. Strong
    /// noise or interference concentrates the integrand near zero, and a
    /// fixed range would let the quadrature step over it entirely.
    fn cutoff(&self) -> f64 {
        let (mut lo, mut hi) = (0.0, RADIAL_DECAY);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.exponent(mid) < RADIAL_DECAY {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    fn eval(&self, t: f64) -> f64 {
        let u = self.u_coef * t;
        let w = if self.w_coef == 0.0 {
            0.0
        } else {
            self.w_coef * t.powf(self.alpha / 2.0)
        };
        let g = u + w;
        let envelope = -t - g;
        if envelope < -745.0 {
            return 0.0;
        }
        let poly = if self.m_s == 1 {
            1.0
        } else {
            self.terms
                .iter()
                .map(|term| term.coef * g.powi(term.j) * u.powi(term.q) * w.powi(term.r))
                .sum()
        };
        envelope.exp() * poly
    }
}

/// Evaluation route for a CCDF curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CcdfMethod {
    /// Closed form when one applies, radial integral otherwise.
    #[default]
    Auto,
    ClosedForm,
    GeneralIntegral,
}

/// Which formula or procedure produced a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    SirRayleigh,
    SirNakagami,
    SinrRayleighAlpha4,
    GeneralIntegral,
    MonteCarlo,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::SirRayleigh => "sir_rayleigh",
            Provenance::SirNakagami => "sir_nakagami",
            Provenance::SinrRayleighAlpha4 => "sinr_rayleigh_alpha4",
            Provenance::GeneralIntegral => "general_integral",
            Provenance::MonteCarlo => "monte_carlo",
        }
    }
}

impl std::fmt::Display for Provenance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// CCDF sampled on an ascending threshold grid (linear SINR).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcdfCurve {
    pub thresholds: Vec<f64>,
    pub ccdf: Vec<f64>,
    pub provenance: Provenance,
}

impl CcdfCurve {
    pub fn len(&self) -> usize {
        self.thresholds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thresholds.is_empty()
    }

    /// Outage `1 - ccdf` per threshold.
    pub fn outage(&self) -> Vec<f64> {
        self.ccdf.iter().map(|p| 1.0 - p).collect()
    }

    /// Largest pointwise absolute gap to another curve on the same grid.
    pub fn max_abs_gap(&self, other: &CcdfCurve) -> Result<f64> {
        if self.thresholds != other.thresholds {
            return Err(Error::InvalidParameter(
                "curves use different threshold grids".into(),
            ));
        }
        Ok(self
            .ccdf
            .iter()
            .zip(&other.ccdf)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.thresholds
            .iter()
            .copied()
            .zip(self.ccdf.iter().copied())
    }
}

pub(crate) fn check_grid(thresholds: &[f64]) -> Result<()> {
    if thresholds.iter().any(|b| !(*b > 0.0) || !b.is_finite()) {
        return Err(Error::InvalidParameter(
            "thresholds must be finite and > 0".into(),
        ));
    }
    if thresholds.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter(
            "thresholds must be ascending".into(),
        ));
    }
    Ok(())
}

/// The closed form that applies to `params`, if any.
pub fn closed_form_for(params: &SystemParams) -> Option<Provenance> {
    match (params.is_noiseless(), params.channel.is_rayleigh()) {
        (true, true) => Some(Provenance::SirRayleigh),
        (true, false) => Some(Provenance::SirNakagami),
        (false, true) if is_alpha4(params.alpha) => Some(Provenance::SinrRayleighAlpha4),
        _ => None,
    }
}

/// Evaluates the CCDF on `thresholds`, choosing the formula per `method`.
/// Points are computed independently, so the result does not depend on
/// evaluation order.
pub fn ccdf_curve(
    params: &SystemParams,
    thresholds: &[f64],
    method: CcdfMethod,
) -> Result<CcdfCurve> {
    params.validate()?;
    check_grid(thresholds)?;
    let provenance = match method {
        CcdfMethod::Auto => closed_form_for(params).unwrap_or(Provenance::GeneralIntegral),
        CcdfMethod::ClosedForm => closed_form_for(params).ok_or_else(|| {
            Error::Unsupported(format!(
                "no closed form for alpha = {}, m_s = {}, m_i = {} with noise",
                params.alpha, params.channel.m_s, params.channel.m_i
            ))
        })?,
        CcdfMethod::GeneralIntegral => Provenance::GeneralIntegral,
    };
    let quad = QuadratureSpec::default();
    let ccdf = thresholds
        .par_iter()
        .map(|&beta| match provenance {
            Provenance::SirRayleigh => sir_ccdf_rayleigh(params, beta),
            Provenance::SirNakagami => sir_ccdf_nakagami(params, beta),
            Provenance::SinrRayleighAlpha4 => sinr_ccdf_rayleigh_alpha4(params, beta),
            _ => sinr_ccdf_general(params, beta, &quad),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CcdfCurve {
        thresholds: thresholds.to_vec(),
        ccdf,
        provenance,
    })
}

/// Thresholds `lo, lo+step, ..., ≤ hi` in dB, converted to linear.
pub fn db_grid(lo_db: f64, hi_db: f64, step_db: f64) -> Result<Vec<f64>> {
    if !(step_db > 0.0) || !lo_db.is_finite() || !hi_db.is_finite() || hi_db < lo_db {
        return Err(Error::InvalidParameter(format!(
            "bad dB range {lo_db}:{hi_db}:{step_db}"
        )));
    }
    let n = ((hi_db - lo_db) / step_db + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| crate::units::db_to_linear(lo_db + i as f64 * step_db))
        .collect())
}
