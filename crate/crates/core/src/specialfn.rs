//! Special-function kernel: log-gamma, gamma, the scaled complementary error
//! function and the combinatorial coefficients used by the Nakagami closed
//! form.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Lanczos approximation, g = 7, nine coefficients.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Largest Nakagami shape for which the Δ table is considered well conditioned.
pub const MAX_DELTA_ORDER: usize = 8;

fn lanczos_sum(z: f64) -> f64 {
    // z = x - 1
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    acc
}

/// Natural log of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(log_gamma_pos(x))
}

fn log_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        return (PI / (PI * x).sin()).ln() - log_gamma_pos(1.0 - x);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln()
}

/// Gamma function for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma requires x > 0, got {x}")));
    }
    Ok(gamma_pos(x))
}

fn gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_pos(1.0 - x));
    }
    if x > 140.0 {
        return log_gamma_pos(x).exp();
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * lanczos_sum(z)
}

/// Crossover between the power series and the continued fraction in [`erfcx`].
const ERFCX_SERIES_LIMIT: f64 = 2.0;

/// Scaled complementary error function `exp(x²)·erfc(x)`.
///
/// For `0 ≤ x < 2` it subtracts the all-positive series of `exp(x²)·erf(x)`
/// from `exp(x²)`; above that it evaluates the Laplace continued fraction
/// with the modified Lentz algorithm. Neither branch forms `exp(x²)` for
/// large `x`, so the result stays finite up to `f64::MAX`.
pub fn erfcx(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        // erfc(-x) = 2 - erfc(x)
        return 2.0 * (x * x).exp() - erfcx(-x);
    }
    if x < ERFCX_SERIES_LIMIT {
        erfcx_series(x)
    } else if x < 1e8 {
        erfcx_continued_fraction(x)
    } else {
        // CF truncated after the first correction; relative error < 1e-16 here
        FRAC_1_SQRT_PI / x * (1.0 - 0.5 / (x * x))
    }
}

fn erfcx_series(x: f64) -> f64 {
    // exp(x²) erf(x) = (2/√π) Σ 2ⁿ x^(2n+1) / (2n+1)!!
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    x2.exp() - 2.0 * FRAC_1_SQRT_PI * sum
}

fn erfcx_continued_fraction(x: f64) -> f64 {
    // erfcx(x) = (1/√π) · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..5000 {
        let a = 0.5 * k as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    FRAC_1_SQRT_PI / f
}

/// Lower bound `(2/√π)·x/(1+2x²)` on [`erfcx`] for `x > 0`.
pub fn erfcx_lower_bound(x: f64) -> f64 {
    2.0 * FRAC_1_SQRT_PI * x / (1.0 + 2.0 * x * x)
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x > 27.3 {
        return 0.0;
    }
    erfcx(x) * (-x * x).exp()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "path-loss exponent must be finite and > 2, got {alpha}"
        )));
    }
    Ok(())
}

/// `C(m,α) = m^(-2/α) Γ(1-2/α) Γ(m+2/α) / Γ(m)`, the normalized fractional
/// moment of a unit-mean Gamma(m) fading gain times `Γ(1-2/α)`.
pub fn c_factor(m: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::Domain(format!("fading shape must be > 0, got {m}")));
    }
    let delta = 2.0 / alpha;
    let ratio = if m > 100.0 {
        (log_gamma_pos(m + delta) - log_gamma_pos(m)).exp()
    } else {
        gamma_pos(m + delta) / gamma_pos(m)
    };
    Ok(m.powf(-delta) * gamma_pos(1.0 - delta) * ratio)
}

/// Trigonometric form of `C(1,α) = 2π / (α sin(2π/α))`.
pub fn c_factor_rayleigh(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let x = 2.0 * PI / alpha;
    Ok(x / x.sin())
}

/// Lower-triangular table of `Δ_{k,l}` for `0 ≤ l ≤ k < m_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaTable {
    alpha: f64,
    rows: Vec<Vec<f64>>,
}

impl DeltaTable {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of rows, i.e. the Nakagami shape `m_s` the table was built for.
    pub fn order(&self) -> usize {
        self.rows.len()
    }

    /// `Δ_{k,l}`; `None` outside `l ≤ k < order`.
    pub fn get(&self, k: usize, l: usize) -> Option<f64> {
        self.rows.get(k).and_then(|row| row.get(l)).copied()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

/// Builds `Δ_{k,l} = Σ_j (-1)^j C(l,j) Π_{i<k} [(2/α)(l-j) - i]` with
/// `Δ_{0,0} = 1`.
pub fn delta_table(m_s: usize, alpha: f64) -> Result<DeltaTable> {
    check_alpha(alpha)?;
    if m_s == 0 {
        return Err(Error::Domain("m_s must be at least 1".into()));
    }
    if m_s > MAX_DELTA_ORDER {
        return Err(Error::Unsupported(format!(
            "m_s = {m_s} exceeds the supported range 1..={MAX_DELTA_ORDER}"
        )));
    }
    let delta = 2.0 / alpha;
    let mut rows = Vec::with_capacity(m_s);
    for k in 0..m_s {
        let mut row = Vec::with_capacity(k + 1);
        for l in 0..=k {
            let mut sum = 0.0;
            for j in 0..=l {
                let s = delta * (l - j) as f64;
                let falling: f64 = (0..k).map(|i| s - i as f64).product();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sum += sign * binomial(l, j) * falling;
            }
            row.push(sum);
        }
        rows.push(row);
    }
    Ok(DeltaTable { alpha, rows })
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Falling factorial `s (s-1) ... (s-k+1)`.
pub(crate) fn falling_factorial(s: f64, k: usize) -> f64 {
    (0..k).map(|i| s - i as f64).product()
}
