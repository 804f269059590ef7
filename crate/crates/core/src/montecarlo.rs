//! Monte Carlo simulator of the typical sensor-to-collector link.
//!
//! Each trial places the serving collector at the origin, draws the serving
//! distance from the nearest-neighbour law, scatters interferers as a
//! homogeneous PPP of intensity `λs` on a disc around the collector, draws
//! unit-mean Gamma fading for every link and returns
//! `r^-α G_S / (Σ |X_j|^-α G_j + σ̃²)`.
//!
//! Trial `i` draws from its own ChaCha8 stream (`seed`, stream `i`), so
//! results are bit-for-bit identical for any number of worker threads.
//! Within a trial the draw order is: serving distance, desired gain, then
//! for each interferer its arrival increment followed by its gain.

use std::f64::consts::PI;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{check_grid, CcdfCurve, Provenance};
use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Mean interference from beyond the auto window, relative to the reference
/// level (see [`WindowInfo::tail_ratio`]).
pub const AUTO_TAIL_RATIO: f64 = 1e-4;

/// Cap on the expected interferer count per trial for the auto window.
pub const MAX_AUTO_INTERFERERS: f64 = 20_000.0;

/// Expected collector count in the full-geometry disc; an empty disc has
/// probability `e^-60`.
const FULL_GEOMETRY_COLLECTORS: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum WindowRadius {
    #[default]
    Auto,
    /// Explicit radius in metres.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    /// Serving distance drawn from its closed-form law, interferers by
    /// ordered arrivals.
    #[default]
    Direct,
    /// Both point processes instantiated explicitly; slower, for validation.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: SystemParams,
    pub trials: u64,
    #[serde(default)]
    pub window: WindowRadius,
    pub seed: u64,
    /// Pair trials `2i` and `2i+1` on one stream with mirrored uniforms.
    #[serde(default)]
    pub antithetic: bool,
    /// Replace all fading gains by 1 (the `m → ∞` limit).
    #[serde(default)]
    pub no_fading: bool,
    #[serde(default)]
    pub geometry: Geometry,
}

impl SimConfig {
    pub fn new(params: SystemParams, trials: u64, seed: u64) -> Self {
        Self {
            params,
            trials,
            window: WindowRadius::Auto,
            seed,
            antithetic: false,
            no_fading: false,
            geometry: Geometry::Direct,
        }
    }

    pub fn with_window(mut self, window: WindowRadius) -> Self {
        self.window = window;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if let WindowRadius::Fixed(r) = self.window {
            if !(r > 0.0) || !r.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "window radius must be > 0, got {r}"
                )));
            }
        }
        Ok(())
    }

    pub fn window_info(&self) -> WindowInfo {
        match self.window {
            WindowRadius::Auto => auto_window(&self.params),
            WindowRadius::Fixed(r) => WindowInfo::for_radius(&self.params, r),
        }
    }
}

/// Resolved interferer window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowInfo {
    pub radius: f64,
    /// `λs π R²`.
    pub expected_interferers: f64,
    /// Mean interference from outside the disc, `2πλs R^(2-α)/(α-2)`,
    /// divided by the mean interference from outside the radius that holds
    /// one interferer on average, `r₁ = (πλs)^-½`. Equals `(R/r₁)^(2-α)`.
    pub tail_ratio: f64,
}

impl WindowInfo {
    fn for_radius(params: &SystemParams, radius: f64) -> Self {
        let lambda_s = params.lambda_s();
        if lambda_s == 0.0 {
            return Self {
                radius,
                expected_interferers: 0.0,
                tail_ratio: 0.0,
            };
        }
        let reference = 1.0 / (PI * lambda_s).sqrt();
        Self {
            radius,
            expected_interferers: lambda_s * PI * radius * radius,
            tail_ratio: (radius / reference).powf(2.0 - params.alpha),
        }
    }
}

/// Smallest disc whose tail ratio is [`AUTO_TAIL_RATIO`], shrunk if needed
/// so that it holds at most [`MAX_AUTO_INTERFERERS`] interferers on average.
/// Small exponents (α near 2) hit the cap; the achieved ratio is reported.
pub fn auto_window(params: &SystemParams) -> WindowInfo {
    let lambda_s = params.lambda_s();
    if lambda_s == 0.0 {
        return WindowInfo::for_radius(params, 1.0);
    }
    let reference = 1.0 / (PI * lambda_s).sqrt();
    let wanted = reference * AUTO_TAIL_RATIO.powf(1.0 / (2.0 - params.alpha));
    let capped = (MAX_AUTO_INTERFERERS / (PI * lambda_s)).sqrt();
    WindowInfo::for_radius(params, wanted.min(capped))
}

/// Monte Carlo outage estimate with a normal-approximation 95 % interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageEstimate {
    pub threshold_beta: f64,
    pub outage: f64,
    pub ci_halfwidth_95: f64,
    pub trials: u64,
    pub seed: u64,
}

impl OutageEstimate {
    fn from_count(threshold_beta: f64, outages: u64, trials: u64, seed: u64) -> Self {
        let p = outages as f64 / trials as f64;
        Self {
            threshold_beta,
            outage: p,
            ci_halfwidth_95: 1.96 * (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
            seed,
        }
    }
}

/// One realization of the typical link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSample {
    pub serving_distance: f64,
    /// Desired-link fading gain.
    pub signal_gain: f64,
    /// Aggregate normalized interference `Σ |X_j|^-α G_j`.
    pub interference: f64,
    /// Linear SINR; `+∞` with neither interferers nor noise.
    pub sinr: f64,
}

trait Draws {
    fn uniform(&mut self) -> f64;
    fn exp1(&mut self) -> f64;
    fn poisson(&mut self, mean: f64) -> u64;
}

struct Plain(ChaCha8Rng);

impl Draws for Plain {
    #[inline]
    fn uniform(&mut self) -> f64 {
        self.0.sample(Open01)
    }

    #[inline]
    fn exp1(&mut self) -> f64 {
        Exp1.sample(&mut self.0)
    }

    fn poisson(&mut self, mean: f64) -> u64 {
        poisson_draw(&mut self.0, mean)
    }
}

/// Inverse-transform draws, optionally mirrored (`u → 1-u`).
struct Mirrored {
    rng: ChaCha8Rng,
    flip: bool,
}

impl Draws for Mirrored {
    #[inline]
    fn uniform(&mut self) -> f64 {
        let u: f64 = self.rng.sample(Open01);
        if self.flip {
            1.0 - u
        } else {
            u
        }
    }

    #[inline]
    fn exp1(&mut self) -> f64 {
        -self.uniform().ln()
    }

    fn poisson(&mut self, mean: f64) -> u64 {
        poisson_draw(&mut self.rng, mean)
    }
}

fn poisson_draw(rng: &mut ChaCha8Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean)
        .expect("positive finite mean")
        .sample(rng) as u64
}

#[derive(Debug, Clone, Copy)]
enum Gain {
    Unit,
    /// Unit-mean Gamma(m, 1/m) as the mean of `m` standard exponentials.
    Gamma(u32),
}

impl Gain {
    #[inline]
    fn draw<D: Draws>(self, d: &mut D) -> f64 {
        match self {
            Gain::Unit => 1.0,
            Gain::Gamma(1) => d.exp1(),
            Gain::Gamma(m) => (0..m).map(|_| d.exp1()).sum::<f64>() / m as f64,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum PathLoss {
    /// α/2 integral: `d²^-k`
    Integer(i32),
    Real(f64),
}

impl PathLoss {
    #[inline]
    fn at_sq(self, d2: f64) -> f64 {
        match self {
            PathLoss::Integer(2) => {
                let inv = 1.0 / d2;
                inv * inv
            }
            PathLoss::Integer(k) => d2.powi(-k),
            PathLoss::Real(h) => d2.powf(-h),
        }
    }
}

/// Per-config constants for drawing trials.
struct Simulator {
    config: SimConfig,
    lambda_s: f64,
    sigma_tilde_sq: f64,
    path: PathLoss,
    signal_gain: Gain,
    interferer_gain: Gain,
    window: WindowInfo,
}

impl Simulator {
    fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let params = config.params;
        let half = params.alpha / 2.0;
        let path = if half.fract() == 0.0 && half <= 16.0 {
            PathLoss::Integer(half as i32)
        } else {
            PathLoss::Real(half)
        };
        let (signal_gain, interferer_gain) = if config.no_fading {
            (Gain::Unit, Gain::Unit)
        } else {
            (
                Gain::Gamma(params.channel.m_s),
                Gain::Gamma(params.channel.m_i),
            )
        };
        Ok(Self {
            config: *config,
            lambda_s: params.lambda_s(),
            sigma_tilde_sq: params.sigma_tilde_sq(),
            path,
            signal_gain,
            interferer_gain,
            window: config.window_info(),
        })
    }

    fn trial(&self, index: u64) -> TrialSample {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        if self.config.antithetic {
            rng.set_stream(index / 2);
            let mut d = Mirrored {
                rng,
                flip: index % 2 == 1,
            };
            self.trial_with(&mut d)
        } else {
            rng.set_stream(index);
            self.trial_with(&mut Plain(rng))
        }
    }

    fn trial_with<D: Draws>(&self, d: &mut D) -> TrialSample {
        match self.config.geometry {
            Geometry::Direct => self.direct_trial(d),
            Geometry::Full => self.full_trial(d),
        }
    }

    fn direct_trial<D: Draws>(&self, d: &mut D) -> TrialSample {
        let params = &self.config.params;
        let serving_sq = d.exp1() / (PI * params.lambda_c);
        let signal_gain = self.signal_gain.draw(d);
        let mut interference = 0.0;
        if self.lambda_s > 0.0 {
            // ordered PPP distances: πλs|X_(n)|² is the n-th arrival of a
            // unit-rate Poisson process
            let inv_rate = 1.0 / (PI * self.lambda_s);
            let limit = self.window.expected_interferers;
            let mut arrival = d.exp1();
            while arrival <= limit {
                let g = self.interferer_gain.draw(d);
                interference += g * self.path.at_sq(arrival * inv_rate);
                arrival += d.exp1();
            }
        }
        self.finish(serving_sq, signal_gain, interference)
    }

    fn full_trial<D: Draws>(&self, d: &mut D) -> TrialSample {
        let params = &self.config.params;
        // typical sensor at the origin; find its nearest collector
        let collector_radius = (FULL_GEOMETRY_COLLECTORS / (PI * params.lambda_c)).sqrt();
        let n_collectors = d.poisson(FULL_GEOMETRY_COLLECTORS);
        let mut serving_sq = f64::INFINITY;
        for _ in 0..n_collectors {
            let [x, y] = uniform_in_disc(d, collector_radius);
            serving_sq = serving_sq.min(x * x + y * y);
        }
        if !serving_sq.is_finite() {
            serving_sq = collector_radius * collector_radius;
        }
        let signal_gain = self.signal_gain.draw(d);
        // interferers: an independent PPP, so its disc may be centred on the
        // serving collector directly
        let mut interference = 0.0;
        let n_interferers = d.poisson(self.window.expected_interferers);
        for _ in 0..n_interferers {
            let [x, y] = uniform_in_disc(d, self.window.radius);
            let g = self.interferer_gain.draw(d);
            interference += g * self.path.at_sq(x * x + y * y);
        }
        self.finish(serving_sq, signal_gain, interference)
    }

    #[inline]
    fn finish(&self, serving_sq: f64, signal_gain: f64, interference: f64) -> TrialSample {
        let signal = signal_gain * self.path.at_sq(serving_sq);
        let denom = interference + self.sigma_tilde_sq;
        let sinr = if denom == 0.0 {
            f64::INFINITY
        } else {
            signal / denom
        };
        TrialSample {
            serving_distance: serving_sq.sqrt(),
            signal_gain,
            interference,
            sinr,
        }
    }

    fn sinr_samples(&self) -> Vec<f64> {
        (0..self.config.trials)
            .into_par_iter()
            .map(|i| self.trial(i).sinr)
            .collect()
    }
}

fn uniform_in_disc<D: Draws>(d: &mut D, radius: f64) -> [f64; 2] {
    let r = radius * d.uniform().sqrt();
    let theta = 2.0 * PI * d.uniform();
    [r * theta.cos(), r * theta.sin()]
}

/// Full detail of trial `trial_index`.
pub fn sample_trial_detail(config: &SimConfig, trial_index: u64) -> Result<TrialSample> {
    Ok(Simulator::new(config)?.trial(trial_index))
}

/// Linear SINR of trial `trial_index`; deterministic in `(seed, trial_index)`.
pub fn sample_trial(config: &SimConfig, trial_index: u64) -> Result<f64> {
    sample_trial_detail(config, trial_index).map(|s| s.sinr)
}

/// All trials of `config` in trial order.
pub fn sample_trials(config: &SimConfig) -> Result<Vec<TrialSample>> {
    let sim = Simulator::new(config)?;
    Ok((0..config.trials)
        .into_par_iter()
        .map(|i| sim.trial(i))
        .collect())
}

/// Linear SINR of every trial, in trial order.
pub fn sample_sinr(config: &SimConfig) -> Result<Vec<f64>> {
    Ok(Simulator::new(config)?.sinr_samples())
}

/// Fraction of trials with `SINR < beta_t`.
pub fn estimate_outage(config: &SimConfig, beta_t: f64) -> Result<OutageEstimate> {
    if !(beta_t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold must be >= 0, got {beta_t}"
        )));
    }
    let sim = Simulator::new(config)?;
    let outages = (0..config.trials)
        .into_par_iter()
        .filter(|&i| sim.trial(i).sinr < beta_t)
        .count() as u64;
    Ok(OutageEstimate::from_count(
        beta_t,
        outages,
        config.trials,
        config.seed,
    ))
}

/// Outage estimates at every threshold from one shared sample set.
pub fn estimate_outages(config: &SimConfig, thresholds: &[f64]) -> Result<Vec<OutageEstimate>> {
    check_grid(thresholds)?;
    let mut samples = sample_sinr(config)?;
    Ok(outages_from_samples(&mut samples, thresholds, config.seed))
}

/// Outage estimates from precomputed samples; sorts `samples` in place.
pub fn outages_from_samples(
    samples: &mut [f64],
    thresholds: &[f64],
    seed: u64,
) -> Vec<OutageEstimate> {
    samples.sort_unstable_by(f64::total_cmp);
    let n = samples.len() as u64;
    thresholds
        .iter()
        .map(|&beta| {
            let below = samples.partition_point(|&s| s < beta) as u64;
            OutageEstimate::from_count(beta, below, n, seed)
        })
        .collect()
}

/// Empirical CCDF `#{SINR > β}/n` on `thresholds`.
pub fn empirical_ccdf(config: &SimConfig, thresholds: &[f64]) -> Result<CcdfCurve> {
    check_grid(thresholds)?;
    let mut samples = sample_sinr(config)?;
    Ok(ccdf_from_samples(&mut samples, thresholds))
}

/// Empirical CCDF from precomputed samples; sorts `samples` in place.
pub fn ccdf_from_samples(samples: &mut [f64], thresholds: &[f64]) -> CcdfCurve {
    samples.sort_unstable_by(f64::total_cmp);
    let n = samples.len() as f64;
    let ccdf = thresholds
        .iter()
        .map(|&beta| {
            let at_most = samples.partition_point(|&s| s <= beta);
            (samples.len() - at_most) as f64 / n
        })
        .collect();
    CcdfCurve {
        thresholds: thresholds.to_vec(),
        ccdf,
        provenance: Provenance::MonteCarlo,
    }
}

/// Snapshot of both point processes on a disc, with nearest-collector
/// association, for Voronoi-style plots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    pub radius: f64,
    pub collectors: Vec<[f64; 2]>,
    pub sensors: Vec<[f64; 2]>,
    /// Whether each sensor transmits in this slot (probability `rho`).
    pub active: Vec<bool>,
    /// Index of the serving (nearest) collector per sensor.
    pub serving: Vec<usize>,
}

pub fn deployment_snapshot(params: &SystemParams, radius: f64, seed: u64) -> Result<Deployment> {
    params.validate()?;
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "radius must be > 0, got {radius}"
        )));
    }
    let mut d = Plain(ChaCha8Rng::seed_from_u64(seed));
    let area = PI * radius * radius;
    let n_c = d.poisson(params.lambda_c * area) as usize;
    let n_s = d.poisson(params.lambda_s_total * area) as usize;
    let collectors: Vec<[f64; 2]> = (0..n_c).map(|_| uniform_in_disc(&mut d, radius)).collect();
    let sensors: Vec<[f64; 2]> = (0..n_s).map(|_| uniform_in_disc(&mut d, radius)).collect();
    let active = (0..n_s).map(|_| d.uniform() < params.rho).collect();
    let serving = sensors
        .iter()
        .map(|s| {
            collectors
                .iter()
                .enumerate()
                .map(|(i, c)| (i, (c[0] - s[0]).powi(2) + (c[1] - s[1]).powi(2)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map_or(usize::MAX, |(i, _)| i)
        })
        .collect();
    Ok(Deployment {
        radius,
        collectors,
        sensors,
        active,
        serving,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{nearest_distance_cdf, sir_ccdf_rayleigh};
    use crate::params::ChannelModel;

    fn base(ratio: f64) -> SystemParams {
        SystemParams::baseline().with_lc_over_ls(ratio)
    }

    #[test]
    fn deterministic_per_trial() {
        let cfg = SimConfig::new(base(10.0).with_alpha(6.0), 64, 7);
        let a = sample_sinr(&cfg).unwrap();
        let b: Vec<f64> = (0..64).map(|i| sample_trial(&cfg, i).unwrap()).collect();
        assert_eq!(a, b);
        let other = sample_sinr(&SimConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let cfg = SimConfig::new(base(10.0).with_alpha(5.0), 2000, 3);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = one.install(|| estimate_outage(&cfg, 1.0).unwrap());
        let b = four.install(|| estimate_outage(&cfg, 1.0).unwrap());
        assert_eq!(a, b);
        let sa = one.install(|| sample_sinr(&cfg).unwrap());
        let sb = four.install(|| sample_sinr(&cfg).unwrap());
        assert_eq!(sa, sb);
    }

    #[test]
    fn no_interferers_no_noise_is_infinite() {
        let mut p = base(10.0).noiseless();
        p.rho = 0.0;
        let cfg = SimConfig::new(p, 10, 1);
        for i in 0..10 {
            assert_eq!(sample_trial(&cfg, i).unwrap(), f64::INFINITY);
        }
        let est = estimate_outage(&cfg, 1e6).unwrap();
        assert_eq!(est.outage, 0.0);
    }

    #[test]
    fn no_fading_uses_geometry_only() {
        let cfg = SimConfig {
            no_fading: true,
            ..SimConfig::new(base(10.0).with_alpha(6.0), 20, 5)
        };
        for i in 0..20 {
            assert_eq!(sample_trial_detail(&cfg, i).unwrap().signal_gain, 1.0);
        }
    }

    #[test]
    fn gamma_gains_have_unit_mean() {
        for m in 1..=3 {
            let mut d = Plain(ChaCha8Rng::seed_from_u64(11 + m as u64));
            let n = 1_000_000;
            let mean = (0..n).map(|_| Gain::Gamma(m).draw(&mut d)).sum::<f64>() / n as f64;
            assert!((mean - 1.0).abs() < 0.003, "m = {m}: mean {mean}");
        }
    }

    #[test]
    fn gamma_gain_variance_is_one_over_m() {
        let mut d = Plain(ChaCha8Rng::seed_from_u64(99));
        let n = 400_000;
        let xs: Vec<f64> = (0..n).map(|_| Gain::Gamma(4).draw(&mut d)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!((var - 0.25).abs() < 0.005, "{var}");
    }

    #[test]
    fn auto_window_rule() {
        let p = base(10.0);
        let w = auto_window(&p);
        assert!((w.tail_ratio - AUTO_TAIL_RATIO).abs() < 1e-12);
        assert!((w.expected_interferers - 1e4).abs() < 1e-6);
        // mean tail interference equals the ratio times the reference level
        let ls = p.lambda_s();
        let tail = 2.0 * PI * ls * w.radius.powf(2.0 - p.alpha) / (p.alpha - 2.0);
        let r1 = 1.0 / (PI * ls).sqrt();
        let reference = 2.0 * PI * ls * r1.powf(2.0 - p.alpha) / (p.alpha - 2.0);
        assert!((tail / reference - w.tail_ratio).abs() < 1e-12);

        let w3 = auto_window(&p.with_alpha(3.0));
        assert!((w3.expected_interferers - MAX_AUTO_INTERFERERS).abs() < 1e-6);
        assert!(w3.tail_ratio > AUTO_TAIL_RATIO);
        let w6 = auto_window(&p.with_alpha(6.0));
        assert!((w6.expected_interferers - 100.0).abs() < 1e-9);
    }

    #[test]
    fn nearest_distance_matches_law() {
        let p = SystemParams::baseline().noiseless();
        let lambda_c = 5e-3;
        let p = SystemParams {
            lambda_c,
            ..p.with_alpha(8.0)
        };
        for geometry in [Geometry::Direct, Geometry::Full] {
            let cfg = SimConfig {
                geometry,
                ..SimConfig::new(p, 20_000, 17)
            };
            let mut r: Vec<f64> = sample_trials(&cfg)
                .unwrap()
                .iter()
                .map(|s| s.serving_distance)
                .collect();
            r.sort_by(f64::total_cmp);
            let n = r.len() as f64;
            let ks = r
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let f = nearest_distance_cdf(lambda_c, x);
                    (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
                })
                .fold(0.0, f64::max);
            assert!(ks < 0.015, "{geometry:?}: KS = {ks}");
        }
    }

    #[test]
    fn full_geometry_agrees_with_direct() {
        let p = base(10.0).noiseless().with_alpha(6.0);
        let direct = estimate_outage(&SimConfig::new(p, 20_000, 1), 1.0).unwrap();
        let full = estimate_outage(
            &SimConfig {
                geometry: Geometry::Full,
                ..SimConfig::new(p, 20_000, 2)
            },
            1.0,
        )
        .unwrap();
        let tol = direct.ci_halfwidth_95 + full.ci_halfwidth_95 + 0.005;
        assert!((direct.outage - full.outage).abs() < tol);
    }

    #[test]
    fn closed_form_agreement_alpha6() {
        let p = base(5.0).noiseless().with_alpha(6.0);
        let est = estimate_outage(&SimConfig::new(p, 50_000, 21), 1.0).unwrap();
        let exact = 1.0 - sir_ccdf_rayleigh(&p, 1.0).unwrap();
        assert!(
            (est.outage - exact).abs() < est.ci_halfwidth_95 + 0.005,
            "{est:?} vs {exact}"
        );
    }

    #[test]
    fn antithetic_pairs_mirror() {
        let p = base(10.0).noiseless().with_alpha(6.0);
        let cfg = SimConfig {
            antithetic: true,
            ..SimConfig::new(p, 20_000, 4)
        };
        let a = sample_trial_detail(&cfg, 0).unwrap();
        let b = sample_trial_detail(&cfg, 1).unwrap();
        assert_ne!(a.serving_distance, b.serving_distance);
        let est = estimate_outage(&cfg, 1.0).unwrap();
        let exact = 1.0 - sir_ccdf_rayleigh(&p, 1.0).unwrap();
        assert!((est.outage - exact).abs() < est.ci_halfwidth_95 + 0.005);
    }

    #[test]
    fn ccdf_single_trial_is_a_step() {
        let cfg = SimConfig::new(base(10.0).with_alpha(6.0), 1, 9);
        let s = sample_trial(&cfg, 0).unwrap();
        let curve = empirical_ccdf(&cfg, &[s * 0.5, s * 0.999, s * 1.001, s * 2.0]).unwrap();
        assert_eq!(curve.ccdf, vec![1.0, 1.0, 0.0, 0.0]);
        assert_eq!(curve.provenance, Provenance::MonteCarlo);
    }

    #[test]
    fn outages_match_ccdf_complement() {
        let cfg = SimConfig::new(base(10.0).with_alpha(5.0), 3000, 12);
        let grid = [0.1, 0.5, 1.0, 3.0];
        let curve = empirical_ccdf(&cfg, &grid).unwrap();
        let est = estimate_outages(&cfg, &grid).unwrap();
        for (c, e) in curve.ccdf.iter().zip(&est) {
            assert!((c + e.outage - 1.0).abs() < 1e-12);
            assert_eq!(*e, estimate_outage(&cfg, e.threshold_beta).unwrap());
        }
    }

    #[test]
    fn ci_formula() {
        let e = OutageEstimate::from_count(1.0, 250, 1000, 0);
        assert!((e.ci_halfwidth_95 - 1.96 * (0.25f64 * 0.75 / 1000.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn config_validation() {
        let p = base(10.0);
        assert!(SimConfig::new(p, 0, 1).validate().is_err());
        assert!(SimConfig::new(p, 1, 1)
            .with_window(WindowRadius::Fixed(-1.0))
            .validate()
            .is_err());
        assert!(sample_trial(&SimConfig::new(p.with_alpha(2.0), 1, 1), 0).is_err());
    }

    #[test]
    fn snapshot_assigns_nearest() {
        let p = SystemParams {
            lambda_c: 5e-3,
            rho: 0.01,
            ..SystemParams::baseline()
        }
        .with_channel(ChannelModel::RAYLEIGH);
        let d = deployment_snapshot(&p, 60.0, 2).unwrap();
        assert!(!d.collectors.is_empty() && !d.sensors.is_empty());
        for (s, &k) in d.sensors.iter().zip(&d.serving) {
            let dist = |c: &[f64; 2]| (c[0] - s[0]).hypot(c[1] - s[1]);
            let best = d.collectors.iter().map(dist).fold(f64::INFINITY, f64::min);
            assert_eq!(dist(&d.collectors[k]), best);
        }
    }
}
