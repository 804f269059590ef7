//! Run configuration: built-in defaults, then an optional flat JSON file,
//! then command-line flags.

use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use netplan_core::design::DEFAULT_DESIGN_C;
use netplan_core::units::{db_to_linear, dbm_to_watts, linear_to_db};
use netplan_core::{ChannelModel, Geometry, SimConfig, SystemParams, WindowRadius};

use crate::error::{CliError, CliResult};

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_BETA_DB_RANGE: &str = "-10:20:1";

/// Contents of a `--config` file. Every key is optional; keys mirror the
/// parameter names used by the library.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub lambda_s_total: Option<f64>,
    pub rho: Option<f64>,
    pub n_channels: Option<u32>,
    pub lambda_c: Option<f64>,
    pub alpha: Option<f64>,
    pub tx_power: Option<f64>,
    pub noise_power: Option<f64>,
    pub m_s: Option<u32>,
    pub m_i: Option<u32>,
    pub beta_t: Option<f64>,
    pub epsilon_t: Option<f64>,
    pub design_c: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub window_radius: Option<f64>,
    pub antithetic: Option<bool>,
    pub no_fading: Option<bool>,
    pub geometry: Option<Geometry>,
    pub beta_db_range: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeometryArg {
    Direct,
    Full,
}

impl From<GeometryArg> for Geometry {
    fn from(g: GeometryArg) -> Self {
        match g {
            GeometryArg::Direct => Geometry::Direct,
            GeometryArg::Full => Geometry::Full,
        }
    }
}

/// Parameter flags shared by every subcommand. Flags win over the file.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// Flat JSON file with any of the keys printed by --dump-config.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Print the fully resolved configuration as JSON and exit.
    #[arg(long)]
    pub dump_config: bool,

    /// Total sensor intensity (m^-2).
    #[arg(long)]
    pub lambda_s_total: Option<f64>,
    /// Per-slot transmit probability of a sensor.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Number of random-access resources.
    #[arg(long)]
    pub n_channels: Option<u32>,
    /// Collector intensity (m^-2).
    #[arg(long, conflicts_with = "lc_over_ls")]
    pub lambda_c: Option<f64>,
    /// Collector intensity as a multiple of the effective interferer intensity.
    #[arg(long)]
    pub lc_over_ls: Option<f64>,
    /// Path-loss exponent (> 2).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Nakagami shape for both the desired and interfering links.
    #[arg(long, conflicts_with_all = ["m_s", "m_i"])]
    pub m: Option<u32>,
    /// Nakagami shape of the desired link.
    #[arg(long)]
    pub m_s: Option<u32>,
    /// Nakagami shape of the interfering links.
    #[arg(long)]
    pub m_i: Option<u32>,
    /// Transmit power (dBm).
    #[arg(long, conflicts_with = "p_over_sigma2_db")]
    pub tx_power_dbm: Option<f64>,
    /// Noise power (dBm).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "noiseless")]
    pub noise_dbm: Option<f64>,
    /// Transmit-power-to-noise ratio P/sigma^2 (dB); sets the transmit power.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "noiseless")]
    pub p_over_sigma2_db: Option<f64>,
    /// Interference-limited operation (zero noise power).
    #[arg(long)]
    pub noiseless: bool,

    /// Target SINR threshold (dB).
    #[arg(long, allow_hyphen_values = true)]
    pub beta_db: Option<f64>,
    /// Target outage probability, in (0, 1).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Transmit-power design constant, in (0, 1).
    #[arg(long)]
    pub c: Option<f64>,

    /// Threshold grid in dB as lo:hi:step.
    #[arg(long, allow_hyphen_values = true, value_name = "LO:HI:STEP")]
    pub beta_db_range: Option<String>,
    /// Monte Carlo trials.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Monte Carlo seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Interferer window radius (m); automatic when omitted.
    #[arg(long)]
    pub window_radius: Option<f64>,
    /// Pair trials with mirrored uniforms.
    #[arg(long)]
    pub antithetic: bool,
    /// Replace every fading gain by 1.
    #[arg(long)]
    pub no_fading: bool,
    /// How the typical link is sampled.
    #[arg(long, value_enum)]
    pub geometry: Option<GeometryArg>,
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub beta_t: f64,
    pub epsilon_t: f64,
    pub design_c: f64,
    pub trials: u64,
    pub seed: u64,
    pub window_radius: Option<f64>,
    pub antithetic: bool,
    pub no_fading: bool,
    pub geometry: Geometry,
    pub beta_db_range: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: SystemParams::baseline(),
            beta_t: 1.0,
            epsilon_t: 0.1,
            design_c: DEFAULT_DESIGN_C,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            window_radius: None,
            antithetic: false,
            no_fading: false,
            geometry: Geometry::Direct,
            beta_db_range: DEFAULT_BETA_DB_RANGE.to_string(),
        }
    }
}

impl RunConfig {
    pub fn resolve(args: &ConfigArgs) -> CliResult<Self> {
        let file = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str(&text).map_err(|e| {
                    CliError::input(format!("bad config file {}: {e}", path.display()))
                })?
            }
            None => ConfigFile::default(),
        };
        let mut cfg = Self::default();
        cfg.apply_file(&file);
        cfg.apply_flags(args);
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply_file(&mut self, f: &ConfigFile) {
        let p = &mut self.params;
        set(&mut p.lambda_s_total, f.lambda_s_total);
        set(&mut p.rho, f.rho);
        set(&mut p.n_channels, f.n_channels);
        set(&mut p.lambda_c, f.lambda_c);
        set(&mut p.alpha, f.alpha);
        set(&mut p.tx_power, f.tx_power);
        set(&mut p.noise_power, f.noise_power);
        set(&mut p.channel.m_s, f.m_s);
        set(&mut p.channel.m_i, f.m_i);
        set(&mut self.beta_t, f.beta_t);
        set(&mut self.epsilon_t, f.epsilon_t);
        set(&mut self.design_c, f.design_c);
        set(&mut self.trials, f.trials);
        set(&mut self.seed, f.seed);
        if f.window_radius.is_some() {
            self.window_radius = f.window_radius;
        }
        set(&mut self.antithetic, f.antithetic);
        set(&mut self.no_fading, f.no_fading);
        set(&mut self.geometry, f.geometry);
        set(&mut self.beta_db_range, f.beta_db_range.clone());
    }

    fn apply_flags(&mut self, a: &ConfigArgs) {
        let p = &mut self.params;
        set(&mut p.lambda_s_total, a.lambda_s_total);
        set(&mut p.rho, a.rho);
        set(&mut p.n_channels, a.n_channels);
        set(&mut p.alpha, a.alpha);
        if let Some(m) = a.m {
            p.channel = ChannelModel { m_s: m, m_i: m };
        }
        set(&mut p.channel.m_s, a.m_s);
        set(&mut p.channel.m_i, a.m_i);
        set(&mut p.lambda_c, a.lambda_c);
        // ratios are applied after the quantities they refer to
        if let Some(ratio) = a.lc_over_ls {
            p.lambda_c = ratio * p.lambda_s();
        }
        if let Some(dbm) = a.noise_dbm {
            p.noise_power = dbm_to_watts(dbm);
        }
        if let Some(dbm) = a.tx_power_dbm {
            p.tx_power = dbm_to_watts(dbm);
        }
        if let Some(db) = a.p_over_sigma2_db {
            p.tx_power = p.noise_power * db_to_linear(db);
        }
        if a.noiseless {
            p.noise_power = 0.0;
        }
        if let Some(db) = a.beta_db {
            self.beta_t = db_to_linear(db);
        }
        set(&mut self.epsilon_t, a.epsilon);
        set(&mut self.design_c, a.c);
        set(&mut self.trials, a.trials);
        set(&mut self.seed, a.seed);
        if a.window_radius.is_some() {
            self.window_radius = a.window_radius;
        }
        self.antithetic |= a.antithetic;
        self.no_fading |= a.no_fading;
        set(&mut self.geometry, a.geometry.map(Geometry::from));
        set(&mut self.beta_db_range, a.beta_db_range.clone());
    }

    fn validate(&self) -> CliResult<()> {
        self.params.validate()?;
        if self.params.tx_power == 0.0 && self.params.noise_power > 0.0 {
            return Err(CliError::input(
                "transmit power must be > 0 when noise is present",
            ));
        }
        self.sim_config().validate()?;
        parse_db_range(&self.beta_db_range)?;
        Ok(())
    }

    pub fn sim_config(&self) -> SimConfig {
        let mut sim = SimConfig::new(self.params, self.trials, self.seed);
        if let Some(r) = self.window_radius {
            sim = sim.with_window(WindowRadius::Fixed(r));
        }
        sim.antithetic = self.antithetic;
        sim.no_fading = self.no_fading;
        sim.geometry = self.geometry;
        sim
    }

    /// The configuration as a config file; re-reading it resolves to `self`.
    pub fn to_file(&self) -> ConfigFile {
        let p = &self.params;
        ConfigFile {
            lambda_s_total: Some(p.lambda_s_total),
            rho: Some(p.rho),
            n_channels: Some(p.n_channels),
            lambda_c: Some(p.lambda_c),
            alpha: Some(p.alpha),
            tx_power: Some(p.tx_power),
            noise_power: Some(p.noise_power),
            m_s: Some(p.channel.m_s),
            m_i: Some(p.channel.m_i),
            beta_t: Some(self.beta_t),
            epsilon_t: Some(self.epsilon_t),
            design_c: Some(self.design_c),
            trials: Some(self.trials),
            seed: Some(self.seed),
            window_radius: self.window_radius,
            antithetic: Some(self.antithetic),
            no_fading: Some(self.no_fading),
            geometry: Some(self.geometry),
            beta_db_range: Some(self.beta_db_range.clone()),
        }
    }

    /// Threshold grid as `(dB, linear)` pairs.
    pub fn beta_grid(&self) -> CliResult<Vec<(f64, f64)>> {
        parse_db_range(&self.beta_db_range)
    }

    pub fn p_over_sigma2_db(&self) -> Option<f64> {
        let p = &self.params;
        (p.noise_power > 0.0).then(|| linear_to_db(p.tx_power / p.noise_power))
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

/// Parses `lo:hi:step` (dB) into ascending `(dB, linear)` pairs.
pub fn parse_db_range(spec: &str) -> CliResult<Vec<(f64, f64)>> {
    let bad = || {
        CliError::input(format!(
            "threshold range must look like lo:hi:step, got {spec:?}"
        ))
    };
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [lo, hi, step] = parts[..] else {
        return Err(bad());
    };
    if !(lo.is_finite() && hi.is_finite() && step > 0.0 && hi >= lo) {
        return Err(bad());
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    if n > 1_000_000 {
        return Err(CliError::input(format!(
            "threshold range {spec:?} has too many points"
        )));
    }
    Ok((0..=n)
        .map(|i| {
            let db = lo + i as f64 * step;
            (db, db_to_linear(db))
        })
        .collect())
}
