use std::io::Write;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::Value;

use netplan_core::analytic::{ccdf_curve, closed_form_for, CcdfMethod};
use netplan_core::design::{
    compare_channels, design_tx_power, noise_merit, plan_deployment, required_lambda_c_sinr,
    required_lambda_c_sir,
};
use netplan_core::montecarlo::{outages_from_samples, sample_sinr};
use netplan_core::units::{linear_to_db, watts_to_dbm};
use netplan_core::{ChannelModel, DeploymentRequirement, DesignTarget, SystemParams};

use crate::config::{ConfigArgs, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{open_output, Format, RunManifest, Table};

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output format; CSV for curves, JSON for single results by default.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

impl OutputArgs {
    pub fn emit(&self, table: &Table, manifest: &RunManifest, default: Format) -> CliResult<()> {
        let out = open_output(self.output.as_deref())?;
        table.write(manifest, self.format.unwrap_or(default), out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Auto,
    ClosedForm,
    GeneralIntegral,
}

impl From<MethodArg> for CcdfMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Auto => CcdfMethod::Auto,
            MethodArg::ClosedForm => CcdfMethod::ClosedForm,
            MethodArg::GeneralIntegral => CcdfMethod::GeneralIntegral,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CcdfArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Formula selection.
    #[arg(long, value_enum, default_value = "auto")]
    pub method: MethodArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Also write every trial's SINR in dB, one per line, to this file.
    #[arg(long, value_name = "PATH")]
    pub dump_samples: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DesignArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Also choose the transmit power (alpha = 4 only).
    #[arg(long)]
    pub with_power: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Resolves the configuration, or prints it and returns `None` under
/// `--dump-config`.
fn resolve(args: &ConfigArgs) -> CliResult<Option<RunConfig>> {
    let cfg = RunConfig::resolve(args)?;
    if args.dump_config {
        let mut out = std::io::stdout().lock();
        serde_json::to_writer_pretty(&mut out, &cfg.to_file())?;
        writeln!(out)?;
        return Ok(None);
    }
    Ok(Some(cfg))
}

fn kind_label(req: &DeploymentRequirement) -> CliResult<String> {
    match serde_json::to_value(req.kind)? {
        Value::String(s) => Ok(s),
        other => Ok(other.to_string()),
    }
}

fn scenario_note(cfg: &RunConfig) -> String {
    let p = &cfg.params;
    let snr = cfg.p_over_sigma2_db().map_or_else(
        || "noiseless".to_string(),
        |db| format!("p_over_sigma2_db: {db}"),
    );
    format!(
        "lambda_s: {:e}; lc_over_ls: {}; alpha: {}; m_s: {}; m_i: {}; {snr}",
        p.lambda_s(),
        p.lambda_c / p.lambda_s(),
        p.alpha,
        p.channel.m_s,
        p.channel.m_i
    )
}

pub fn ccdf(args: &CcdfArgs) -> CliResult<()> {
    let Some(cfg) = resolve(&args.config)? else {
        return Ok(());
    };
    let grid = cfg.beta_grid()?;
    let linear: Vec<f64> = grid.iter().map(|g| g.1).collect();
    let curve = ccdf_curve(&cfg.params, &linear, args.method.into())?;
    let mut table = Table::new(&["beta_db", "ccdf", "outage", "method"]);
    table.note(scenario_note(&cfg));
    for ((db, _), value) in grid.iter().zip(&curve.ccdf) {
        table.push(vec![
            (*db).into(),
            (*value).into(),
            (1.0 - value).into(),
            curve.provenance.as_str().into(),
        ]);
    }
    let method = serde_json::to_value(CcdfMethod::from(args.method))?;
    let manifest = RunManifest::new("ccdf", &cfg.to_file(), &[("method", method)])?;
    args.output.emit(&table, &manifest, Format::Csv)
}

pub fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let Some(cfg) = resolve(&args.config)? else {
        return Ok(());
    };
    let grid = cfg.beta_grid()?;
    let linear: Vec<f64> = grid.iter().map(|g| g.1).collect();
    let sim = cfg.sim_config();
    let mut samples = sample_sinr(&sim)?;
    let manifest = RunManifest::new("simulate", &cfg.to_file(), &[])?;

    if let Some(path) = &args.dump_samples {
        let mut out = open_output(Some(path))?;
        writeln!(out, "# subcommand: simulate")?;
        writeln!(out, "# seed: {}", manifest.seed)?;
        writeln!(
            out,
            "# config: {}",
            serde_json::to_string(&manifest.config_echo)?
        )?;
        writeln!(out, "sinr_db")?;
        for s in &samples {
            writeln!(out, "{}", linear_to_db(*s))?;
        }
        out.flush()?;
    }

    let estimates = outages_from_samples(&mut samples, &linear, cfg.seed);
    let window = sim.window_info();
    let mut table = Table::new(&["beta_db", "outage", "ci_halfwidth_95", "trials"]);
    table.note(scenario_note(&cfg));
    table.note(format!(
        "window_radius_m: {}; expected_interferers: {}; tail_ratio: {:e}",
        window.radius, window.expected_interferers, window.tail_ratio
    ));
    for ((db, _), est) in grid.iter().zip(&estimates) {
        table.push(vec![
            (*db).into(),
            est.outage.into(),
            est.ci_halfwidth_95.into(),
            est.trials.into(),
        ]);
    }
    args.output.emit(&table, &manifest, Format::Csv)
}

/// Outage at `params` from whichever closed form applies.
fn predicted_outage(params: &SystemParams, beta: f64) -> CliResult<Option<f64>> {
    if closed_form_for(params).is_none() {
        return Ok(None);
    }
    let curve = ccdf_curve(params, &[beta], CcdfMethod::ClosedForm)?;
    Ok(Some(1.0 - curve.ccdf[0]))
}

pub fn design(args: &DesignArgs) -> CliResult<()> {
    let Some(cfg) = resolve(&args.config)? else {
        return Ok(());
    };
    let params = cfg.params;
    if !params.channel.is_rayleigh() {
        return Err(CliError::input(
            "density rules assume Rayleigh fading; use `compare` to relate other channels to Rayleigh",
        ));
    }
    let target = DesignTarget::new(cfg.beta_t, cfg.epsilon_t)?;
    let lambda_s = params.lambda_s();
    let alpha4 = params.alpha == 4.0;

    let (req, merit, designed) = if args.with_power {
        if !alpha4 {
            return Err(CliError::input("--with-power needs --alpha 4"));
        }
        let power = design_tx_power(lambda_s, params.noise_power, cfg.design_c)?;
        let req = plan_deployment(lambda_s, params.noise_power, &target, cfg.design_c)?;
        let designed = SystemParams {
            tx_power: power.tx_power,
            lambda_c: req.lambda_c_min,
            ..params
        };
        (req, power.noise_merit, designed)
    } else if params.is_noiseless() {
        let req = required_lambda_c_sir(lambda_s, params.alpha, &target)?;
        (
            req,
            0.0,
            SystemParams {
                lambda_c: req.lambda_c_min,
                ..params
            },
        )
    } else if alpha4 {
        let s2 = params.sigma_tilde_sq();
        let req = required_lambda_c_sinr(lambda_s, s2, &target)?;
        (
            req,
            noise_merit(lambda_s, s2),
            SystemParams {
                lambda_c: req.lambda_c_min,
                ..params
            },
        )
    } else {
        return Err(CliError::input(
            "with noise, a density rule exists only for alpha = 4; pass --noiseless or --alpha 4",
        ));
    };

    let mut table = Table::new(&[
        "lambda_c_min",
        "lc_over_ls",
        "kind",
        "tx_power_w",
        "tx_power_dbm",
        "design_c",
        "noise_merit",
        "predicted_outage",
    ]);
    table.push(vec![
        req.lambda_c_min.into(),
        (req.lambda_c_min / lambda_s).into(),
        kind_label(&req)?.into(),
        req.tx_power.into(),
        req.tx_power.map(watts_to_dbm).into(),
        req.design_c.into(),
        merit.into(),
        predicted_outage(&designed, cfg.beta_t)?.into(),
    ]);
    let manifest = RunManifest::new(
        "design",
        &cfg.to_file(),
        &[("with_power", Value::from(args.with_power))],
    )?;
    args.output.emit(&table, &manifest, Format::Json)
}

pub fn compare(args: &CompareArgs) -> CliResult<()> {
    let Some(cfg) = resolve(&args.config)? else {
        return Ok(());
    };
    let channel: ChannelModel = cfg.params.channel;
    let cmp = compare_channels(&cfg.params, channel, cfg.beta_t)?;
    let mut table = Table::new(&[
        "m_s",
        "m_i",
        "alpha",
        "lc_over_ls",
        "beta_db",
        "outage_rayleigh",
        "outage_other",
        "density_ratio",
    ]);
    table.push(vec![
        u64::from(channel.m_s).into(),
        u64::from(channel.m_i).into(),
        cfg.params.alpha.into(),
        (cfg.params.lambda_c / cfg.params.lambda_s()).into(),
        linear_to_db(cfg.beta_t).into(),
        cmp.outage_rayleigh.into(),
        cmp.outage_other.into(),
        cmp.density_ratio.into(),
    ]);
    let manifest = RunManifest::new("compare", &cfg.to_file(), &[])?;
    args.output.emit(&table, &manifest, Format::Json)
}
