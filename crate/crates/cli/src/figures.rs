//! Data behind the numerical-study figures, in one long-format table per
//! figure: `series, source, x, y, ci_halfwidth_95`.
//!
//! All figures use 10⁻² sensors/m², activity 10⁻⁴, one resource,
//! σ² = -110 dBm and a 0 dB threshold unless the figure sweeps it.

use clap::{Args, ValueEnum};
use serde_json::Value;

use netplan_core::analytic::{ccdf_curve, CcdfMethod};
use netplan_core::design::{compare_channels, design_tx_power, required_lambda_c_sinr};
use netplan_core::montecarlo::estimate_outages;
use netplan_core::units::{db_to_linear, watts_to_dbm};
use netplan_core::{ChannelModel, DesignTarget, SimConfig, SystemParams};

use crate::commands::OutputArgs;
use crate::config::{
    parse_db_range, ConfigFile, DEFAULT_BETA_DB_RANGE, DEFAULT_SEED, DEFAULT_TRIALS,
};
use crate::error::CliResult;
use crate::output::{Cell, Format, RunManifest, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureName {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
}

impl FigureName {
    fn label(self) -> &'static str {
        match self {
            Self::Fig3 => "fig3",
            Self::Fig4 => "fig4",
            Self::Fig5 => "fig5",
            Self::Fig6 => "fig6",
            Self::Fig7 => "fig7",
            Self::Fig8 => "fig8",
            Self::Fig9 => "fig9",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    /// Which figure to regenerate.
    #[arg(value_enum)]
    pub name: FigureName,
    /// Monte Carlo trials per simulated series.
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
    /// Monte Carlo seed shared by all simulated series.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Threshold grid (dB) for the CDF figures.
    #[arg(long, allow_hyphen_values = true, value_name = "LO:HI:STEP", default_value = DEFAULT_BETA_DB_RANGE)]
    pub beta_db_range: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Density ratios swept by the density figures: 25 log-spaced points on
/// [2, 50].
pub fn density_grid() -> Vec<f64> {
    let n = 25;
    let (lo, hi) = (2f64.ln(), 50f64.ln());
    (0..n)
        .map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

struct Builder {
    table: Table,
    trials: u64,
    seed: u64,
    betas: Vec<(f64, f64)>,
}

impl Builder {
    fn push(&mut self, series: &str, source: &str, x: f64, y: f64, ci: Option<f64>) {
        self.table.push(vec![
            series.into(),
            source.into(),
            x.into(),
            y.into(),
            Cell::from(ci),
        ]);
    }

    fn analytic_cdf(&mut self, series: &str, params: &SystemParams) -> CliResult<()> {
        let linear: Vec<f64> = self.betas.iter().map(|b| b.1).collect();
        let curve = ccdf_curve(params, &linear, CcdfMethod::Auto)?;
        for i in 0..linear.len() {
            self.push(
                series,
                "analytic",
                self.betas[i].0,
                1.0 - curve.ccdf[i],
                None,
            );
        }
        Ok(())
    }

    fn simulated_cdf(&mut self, series: &str, params: &SystemParams) -> CliResult<()> {
        let linear: Vec<f64> = self.betas.iter().map(|b| b.1).collect();
        let estimates =
            estimate_outages(&SimConfig::new(*params, self.trials, self.seed), &linear)?;
        for (i, e) in estimates.iter().enumerate() {
            self.push(
                series,
                "simulation",
                self.betas[i].0,
                e.outage,
                Some(e.ci_halfwidth_95),
            );
        }
        Ok(())
    }
}

fn outage(params: &SystemParams, beta: f64) -> CliResult<f64> {
    Ok(1.0 - ccdf_curve(params, &[beta], CcdfMethod::Auto)?.ccdf[0])
}

fn base() -> SystemParams {
    SystemParams::baseline()
}

fn with_lambda_s(params: SystemParams, lambda_s: f64) -> SystemParams {
    SystemParams {
        lambda_s_total: lambda_s * params.n_channels as f64 / params.rho,
        ..params
    }
}

fn fig3(b: &mut Builder) -> CliResult<()> {
    b.table
        .note("x: beta_db; y: outage (SINR CDF); alpha = 4; Rayleigh");
    for ratio in [10.0, 20.0] {
        for snr in [100.0, 120.0] {
            let p = base().with_lc_over_ls(ratio).with_snr_db(snr);
            let series = format!("lc_over_ls={ratio};p_over_sigma2_db={snr}");
            b.analytic_cdf(&series, &p)?;
            b.simulated_cdf(&series, &p)?;
        }
        let p = base().with_lc_over_ls(ratio).noiseless();
        b.analytic_cdf(&format!("lc_over_ls={ratio};noiseless"), &p)?;
    }
    Ok(())
}

fn fig4(b: &mut Builder) -> CliResult<()> {
    b.table
        .note("x: lc_over_ls; y: outage at beta = 0 dB; alpha = 4; Rayleigh");
    b.table.note(
        "source=bound: lc_over_ls from the sufficient noisy density rule for target outage y",
    );
    for snr in [Some(90.0), Some(100.0), Some(110.0), Some(120.0), None] {
        let (label, p0) = match snr {
            Some(db) => (format!("p_over_sigma2_db={db}"), base().with_snr_db(db)),
            None => ("noiseless".to_string(), base().noiseless()),
        };
        let mut exact = Vec::new();
        for ratio in density_grid() {
            let y = outage(&p0.with_lc_over_ls(ratio), 1.0)?;
            b.push(&label, "analytic", ratio, y, None);
            exact.push(y);
        }
        if snr.is_some() {
            let ls = p0.lambda_s();
            for eps in exact.into_iter().filter(|e| *e > 0.0 && *e < 1.0) {
                let target = DesignTarget::new(1.0, eps)?;
                let req = required_lambda_c_sinr(ls, p0.sigma_tilde_sq(), &target)?;
                b.push(&label, "bound", req.lambda_c_min / ls, eps, None);
            }
        }
    }
    Ok(())
}

fn fig5(b: &mut Builder) -> CliResult<()> {
    b.table
        .note("x: tx_power_dbm (noise -110 dBm); y: outage at beta = 0 dB; lc_over_ls = 10; alpha = 4; Rayleigh");
    b.table
        .note("source=design: transmit power chosen by the power rule with constant c");
    let noise = base().noise_power;
    for ls in [1e-7, 1e-6, 1e-5] {
        let p0 = with_lambda_s(base(), ls).with_lc_over_ls(10.0);
        let series = format!("lambda_s={ls:e}");
        for i in 0..=40 {
            let dbm = -40.0 + 2.0 * i as f64;
            let p = SystemParams {
                tx_power: noise * db_to_linear(dbm + 110.0),
                ..p0
            };
            b.push(&series, "analytic", dbm, outage(&p, 1.0)?, None);
        }
        for c in [0.1, 0.01] {
            let power = design_tx_power(ls, noise, c)?;
            let p = SystemParams {
                tx_power: power.tx_power,
                ..p0
            };
            b.push(
                &format!("{series};c={c}"),
                "design",
                watts_to_dbm(power.tx_power),
                outage(&p, 1.0)?,
                None,
            );
        }
    }
    Ok(())
}

fn fig6(b: &mut Builder) -> CliResult<()> {
    b.table
        .note("x: beta_db; y: outage; lc_over_ls = 10; Rayleigh");
    for alpha in [3.0, 4.0, 5.0] {
        let p = base().with_alpha(alpha).with_lc_over_ls(10.0);
        b.analytic_cdf(&format!("alpha={alpha};noiseless"), &p.noiseless())?;
        let noisy = p.with_snr_db(100.0);
        let series = format!("alpha={alpha};p_over_sigma2_db=100");
        b.analytic_cdf(&series, &noisy)?;
        b.simulated_cdf(&series, &noisy)?;
    }
    Ok(())
}

fn fig7(b: &mut Builder) -> CliResult<()> {
    b.table
        .note("x: beta_db; y: outage; lc_over_ls = 10; alpha = 4; m_s = m_i = m");
    for m in 1..=4 {
        let p = base()
            .with_lc_over_ls(10.0)
            .with_channel(ChannelModel::nakagami(m)?);
        b.analytic_cdf(&format!("m={m};noiseless"), &p.noiseless())?;
        b.simulated_cdf(
            &format!("m={m};p_over_sigma2_db=120"),
            &p.with_snr_db(120.0),
        )?;
    }
    Ok(())
}

fn fig8(b: &mut Builder) -> CliResult<()> {
    b.table
        .note("x: lc_over_ls; y: outage at beta = 0 dB; noiseless; m_s = m_i = m");
    for alpha in [3.0, 4.0, 5.0] {
        for m in 1..=4 {
            let p0 = base()
                .with_alpha(alpha)
                .noiseless()
                .with_channel(ChannelModel::nakagami(m)?);
            let series = format!("alpha={alpha};m={m}");
            for ratio in density_grid() {
                b.push(
                    &series,
                    "analytic",
                    ratio,
                    outage(&p0.with_lc_over_ls(ratio), 1.0)?,
                    None,
                );
            }
        }
    }
    Ok(())
}

fn fig9(b: &mut Builder) -> CliResult<()> {
    b.table
        .note("x: lc_over_ls; y: equivalent Rayleigh density ratio at beta = 0 dB; noiseless; m_s = m_i = m");
    for alpha in [3.0, 4.0, 5.0] {
        for m in [2, 3] {
            let p0 = base().with_alpha(alpha).noiseless();
            let series = format!("alpha={alpha};m={m}");
            for ratio in density_grid() {
                let cmp =
                    compare_channels(&p0.with_lc_over_ls(ratio), ChannelModel::nakagami(m)?, 1.0)?;
                b.push(&series, "analytic", ratio, cmp.density_ratio, None);
            }
        }
    }
    Ok(())
}

pub fn build(name: FigureName, trials: u64, seed: u64, beta_db_range: &str) -> CliResult<Table> {
    let mut b = Builder {
        table: Table::new(&["series", "source", "x", "y", "ci_halfwidth_95"]),
        trials,
        seed,
        betas: parse_db_range(beta_db_range)?,
    };
    match name {
        FigureName::Fig3 => fig3(&mut b)?,
        FigureName::Fig4 => fig4(&mut b)?,
        FigureName::Fig5 => fig5(&mut b)?,
        FigureName::Fig6 => fig6(&mut b)?,
        FigureName::Fig7 => fig7(&mut b)?,
        FigureName::Fig8 => fig8(&mut b)?,
        FigureName::Fig9 => fig9(&mut b)?,
    }
    Ok(b.table)
}

pub fn figure(args: &FigureArgs) -> CliResult<()> {
    if args.trials == 0 {
        return Err(crate::error::CliError::input("trials must be >= 1"));
    }
    let table = build(args.name, args.trials, args.seed, &args.beta_db_range)?;
    let echo = ConfigFile {
        trials: Some(args.trials),
        seed: Some(args.seed),
        beta_db_range: Some(args.beta_db_range.clone()),
        ..ConfigFile::default()
    };
    let manifest = RunManifest::new(
        "figure",
        &echo,
        &[("figure", Value::from(args.name.label()))],
    )?;
    args.output.emit(&table, &manifest, Format::Csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column(t: &Table, series: &str, source: &str) -> Vec<(f64, f64)> {
        t.rows
            .iter()
            .filter(|r| r[0] == Cell::from(series) && r[1] == Cell::from(source))
            .map(|r| match (&r[2], &r[3]) {
                (Cell::Num(x), Cell::Num(y)) => (*x, *y),
                _ => panic!("non-numeric row"),
            })
            .collect()
    }

    #[test]
    fn density_grid_spans_two_to_fifty() {
        let g = density_grid();
        assert_eq!(g.len(), 25);
        assert!((g[0] - 2.0).abs() < 1e-12 && (g[24] - 50.0).abs() < 1e-12);
    }

    #[test]
    fn fig4_noise_hurts_and_bounds_are_conservative() {
        let t = build(FigureName::Fig4, 1, 1, DEFAULT_BETA_DB_RANGE).unwrap();
        let clean = column(&t, "noiseless", "analytic");
        let loud = column(&t, "p_over_sigma2_db=90", "analytic");
        for ((_, c), (_, l)) in clean.iter().zip(&loud) {
            assert!(l >= c);
        }
        for w in clean.windows(2) {
            assert!(w[1].1 < w[0].1);
        }
        // the sufficient rule asks for at least the density that achieves y
        let exact = column(&t, "p_over_sigma2_db=100", "analytic");
        let bound = column(&t, "p_over_sigma2_db=100", "bound");
        for ((x, _), (xb, _)) in exact.iter().zip(&bound) {
            assert!(xb >= &(x * (1.0 - 1e-9)));
        }
    }

    #[test]
    fn fig8_and_fig9_trends() {
        let t8 = build(FigureName::Fig8, 1, 1, DEFAULT_BETA_DB_RANGE).unwrap();
        for alpha in [3.0, 4.0, 5.0] {
            let m1 = column(&t8, &format!("alpha={alpha};m=1"), "analytic");
            let m2 = column(&t8, &format!("alpha={alpha};m=2"), "analytic");
            for (a, b) in m1.iter().zip(&m2) {
                assert!(b.1 < a.1);
            }
        }
        let t9 = build(FigureName::Fig9, 1, 1, DEFAULT_BETA_DB_RANGE).unwrap();
        for alpha in [3.0, 4.0, 5.0] {
            let m2 = column(&t9, &format!("alpha={alpha};m=2"), "analytic");
            let m3 = column(&t9, &format!("alpha={alpha};m=3"), "analytic");
            for (a, b) in m2.iter().zip(&m3) {
                assert!(a.1 > 1.0 && b.1 > a.1);
            }
        }
    }

    #[test]
    fn fig5_outage_falls_with_power() {
        let t = build(FigureName::Fig5, 1, 1, DEFAULT_BETA_DB_RANGE).unwrap();
        for ls in ["1e-7", "1e-6", "1e-5"] {
            let curve = column(&t, &format!("lambda_s={ls}"), "analytic");
            assert_eq!(curve.len(), 41);
            for w in curve.windows(2) {
                assert!(w[1].1 <= w[0].1 + 1e-15);
            }
        }
    }
}
