//! `netplan`: outage curves, simulation, dimensioning and figure data for
//! sensors served by the nearest of randomly deployed collectors.

mod commands;
mod config;
mod error;
mod figures;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{CcdfArgs, CompareArgs, DesignArgs, SimulateArgs};
use crate::error::{CliError, CliResult};
use crate::figures::FigureArgs;

const CCDF_COLUMNS: &str = "CSV columns:
  beta_db   threshold (dB)
  ccdf      P(SINR > beta)
  outage    1 - ccdf
  method    formula used: sir_rayleigh, sir_nakagami, sinr_rayleigh_alpha4 or general_integral";

const SIMULATE_COLUMNS: &str = "CSV columns:
  beta_db          threshold (dB)
  outage           fraction of trials with SINR < beta
  ci_halfwidth_95  normal-approximation 95% half-width
  trials           number of trials

--dump-samples writes one SINR value (dB) per trial, in trial order.";

const DESIGN_COLUMNS: &str = "Fields:
  lambda_c_min      minimum collector intensity (m^-2)
  lc_over_ls        lambda_c_min over the effective interferer intensity
  kind              necessary_and_sufficient | sufficient | approximate
  tx_power_w        designed transmit power (W), with --with-power
  tx_power_dbm      the same in dBm
  design_c          power-design constant, with --with-power
  noise_merit       8 (sigma^2/P) / (pi^2 lambda_s)^2; noise is negligible when << 1
  predicted_outage  outage at the designed point from the matching closed form";

const COMPARE_COLUMNS: &str = "Fields:
  m_s, m_i, alpha, lc_over_ls, beta_db  the evaluated point
  outage_rayleigh   interference-limited outage under Rayleigh fading
  outage_other      the same under the configured Nakagami channel
  density_ratio     (1/outage_other - 1) / (1/outage_rayleigh - 1)";

const FIGURE_COLUMNS: &str = "CSV columns:
  series           curve label, key=value pairs separated by ';'
  source           analytic | simulation | bound | design
  x, y             axis values; the '#' lines name the axes
  ci_halfwidth_95  95% half-width for simulated points, empty otherwise

Density sweeps use 25 log-spaced lambda_c/lambda_s values on [2, 50];
the power sweep uses -40..40 dBm in 2 dB steps.";

#[derive(Debug, Parser)]
#[command(name = "netplan", version, about, long_about = None)]
#[command(
    after_help = "Exit codes: 0 success, 2 invalid input, 3 numerical failure.\n\
Environment: NETPLAN_THREADS caps worker threads (0 or unset = all cores)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Analytic SINR CCDF over a threshold grid.
    #[command(after_help = CCDF_COLUMNS)]
    Ccdf(CcdfArgs),
    /// Monte Carlo outage estimates over a threshold grid.
    #[command(after_help = SIMULATE_COLUMNS)]
    Simulate(SimulateArgs),
    /// Minimum collector intensity (and optionally transmit power) for a target.
    #[command(after_help = DESIGN_COLUMNS)]
    Design(DesignArgs),
    /// Relate a Nakagami channel to Rayleigh in equivalent collector density.
    #[command(after_help = COMPARE_COLUMNS)]
    Compare(CompareArgs),
    /// Data behind one of the numerical-study figures.
    #[command(after_help = FIGURE_COLUMNS)]
    Figure(FigureArgs),
}

fn init_threads() -> CliResult<()> {
    let threads = match std::env::var("NETPLAN_THREADS") {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            CliError::input(format!(
                "NETPLAN_THREADS must be a non-negative integer, got {v:?}"
            ))
        })?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::input(format!("cannot start worker threads: {e}")))
}

fn run(cli: Cli) -> CliResult<()> {
    init_threads()?;
    match &cli.command {
        Command::Ccdf(a) => commands::ccdf(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Design(a) => commands::design(a),
        Command::Compare(a) => commands::compare(a),
        Command::Figure(a) => figures::figure(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("netplan: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
