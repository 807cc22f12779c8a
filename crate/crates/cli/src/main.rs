//! humsim: isotherms, RH sweeps, temperature sweeps and parameter fits for
//! the porous-alumina capacitive humidity sensor model.
//!
//! Exit codes: 0 ok, 1 usage error, 2 data error, 3 fit non-convergence.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use humsim_cli::commands::{
    cmd_fit, cmd_isotherm, cmd_sweep, cmd_temp_sweep, FitArgs, SweepArgs, TempSweepArgs,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "humsim",
    version,
    about = "Capacitive porous-alumina relative-humidity sensor simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print BET isotherm samples (finite and infinite layers) as CSV on stdout
    Isotherm {
        /// BET energy constant c
        #[arg(long)]
        c: f64,
        /// Layer cap n (real-valued, >= 1)
        #[arg(long)]
        layers: f64,
        /// Grid points over [0, 1] (saturation endpoint clamped)
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Run an RH sweep with hysteresis and write CSV (and optionally an SVG chart)
    Sweep {
        /// Run configuration (TOML)
        #[arg(long, env = "HUMSIM_CONFIG")]
        config: PathBuf,
        /// RH path "start:end:step,..." in percent; defaults to [sweep].path
        #[arg(long)]
        path: Option<String>,
        /// Sweep temperature in Celsius; defaults to [sweep].temperature_c
        #[arg(long)]
        temperature_c: Option<f64>,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
        /// Optional SVG chart path
        #[arg(long)]
        chart: Option<PathBuf>,
        /// Check hysteresis ordering and loop closure; nonzero exit on violation
        #[arg(long)]
        verify: bool,
    },
    /// Run a quasi-static temperature sweep at constant RH
    TempSweep {
        /// Run configuration (TOML)
        #[arg(long, env = "HUMSIM_CONFIG")]
        config: PathBuf,
        /// Constant relative humidity in percent; defaults to [temp_sweep].rh_percent
        #[arg(long)]
        rh: Option<f64>,
        /// Temperature path "start:end:step,..." in Celsius; defaults to [temp_sweep].t_path_c
        #[arg(long = "t-path")]
        t_path: Option<String>,
        /// Seconds per path step; defaults to [temp_sweep].dt
        #[arg(long)]
        dt: Option<f64>,
        /// Output CSV path
        #[arg(long)]
        out: PathBuf,
        /// Optional SVG chart path
        #[arg(long)]
        chart: Option<PathBuf>,
    },
    /// Fit configuration parameters to measured data and write the fitted config
    Fit {
        /// Base run configuration (TOML)
        #[arg(long, env = "HUMSIM_CONFIG")]
        config: PathBuf,
        /// Measurement CSV (columns rh_percent, capacitance_pf[, temp_c, branch])
        #[arg(long)]
        data: PathBuf,
        /// Fit spec (TOML); defaults to the [fit] section of the config
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Output path for the fitted configuration
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let outcome = match cli.command {
        Command::Isotherm { c, layers, points } => cmd_isotherm(c, layers, points),
        Command::Sweep {
            config,
            path,
            temperature_c,
            out,
            chart,
            verify,
        } => cmd_sweep(SweepArgs {
            config,
            path,
            temperature_c,
            out,
            chart,
            verify,
        }),
        Command::TempSweep {
            config,
            rh,
            t_path,
            dt,
            out,
            chart,
        } => cmd_temp_sweep(TempSweepArgs {
            config,
            rh,
            t_path,
            dt,
            out,
            chart,
        }),
        Command::Fit {
            config,
            data,
            spec,
            out,
        } => cmd_fit(FitArgs {
            config,
            data,
            spec,
            out,
        }),
    };

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("humsim: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}
