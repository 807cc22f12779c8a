//! Subcommand implementations. Failures are classified so `main` can map
//! them to exit codes: usage 1, data 2, non-convergence 3.

use crate::chart::{line_chart, Series};
use crate::config::{parse_fit_spec, RunConfig};
use crate::csvio::{fmt_sig9, read_measurements, read_sweep_csv, write_sweep_csv};
use crate::pathspec::parse_path;
use humsim_core::adsorption::{bet_finite, bet_infinite, RelativePressure};
use humsim_core::calibrate::fit;
use humsim_core::sensor::{rh_sweep, temperature_sweep, Branch, SweepResult};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub enum Failure {
    Usage(String),
    Data(String),
    NotConverged(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::NotConverged(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::NotConverged(m) => m,
        }
    }
}

type CmdResult = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn data(msg: impl Into<String>) -> Failure {
    Failure::Data(msg.into())
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| data(format!("{}: {e}", path.display())))
}

fn load_config(path: &Path) -> Result<RunConfig, Failure> {
    let text = read_file(path)?;
    RunConfig::parse(&text).map_err(|e| data(format!("{}: {e}", path.display())))
}

/// (label, color, points) triple for one chart line.
type ChartSeries = (String, String, Vec<(f64, f64)>);

/// Splits sweep rows into branch series for charting.
fn branch_series(
    result: &SweepResult<f64>,
    x: impl Fn(&humsim_core::SweepRow64) -> f64,
) -> Vec<ChartSeries> {
    let mut series = Vec::new();
    for (branch, label, color) in [
        (Branch::Ascending, "ascending", "#1f77b4"),
        (Branch::Descending, "descending", "#d62728"),
    ] {
        let points: Vec<(f64, f64)> = result
            .rows
            .iter()
            .filter(|r| r.branch == branch)
            .map(|r| (x(r), r.capacitance * 1e12))
            .collect();
        if !points.is_empty() {
            series.push((label.to_string(), color.to_string(), points));
        }
    }
    series
}

fn write_chart(
    path: &Path,
    title: &str,
    x_label: &str,
    series: &[ChartSeries],
) -> Result<(), Failure> {
    let views: Vec<Series<'_>> = series
        .iter()
        .map(|(label, color, points)| Series {
            label,
            color,
            points: points.clone(),
        })
        .collect();
    write_file(path, &line_chart(title, x_label, "capacitance [pF]", &views))
}

pub fn cmd_isotherm(c: f64, layers: f64, points: usize) -> CmdResult {
    if c <= 0.0 || !c.is_finite() {
        return Err(usage(format!("--c must be positive, got {c}")));
    }
    if layers < 1.0 || !layers.is_finite() {
        return Err(usage(format!("--layers must be at least 1, got {layers}")));
    }
    if points < 2 {
        return Err(usage(format!("--points must be at least 2, got {points}")));
    }
    let mut out = String::from("x,coverage_finite,coverage_infinite\n");
    for i in 0..points {
        let raw = i as f64 / (points - 1) as f64;
        let x = RelativePressure::clamped(raw).map_err(|e| data(e.to_string()))?;
        let finite = bet_finite(x, c, layers).map_err(|e| data(e.to_string()))?;
        let infinite = bet_infinite(x, c).map_err(|e| data(e.to_string()))?;
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_sig9(x.value()),
            fmt_sig9(finite),
            fmt_sig9(infinite)
        );
    }
    print!("{out}");
    Ok(())
}

fn checked_rh_path(spec: &str) -> Result<Vec<f64>, Failure> {
    let path = parse_path(spec).map_err(usage)?;
    for &v in &path {
        if !(0.0..=100.0).contains(&v) {
            return Err(usage(format!("RH path value {v} outside [0, 100]")));
        }
    }
    Ok(path)
}

/// Hysteresis-ordering and loop-closure checks surfaced behind --verify.
fn verify_sweep(result: &SweepResult<f64>) -> Result<(), Failure> {
    let mut ascending: Vec<(f64, f64)> = Vec::new();
    for row in &result.rows {
        match row.branch {
            Branch::Ascending => ascending.push((row.rh_percent, row.capacitance)),
            Branch::Descending => {
                if let Some(&(_, c_asc)) = ascending
                    .iter()
                    .find(|(rh, _)| *rh == row.rh_percent)
                {
                    if row.capacitance < c_asc - 1e-21 {
                        return Err(data(format!(
                            "verify: descending capacitance below ascending at RH {}%",
                            row.rh_percent
                        )));
                    }
                }
            }
        }
    }
    let first = result.rows.first();
    let last = result.rows.last();
    if let (Some(f), Some(l)) = (first, last) {
        if f.rh_percent == l.rh_percent && ((f.capacitance - l.capacitance) * 1e12).abs() > 1e-3 {
            return Err(data(format!(
                "verify: loop fails to close at RH {}% ({} pF gap)",
                f.rh_percent,
                (f.capacitance - l.capacitance).abs() * 1e12
            )));
        }
    }
    Ok(())
}

pub struct SweepArgs {
    pub config: PathBuf,
    pub path: Option<String>,
    pub temperature_c: Option<f64>,
    pub out: PathBuf,
    pub chart: Option<PathBuf>,
    pub verify: bool,
}

pub fn cmd_sweep(args: SweepArgs) -> CmdResult {
    let run = load_config(&args.config)?;
    let cfg = run.to_sensor_config().map_err(data)?;
    let spec = args.path.as_deref().unwrap_or(&run.sweep.path);
    let path = checked_rh_path(spec)?;
    let temp_c = args.temperature_c.unwrap_or(run.sweep.temperature_c);
    let result = rh_sweep(&cfg, &path, temp_c + 273.15).map_err(|e| data(e.to_string()))?;

    write_file(&args.out, &write_sweep_csv(&result, &[]))?;
    if let Some(chart_path) = &args.chart {
        let series = branch_series(&result, |r| r.rh_percent);
        write_chart(
            chart_path,
            "RH-capacitance characteristic",
            "relative humidity [%]",
            &series,
        )?;
    }
    if args.verify {
        verify_sweep(&result)?;
        println!("verify: ok ({} rows)", result.rows.len());
    } else {
        println!("wrote {} rows", result.rows.len());
    }
    Ok(())
}

/// Shoelace area of the closed (T, C) polygon traced by the sweep, in pF·°C.
fn loop_area_pf(result: &SweepResult<f64>, x: impl Fn(&humsim_core::SweepRow64) -> f64) -> f64 {
    let rows = &result.rows;
    let n = rows.len();
    if n < 3 {
        return 0.0;
    }
    let mut twice_area = 0.0;
    for i in 0..n {
        let j = (i + 1) % n;
        let (x0, y0) = (x(&rows[i]), rows[i].capacitance * 1e12);
        let (x1, y1) = (x(&rows[j]), rows[j].capacitance * 1e12);
        twice_area += x0 * y1 - x1 * y0;
    }
    (twice_area / 2.0).abs()
}

pub struct TempSweepArgs {
    pub config: PathBuf,
    pub rh: Option<f64>,
    pub t_path: Option<String>,
    pub dt: Option<f64>,
    pub out: PathBuf,
    pub chart: Option<PathBuf>,
}

pub fn cmd_temp_sweep(args: TempSweepArgs) -> CmdResult {
    let run = load_config(&args.config)?;
    let cfg = run.to_sensor_config().map_err(data)?;
    let rh = args.rh.unwrap_or(run.temp_sweep.rh_percent);
    if !(0.0..=100.0).contains(&rh) {
        return Err(usage(format!("--rh {rh} outside [0, 100]")));
    }
    let spec = args.t_path.as_deref().unwrap_or(&run.temp_sweep.t_path_c);
    let path_c = parse_path(spec).map_err(usage)?;
    if let Some(&t) = path_c.iter().find(|&&t| t <= -273.15) {
        return Err(usage(format!("temperature {t} C is at or below absolute zero")));
    }
    let dt = args.dt.unwrap_or(run.temp_sweep.dt);
    if dt <= 0.0 || !dt.is_finite() {
        return Err(usage(format!("--dt must be positive, got {dt}")));
    }
    let path_k: Vec<f64> = path_c.iter().map(|t| t + 273.15).collect();
    let result = temperature_sweep(&cfg, rh, &path_k, dt).map_err(|e| data(e.to_string()))?;

    let area = loop_area_pf(&result, |r| r.temp_c);
    let footer = format!("loop_area_pf_c = {}", fmt_sig9(area));
    write_file(&args.out, &write_sweep_csv(&result, &[footer]))?;
    if let Some(chart_path) = &args.chart {
        let series = branch_series(&result, |r| r.temp_c);
        write_chart(
            chart_path,
            "temperature-capacitance characteristic",
            "temperature [C]",
            &series,
        )?;
    }
    println!(
        "wrote {} rows, loop area {} pF*C",
        result.rows.len(),
        fmt_sig9(area)
    );
    Ok(())
}

pub struct FitArgs {
    pub config: PathBuf,
    pub data: PathBuf,
    pub spec: Option<PathBuf>,
    pub out: PathBuf,
}

pub fn cmd_fit(args: FitArgs) -> CmdResult {
    let run = load_config(&args.config)?;
    let cfg = run.to_sensor_config().map_err(data)?;
    let text = read_file(&args.data)?;
    let measurements = read_measurements(&args.data, &text).map_err(data)?;
    let section = match &args.spec {
        Some(path) => parse_fit_spec(&read_file(path)?)
            .map_err(|e| data(format!("{}: {e}", path.display())))?,
        None => run.fit.clone(),
    };
    let spec = section.to_spec();

    let result = fit(&measurements, &spec, &cfg).map_err(|e| data(e.to_string()))?;

    let fitted = run.with_sensor_config(&result.config);
    write_file(&args.out, &fitted.to_toml())?;

    let mut report = String::new();
    let _ = writeln!(report, "fit: converged = {}", result.converged);
    let _ = writeln!(report, "iterations: {}", result.iterations);
    let _ = writeln!(report, "objective evaluations: {}", result.evaluations);
    let _ = writeln!(report, "rms residual [pF]: {}", fmt_sig9(result.rms_residual_pf));
    if !result.names.is_empty() {
        let _ = writeln!(
            report,
            "{:<28} {:>16} {:>16}",
            "parameter", "initial", "fitted"
        );
        for (i, name) in result.names.iter().enumerate() {
            let _ = writeln!(
                report,
                "{:<28} {:>16} {:>16}",
                name,
                fmt_sig9(result.initial_values[i]),
                fmt_sig9(result.values[i])
            );
        }
    }
    print!("{report}");

    if result.converged {
        Ok(())
    } else {
        Err(Failure::NotConverged(format!(
            "fit did not converge after {} iterations (rms {} pF)",
            result.iterations,
            fmt_sig9(result.rms_residual_pf)
        )))
    }
}

/// Re-checks an already-written sweep CSV (exposed for tests).
pub fn verify_csv_file(path: &Path) -> CmdResult {
    let text = read_file(path)?;
    let result = read_sweep_csv(path, &text).map_err(data)?;
    verify_sweep(&result)
}
