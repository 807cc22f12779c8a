//! CSV interchange: comma-separated, `.` decimal point, one header row,
//! `#`-prefixed comment/footer lines, 9-significant-digit lowercase-e
//! scientific notation throughout.

use humsim_core::calibrate::{Measurement, MeasurementSet};
use humsim_core::sensor::{Branch, SweepResult, SweepRow};
use std::path::Path;

/// Canonical number format: 9 significant digits, lowercase `e` exponent.
pub fn fmt_sig9(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v }; // normalize -0.0
    format!("{v:.8e}")
}

pub const SWEEP_HEADER: &str = "rh_percent,temp_c,branch,water_fill,eps_eff,capacitance_pf";

/// Serializes a sweep with optional `#` footer comment lines.
pub fn write_sweep_csv(result: &SweepResult<f64>, footers: &[String]) -> String {
    let mut out = String::with_capacity(64 * (result.rows.len() + 2));
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for row in &result.rows {
        out.push_str(&fmt_sig9(row.rh_percent));
        out.push(',');
        out.push_str(&fmt_sig9(row.temp_c));
        out.push(',');
        out.push_str(row.branch.as_str());
        out.push(',');
        out.push_str(&fmt_sig9(row.water_fill));
        out.push(',');
        out.push_str(&fmt_sig9(row.eps_eff));
        out.push(',');
        out.push_str(&fmt_sig9(row.capacitance * 1e12));
        out.push('\n');
    }
    for footer in footers {
        out.push_str("# ");
        out.push_str(footer);
        out.push('\n');
    }
    out
}

fn data_err(path: &Path, line: u64, message: impl std::fmt::Display) -> String {
    format!("{} line {line}: {message}", path.display())
}

/// Reads a sweep CSV back into rows (used by --verify and the tests).
pub fn read_sweep_csv(path: &Path, text: &str) -> Result<SweepResult<f64>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| format!("{}: {e}", path.display()))?
        .clone();
    let expect: Vec<&str> = SWEEP_HEADER.split(',').collect();
    let got: Vec<&str> = headers.iter().collect();
    if got != expect {
        return Err(format!(
            "{}: unexpected header {:?} (expected {SWEEP_HEADER:?})",
            path.display(),
            got.join(",")
        ));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| format!("{}: {e}", path.display()))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<f64, String> {
            let raw = record
                .get(i)
                .ok_or_else(|| data_err(path, line, format!("missing column {}", expect[i])))?;
            raw.trim()
                .parse::<f64>()
                .map_err(|_| data_err(path, line, format!("invalid number {raw:?}")))
        };
        let branch: Branch = record
            .get(2)
            .ok_or_else(|| data_err(path, line, "missing branch"))?
            .trim()
            .parse()
            .map_err(|e| data_err(path, line, e))?;
        rows.push(SweepRow {
            rh_percent: field(0)?,
            temp_c: field(1)?,
            branch,
            water_fill: field(3)?,
            eps_eff: field(4)?,
            capacitance: field(5)? * 1e-12,
        });
    }
    Ok(SweepResult { rows })
}

/// Reads measurement data. Required columns: `rh_percent` and
/// `capacitance_pf`; optional: `temp_c` (default 25) and `branch`. Extra
/// columns are ignored, so sweep output feeds straight back in.
pub fn read_measurements(path: &Path, text: &str) -> Result<MeasurementSet<f64>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(false)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| format!("{}: {e}", path.display()))?
        .clone();
    let index_of = |name: &str| headers.iter().position(|h| h.trim() == name);
    let rh_col = index_of("rh_percent")
        .ok_or_else(|| format!("{}: missing column rh_percent", path.display()))?;
    let cap_col = index_of("capacitance_pf")
        .ok_or_else(|| format!("{}: missing column capacitance_pf", path.display()))?;
    let temp_col = index_of("temp_c");
    let branch_col = index_of("branch");

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| format!("{}: {e}", path.display()))?;
        let line = record.position().map_or(0, |p| p.line());
        let number = |col: usize, name: &str| -> Result<f64, String> {
            let raw = record
                .get(col)
                .ok_or_else(|| data_err(path, line, format!("missing {name}")))?;
            raw.trim()
                .parse::<f64>()
                .map_err(|_| data_err(path, line, format!("invalid {name} {raw:?}")))
        };
        let branch = match branch_col {
            Some(col) => {
                let raw = record.get(col).unwrap_or("").trim();
                if raw.is_empty() {
                    None
                } else {
                    Some(raw.parse::<Branch>().map_err(|e| data_err(path, line, e))?)
                }
            }
            None => None,
        };
        rows.push(Measurement {
            rh_percent: number(rh_col, "rh_percent")?,
            capacitance: number(cap_col, "capacitance_pf")? * 1e-12,
            temp_c: match temp_col {
                Some(col) => number(col, "temp_c")?,
                None => 25.0,
            },
            branch,
        });
    }
    MeasurementSet::new(rows).map_err(|e| format!("{}: {e}", path.display()))
}
