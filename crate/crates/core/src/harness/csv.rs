use std::fs;
use std::path::Path;

use super::spec::Method;
use super::sweep::{SweepResult, SweepRow};
use crate::{Error, Result};

pub const CSV_HEADER: &str = "sweep_value,method,nmse_linear,nmse_db,trials,wall_time_s";

/// 17 significant digits: enough to round-trip every `f64`.
fn number(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_csv_string(result: &SweepResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &result.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            number(r.sweep_value),
            r.method,
            number(r.mean_nmse_linear),
            number(r.mean_nmse_db),
            r.trial_count,
            number(r.wall_time_s)
        ));
    }
    out
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    fs::write(path, to_csv_string(result)).map_err(|e| Error::io(path, e))
}

pub fn parse_csv(text: &str) -> Result<SweepResult> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::domain("missing or unexpected CSV header"));
    }
    let rows = lines
        .enumerate()
        .map(|(i, line)| {
            let bad = |what: &str| Error::domain(format!("row {}: {what}", i + 1));
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 6 {
                return Err(bad("expected 6 fields"));
            }
            let real = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number"));
            Ok(SweepRow {
                sweep_value: real(fields[0])?,
                method: fields[1].parse::<Method>()?,
                mean_nmse_linear: real(fields[2])?,
                mean_nmse_db: real(fields[3])?,
                trial_count: fields[4].parse().map_err(|_| bad("bad trial count"))?,
                wall_time_s: real(fields[5])?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { rows })
}
