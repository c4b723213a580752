//! Deterministic serialization: 17-significant-digit CSV numerics, sorted
//! JSON keys, no timestamps. Two runs with identical (config, seed) must be
//! byte-identical.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Value};

use kahler_lens::linalg::RVec;
use kahler_lens::IdentityReport;

/// Version of every emitted JSON document / JSONL row.
pub const SCHEMA_VERSION: u32 = 1;

/// 17 significant digits (1 leading + 16 fractional), `.` decimal point.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn fmt_point(p: &RVec) -> String {
    p.iter().map(|v| fmt_float(*v)).collect::<Vec<_>>().join(";")
}

/// Floats enter JSON as exact shortest-roundtrip numbers.
fn json_floats(vs: &[f64]) -> Value {
    Value::Array(vs.iter().map(|v| json!(v)).collect())
}

pub fn report_to_json(report: &IdentityReport, direction: Option<usize>) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "id": report.id,
        "point": json_floats(report.point.as_slice()),
        "direction": direction,
        "lhs": json_floats(&report.lhs),
        "rhs": json_floats(&report.rhs),
        "residual": report.residual,
        "relative": report.relative,
        "tolerance": report.tolerance,
        "verdict": report.verdict.as_str(),
        "skip_reason": report.skip_reason,
        "notes": report.notes,
    })
}

pub fn write_jsonl(path: &Path, rows: &[Value]) -> Result<()> {
    let mut w = BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    );
    for row in rows {
        serde_json::to_writer(&mut w, row)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut w = BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    );
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn report_csv_header() -> Vec<String> {
    ["id", "point", "direction", "residual", "relative", "tolerance", "verdict", "skip_reason", "notes"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

pub fn report_csv_row(report: &IdentityReport, direction: Option<usize>) -> Vec<String> {
    vec![
        report.id.to_string(),
        fmt_point(&report.point),
        direction.map(|k| k.to_string()).unwrap_or_default(),
        fmt_float(report.residual),
        fmt_float(report.relative),
        fmt_float(report.tolerance),
        report.verdict.as_str().to_string(),
        report.skip_reason.clone().unwrap_or_default(),
        report.notes.join(" | "),
    ]
}
