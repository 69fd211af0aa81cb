//! Results tables.
//!
//! `raw.csv` columns: `fingerprint,trial,iteration` followed by the seven
//! metrics in [`MetricsRecord::METRICS`] order.
//!
//! `aggregate.csv` columns: `fingerprint,trial_count,iteration`, then for each
//! metric `<name>_median,<name>_min,<name>_max`.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::MetricsRecord;
use crate::pipeline::{AggregateRow, TrialResult};

pub fn raw_header() -> Vec<String> {
    let mut h = vec!["fingerprint".to_string(), "trial".into(), "iteration".into()];
    h.extend(MetricsRecord::METRICS.iter().map(|m| m.to_string()));
    h
}

pub fn aggregate_header() -> Vec<String> {
    let mut h = vec!["fingerprint".to_string(), "trial_count".into(), "iteration".into()];
    for m in MetricsRecord::METRICS {
        for s in ["median", "min", "max"] {
            h.push(format!("{m}_{s}"));
        }
    }
    h
}

// `Display` for f64 prints the shortest string that parses back to the
// same value.
fn real(x: f64) -> String {
    format!("{x}")
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

pub fn write_raw<W: Write>(w: W, fingerprint: &str, trials: &[TrialResult]) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(raw_header())?;
    for t in trials {
        for r in &t.records {
            let mut row = vec![fingerprint.to_string(), r.trial.to_string(), r.iteration.to_string()];
            row.extend(r.values().iter().map(|&v| real(v)));
            wtr.write_record(&row)?;
        }
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_aggregate<W: Write>(
    w: W,
    fingerprint: &str,
    trial_count: usize,
    rows: &[AggregateRow],
) -> Result<()> {
    let mut wtr = writer(w);
    wtr.write_record(aggregate_header())?;
    for r in rows {
        let mut row = vec![fingerprint.to_string(), trial_count.to_string(), r.iteration.to_string()];
        for m in 0..7 {
            row.extend([real(r.median[m]), real(r.min[m]), real(r.max[m])]);
        }
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

/// Reads a table, checking the header, and hands each record to `row`.
fn read_table(
    path: &Path,
    expected: &[String],
    mut row: impl FnMut(&csv::StringRecord, &dyn Fn(usize) -> Result<f64>) -> Result<()>,
) -> Result<()> {
    let mut rdr = csv::Reader::from_path(path)?;
    let header: Vec<&str> = rdr.headers()?.iter().collect();
    if header != expected {
        return Err(parse_error(path, 1, format!("unexpected columns `{}`", header.join(","))));
    }
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |k: usize| -> Result<f64> {
            record[k]
                .parse::<f64>()
                .map_err(|_| parse_error(path, line, format!("invalid number `{}` in column {}", &record[k], expected[k])))
        };
        row(&record, &field)?;
    }
    Ok(())
}

fn index(path: &Path, record: &csv::StringRecord, k: usize) -> Result<usize> {
    let line = record.position().map_or(0, |p| p.line());
    record[k]
        .parse()
        .map_err(|_| parse_error(path, line, format!("invalid integer `{}`", &record[k])))
}

/// Reads `raw.csv` back into (fingerprint, record) pairs.
pub fn read_raw(path: &Path) -> Result<Vec<(String, MetricsRecord)>> {
    let mut out = Vec::new();
    read_table(path, &raw_header(), |rec, field| {
        let v: Vec<f64> = (3..10).map(field).collect::<Result<_>>()?;
        out.push((
            rec[0].to_string(),
            MetricsRecord {
                trial: index(path, rec, 1)?,
                iteration: index(path, rec, 2)?,
                error_all: v[0],
                error_priv: v[1],
                error_unpriv: v[2],
                error_diff: v[3],
                exposure_priv: v[4],
                exposure_unpriv: v[5],
                exposure_diff: v[6],
            },
        ));
        Ok(())
    })?;
    Ok(out)
}

/// Reads `aggregate.csv`.
pub fn read_aggregate(path: &Path) -> Result<Vec<AggregateRow>> {
    let mut out = Vec::new();
    read_table(path, &aggregate_header(), |rec, field| {
        let mut row = AggregateRow {
            iteration: index(path, rec, 2)?,
            median: [0.0; 7],
            min: [0.0; 7],
            max: [0.0; 7],
        };
        for m in 0..7 {
            row.median[m] = field(3 + 3 * m)?;
            row.min[m] = field(4 + 3 * m)?;
            row.max[m] = field(5 + 3 * m)?;
        }
        out.push(row);
        Ok(())
    })?;
    Ok(out)
}
