use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::io::write_atomic;

/// One estimator evaluation on one generated pair of datasets.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRecord {
    pub scenario: String,
    pub run_id: usize,
    pub d: usize,
    pub n: usize,
    /// AR(1) coefficient; blank for factor scenarios.
    pub alpha: Option<f64>,
    pub method: String,
    pub estimate_sq: f64,
    pub reference_sq: f64,
    /// `|√estimate_sq − √reference_sq|`.
    pub abs_error: f64,
    pub wall_time_ns: u64,
    /// Seed of the cell the datasets were generated from.
    pub seed: u64,
}

/// Distance-scale error between two squared values. Tiny negative squares from
/// rounding are treated as 0.
pub fn distance_error(estimate_sq: f64, reference_sq: f64) -> f64 {
    (estimate_sq.max(0.0).sqrt() - reference_sq.max(0.0).sqrt()).abs()
}

pub const RECORD_HEADER: &str =
    "scenario,run_id,d,n,alpha,method,estimate_sq,reference_sq,abs_error,wall_time_ns,seed";

/// Writes records as CSV. Each line of `metadata` is emitted first as a `#` comment.
pub fn format_records(
    out: &mut dyn Write,
    records: &[ResultRecord],
    metadata: &[String],
) -> std::io::Result<()> {
    for line in metadata {
        writeln!(out, "# {line}")?;
    }
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(RECORD_HEADER.split(','))?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records(path: &Path, records: &[ResultRecord], metadata: &[String]) -> Result<()> {
    write_atomic(path, |out| format_records(out, records, metadata))
}
