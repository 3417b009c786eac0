//! CSV and JSON-lines serialization of run records.
//!
//! Column order is fixed per record type:
//!
//! | record          | columns |
//! |-----------------|---------|
//! | [`SweepRecord`] | phi_rad, delta_lambda_m, ratio, recoil_dp, pointer_overlap, regime, visibility, f_mix, n_branch1, n_branch2, seed |
//! | [`EnsembleStats`] | n_total, n_branch1, n_branch2, fraction1, regime, seed |
//! | [`ScanPoint`]   | dp_kgms, pointer_overlap, regime, visibility |
//!
//! JSON lines use the same field names. Floats are written in their shortest
//! round-trip form (at most 17 significant digits), so parsing a field gives
//! back the exact value.

use serde::Serialize;

use crate::compton::SweepRecord;
use crate::config::OutputFormat;
use crate::error::{Error, Result};
use crate::mirror::ScanPoint;
use crate::ssb::EnsembleStats;

/// Shortest representation that parses back to the same `f64`.
/// Integral values print without exponent or decimal point.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else if x.fract() == 0.0 && x.abs() < 1e16 {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub trait Record: Serialize {
    const HEADER: &'static [&'static str];

    fn csv_fields(&self) -> Vec<String>;

    /// Module invariants the record must satisfy before it is written.
    fn validate(&self) -> Result<()>;
}

impl Record for SweepRecord {
    const HEADER: &'static [&'static str] = &[
        "phi_rad",
        "delta_lambda_m",
        "ratio",
        "recoil_dp",
        "pointer_overlap",
        "regime",
        "visibility",
        "f_mix",
        "n_branch1",
        "n_branch2",
        "seed",
    ];

    fn csv_fields(&self) -> Vec<String> {
        vec![
            format_f64(self.phi_rad),
            format_f64(self.delta_lambda_m),
            format_f64(self.ratio),
            format_f64(self.recoil_dp),
            format_f64(self.pointer_overlap),
            self.regime.to_string(),
            format_f64(self.visibility),
            format_f64(self.f_mix),
            self.n_branch1.to_string(),
            self.n_branch2.to_string(),
            self.seed.to_string(),
        ]
    }

    fn validate(&self) -> Result<()> {
        SweepRecord::validate(self)
    }
}

impl Record for EnsembleStats {
    const HEADER: &'static [&'static str] = &["n_total", "n_branch1", "n_branch2", "fraction1", "regime", "seed"];

    fn csv_fields(&self) -> Vec<String> {
        vec![
            self.n_total.to_string(),
            self.n_branch1.to_string(),
            self.n_branch2.to_string(),
            self.fraction1.map(format_f64).unwrap_or_default(),
            self.regime.to_string(),
            self.seed.to_string(),
        ]
    }

    fn validate(&self) -> Result<()> {
        EnsembleStats::validate(self)
    }
}

impl Record for ScanPoint {
    const HEADER: &'static [&'static str] = &["dp_kgms", "pointer_overlap", "regime", "visibility"];

    fn csv_fields(&self) -> Vec<String> {
        vec![
            format_f64(self.dp_kgms),
            format_f64(self.pointer_overlap),
            self.regime.to_string(),
            format_f64(self.visibility),
        ]
    }

    fn validate(&self) -> Result<()> {
        ScanPoint::validate(self)
    }
}

pub fn csv_header<R: Record>() -> String {
    R::HEADER.join(",")
}

/// One serialized line, without the trailing newline. The record is
/// re-validated first; an invalid record is never written.
pub fn emit_record<R: Record>(record: &R, format: OutputFormat) -> Result<String> {
    record.validate()?;
    match format {
        OutputFormat::Csv => Ok(record.csv_fields().join(",")),
        OutputFormat::Jsonl => {
            serde_json::to_string(record).map_err(|e| Error::InvalidState(format!("serialization failed: {e}")))
        }
    }
}

/// Full document: header (CSV only) and one line per record.
pub fn emit_all<R: Record>(records: &[R], format: OutputFormat) -> Result<String> {
    let mut out = String::new();
    if format == OutputFormat::Csv {
        out.push_str(&csv_header::<R>());
        out.push('\n');
    }
    for r in records {
        out.push_str(&emit_record(r, format)?);
        out.push('\n');
    }
    Ok(out)
}
