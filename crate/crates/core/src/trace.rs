//! Per-iteration telemetry rows and their CSV/JSON serialization.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::OracleCounters;

/// One telemetry row. APGIter rows carry the 1-based iteration count of the
/// current σ loop in `inner_k`; initialization rows (the proximal gradient
/// step that starts a restart run) use `inner_k = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub outer_t: u64,
    pub sigma_index_j: u64,
    pub inner_k: u64,
    pub sigma: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub g_map_norm: f64,
    pub phi_val: f64,
    pub f_evals: u64,
    pub grad_evals: u64,
    pub prox_evals: u64,
    pub elapsed_s: f64,
}

/// Column names in field order.
pub const TRACE_COLUMNS: [&str; 12] = [
    "outer_t",
    "sigma_index_j",
    "inner_k",
    "sigma",
    "A",
    "M",
    "g_map_norm",
    "phi_val",
    "f_evals",
    "grad_evals",
    "prox_evals",
    "elapsed_s",
];

/// Row position handed to [`Trace::push`].
#[derive(Clone, Copy, Debug, Default)]
pub struct RowIndex {
    pub outer_t: u64,
    pub sigma_index_j: u64,
    pub inner_k: u64,
}

/// Measured quantities handed to [`Trace::push`].
#[derive(Clone, Copy, Debug)]
pub struct RowValues {
    pub sigma: f64,
    pub a: f64,
    pub m: f64,
    pub g_map_norm: f64,
    pub phi_val: f64,
}

/// Accumulates rows during a run. Timing is opt-in so that untimed traces
/// are reproducible byte for byte.
#[derive(Clone, Debug, Default)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    start: Option<Instant>,
}

impl Trace {
    pub fn new() -> Self {
        Trace::default()
    }

    pub fn timed() -> Self {
        Trace { records: Vec::new(), start: Some(Instant::now()) }
    }

    pub fn is_timed(&self) -> bool {
        self.start.is_some()
    }

    pub fn push(&mut self, at: RowIndex, vals: RowValues, counters: OracleCounters) {
        let elapsed_s = self.start.map_or(0.0, |s| s.elapsed().as_secs_f64());
        self.records.push(TraceRecord {
            outer_t: at.outer_t,
            sigma_index_j: at.sigma_index_j,
            inner_k: at.inner_k,
            sigma: vals.sigma,
            a: vals.a,
            m: vals.m,
            g_map_norm: vals.g_map_norm,
            phi_val: vals.phi_val,
            f_evals: counters.f_evals,
            grad_evals: counters.grad_evals,
            prox_evals: counters.prox_evals,
            elapsed_s,
        });
    }

    pub fn into_records(self) -> Vec<TraceRecord> {
        self.records
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceFormat {
    Csv,
    Json,
}

impl std::str::FromStr for TraceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TraceFormat::Csv),
            "json" => Ok(TraceFormat::Json),
            other => Err(Error::InvalidParameter(format!("unknown trace format '{other}'"))),
        }
    }
}

// 17 significant digits: enough to round-trip any f64.
fn fmt_real(out: &mut String, x: f64) {
    if x.is_finite() {
        let _ = write!(out, "{x:.16e}");
    } else if x.is_nan() {
        out.push_str("NaN");
    } else if x > 0.0 {
        out.push_str("inf");
    } else {
        out.push_str("-inf");
    }
}

/// CSV text with a header row; reals printed with 17 significant digits.
pub fn trace_to_csv(records: &[TraceRecord]) -> String {
    let mut out = TRACE_COLUMNS.join(",");
    out.push('\n');
    for r in records {
        let _ = write!(out, "{},{},{},", r.outer_t, r.sigma_index_j, r.inner_k);
        for x in [r.sigma, r.a, r.m, r.g_map_norm, r.phi_val] {
            fmt_real(&mut out, x);
            out.push(',');
        }
        let _ = write!(out, "{},{},{},", r.f_evals, r.grad_evals, r.prox_evals);
        fmt_real(&mut out, r.elapsed_s);
        out.push('\n');
    }
    out
}

/// JSON array of objects keyed by the CSV column names. Non-finite reals
/// are written as null.
pub fn trace_to_json(records: &[TraceRecord]) -> String {
    serde_json::to_string_pretty(records).expect("trace rows always serialize")
}

pub fn write_trace<W: Write>(records: &[TraceRecord], format: TraceFormat, mut w: W) -> std::io::Result<()> {
    let text = match format {
        TraceFormat::Csv => trace_to_csv(records),
        TraceFormat::Json => trace_to_json(records),
    };
    w.write_all(text.as_bytes())?;
    w.flush()
}

pub fn export_trace(records: &[TraceRecord], path: &std::path::Path, format: TraceFormat) -> std::io::Result<()> {
    let file = std::fs::File::create(path)?;
    write_trace(records, format, std::io::BufWriter::new(file))
}

/// Parses CSV produced by [`trace_to_csv`] (header required).
pub fn read_trace_csv<R: Read>(r: R) -> Result<Vec<TraceRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers().map_err(|e| Error::InvalidParameter(format!("bad trace header: {e}")))?;
    if header.iter().ne(TRACE_COLUMNS.iter().copied()) {
        return Err(Error::InvalidParameter(format!("unexpected trace columns: {:?}", header)));
    }
    rdr.deserialize()
        .map(|row| row.map_err(|e| Error::InvalidParameter(format!("bad trace row: {e}"))))
        .collect()
}
