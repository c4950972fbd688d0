use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 8] = [
    "experiment",
    "mechanism",
    "n",
    "eps",
    "replicate",
    "metric_name",
    "value",
    "wall_ms",
];

/// One measured value for one (replicate, n) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub experiment: String,
    pub mechanism: String,
    pub n: usize,
    pub eps: f64,
    pub replicate: usize,
    pub metric_name: String,
    pub value: f64,
    pub wall_ms: f64,
}

/// Floats are written with 17 significant digits so they parse back exactly.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Data(format!("{}: {other:?}", path.display())),
    }
}

pub fn write_csv<W: Write>(records: &[RunRecord], w: W) -> std::io::Result<()> {
    let mut wr = csv_writer(w);
    wr.write_record(CSV_HEADER)?;
    for r in records {
        wr.write_record([
            r.experiment.as_str(),
            r.mechanism.as_str(),
            &r.n.to_string(),
            &fmt_float(r.eps),
            &r.replicate.to_string(),
            r.metric_name.as_str(),
            &fmt_float(r.value),
            &fmt_float(r.wall_ms),
        ])?;
    }
    wr.flush()
}

/// Write records as UTF-8 CSV with LF line endings.
pub fn emit_csv(records: &[RunRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(records, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    let path = path.as_ref();
    let mut rd = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    rd.deserialize()
        .map(|r| r.map_err(|e| csv_err(path, e)))
        .collect()
}

/// Mean and nearest-rank 5th/95th percentiles of one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub experiment: String,
    pub mechanism: String,
    pub n: usize,
    pub eps: f64,
    pub metric_name: String,
    pub count: usize,
    pub mean: f64,
    pub p5: f64,
    pub p95: f64,
}

/// Nearest-rank percentile of sorted values: the ⌈pN/100⌉-th smallest.
pub fn nearest_rank(sorted: &[f64], percent: usize) -> f64 {
    let n = sorted.len();
    let rank = (percent * n).div_ceil(100).clamp(1, n);
    sorted[rank - 1]
}

pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut cells: BTreeMap<(&str, &str, &str, usize, u64), Vec<f64>> = BTreeMap::new();
    for r in records {
        let key = (
            r.experiment.as_str(),
            r.mechanism.as_str(),
            r.metric_name.as_str(),
            r.n,
            r.eps.to_bits(),
        );
        let cell = cells.entry(key).or_default();
        if r.value.is_finite() {
            cell.push(r.value);
        }
    }
    let mut rows = Vec::with_capacity(cells.len());
    for ((experiment, mechanism, metric, n, eps), mut values) in cells {
        if values.is_empty() {
            log::warn!("skipping empty cell {experiment}/{mechanism} n={n}");
            continue;
        }
        values.sort_by(f64::total_cmp);
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        rows.push(SummaryRow {
            experiment: experiment.to_string(),
            mechanism: mechanism.to_string(),
            n,
            eps: f64::from_bits(eps),
            metric_name: metric.to_string(),
            count: values.len(),
            mean,
            p5: nearest_rank(&values, 5),
            p95: nearest_rank(&values, 95),
        });
    }
    rows
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], w: W) -> std::io::Result<()> {
    let mut wr = csv_writer(w);
    wr.write_record(["experiment", "mechanism", "n", "eps", "metric_name", "count", "mean", "p5", "p95"])?;
    for r in rows {
        wr.write_record([
            r.experiment.as_str(),
            r.mechanism.as_str(),
            &r.n.to_string(),
            &fmt_float(r.eps),
            r.metric_name.as_str(),
            &r.count.to_string(),
            &fmt_float(r.mean),
            &fmt_float(r.p5),
            &fmt_float(r.p95),
        ])?;
    }
    wr.flush()
}
