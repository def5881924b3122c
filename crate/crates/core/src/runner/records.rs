use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::Experiment;
use crate::error::{Error, Result};
use crate::exec::ordered_sum;

/// First line of every CSV written by the runner.
pub const SCHEMA_HEADER: &str = "# schema=1";

/// One evaluated or optimized instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub experiment: Experiment,
    pub n: usize,
    pub p: usize,
    pub instance: usize,
    /// Seed the instance was sampled from.
    pub seed: u64,
    /// Angles as JSON, `null` when there are none.
    pub schedule: String,
    pub e_pe: Option<f64>,
    pub e_st: f64,
    pub perf_st: f64,
    pub broken_constraints: Option<f64>,
    pub evals: Option<usize>,
    pub converged: Option<bool>,
    pub wall_ms: f64,
}

pub const RECORD_COLUMNS: [&str; 13] = [
    "experiment",
    "n",
    "p",
    "instance",
    "seed",
    "schedule",
    "e_pe",
    "e_st",
    "perf_st",
    "broken_constraints",
    "evals",
    "converged",
    "wall_ms",
];

/// Mean and standard error of `perf_st` over one `(experiment, n, p)` group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub experiment: Experiment,
    pub n: usize,
    pub p: usize,
    pub count: usize,
    pub mean: f64,
    pub sem: f64,
    pub three_sem: f64,
}

pub const AGGREGATE_COLUMNS: [&str; 7] = ["experiment", "n", "p", "count", "mean", "sem", "three_sem"];

/// Sample mean and standard error (`n - 1` normalization, zero for one value).
pub fn mean_sem(values: &[f64]) -> (f64, f64) {
    let count = values.len() as f64;
    let mean = ordered_sum(values) / count;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    let var = ordered_sum(&dev) / (count - 1.0);
    (mean, (var / count).sqrt())
}

/// Groups by `(experiment, n, p)` in sorted key order.
pub fn aggregate(records: &[RunRecord]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<(Experiment, usize, usize), Vec<f64>> = BTreeMap::new();
    for r in records {
        groups.entry((r.experiment, r.n, r.p)).or_default().push(r.perf_st);
    }
    groups
        .into_iter()
        .map(|((experiment, n, p), v)| {
            let (mean, sem) = mean_sem(&v);
            AggregateRow {
                experiment,
                n,
                p,
                count: v.len(),
                mean,
                sem,
                three_sem: 3.0 * sem,
            }
        })
        .collect()
}

/// Writes rows under the schema header.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T], columns: &[&str]) -> Result<()> {
    let mut file = File::create(path)?;
    writeln!(file, "{SCHEMA_HEADER}")?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(file);
    w.write_record(columns)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads rows written by [`write_csv`], checking the schema line and columns.
pub fn read_csv<T: DeserializeOwned>(path: &Path, columns: &[&str]) -> Result<Vec<T>> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    if first.trim_end() != SCHEMA_HEADER {
        return Err(Error::Schema(format!(
            "{}: expected '{SCHEMA_HEADER}' on the first line, found '{}'",
            path.display(),
            first.trim_end()
        )));
    }
    let mut r = csv::Reader::from_reader(reader);
    let found: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if found != columns {
        let missing: Vec<&str> = columns.iter().copied().filter(|c| !found.iter().any(|f| f == c)).collect();
        let extra: Vec<&str> = found.iter().map(String::as_str).filter(|f| !columns.contains(f)).collect();
        return Err(Error::Schema(format!(
            "{}: column mismatch, missing {missing:?}, unexpected {extra:?}",
            path.display()
        )));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

pub fn write_records(path: &Path, records: &[RunRecord]) -> Result<()> {
    write_csv(path, records, &RECORD_COLUMNS)
}

pub fn read_records(path: &Path) -> Result<Vec<RunRecord>> {
    read_csv(path, &RECORD_COLUMNS)
}

pub fn write_aggregate(path: &Path, rows: &[AggregateRow]) -> Result<()> {
    write_csv(path, rows, &AGGREGATE_COLUMNS)
}

pub fn read_aggregate(path: &Path) -> Result<Vec<AggregateRow>> {
    read_csv(path, &AGGREGATE_COLUMNS)
}

/// Recomputes the aggregate table of a records file and writes it to `out`.
pub fn aggregate_path(records: &Path, out: &Path) -> Result<Vec<AggregateRow>> {
    let rows = aggregate(&read_records(records)?);
    write_aggregate(out, &rows)?;
    Ok(rows)
}

/// SHA-256 over the records with the wall-clock column zeroed, so two runs of
/// the same configuration give the same digest.
pub fn records_digest(records: &[RunRecord]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for r in records {
        w.serialize(RunRecord { wall_ms: 0.0, ..r.clone() })?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}
