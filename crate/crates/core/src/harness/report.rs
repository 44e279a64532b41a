use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cost::CostReport;
use crate::error::Result;
use crate::fam::Strategy;
use crate::fault::NeuronFaultTag;

use super::config::ExperimentConfig;

/// One evaluation of one strategy on one fault map. Missing values are empty
/// cells in the CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub workload: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub strategy: Strategy,
    pub rate: f64,
    pub seed: u64,
    pub accuracy: Option<f64>,
    pub passes: Option<usize>,
    pub latency: Option<f64>,
    pub throughput: Option<f64>,
    pub energy: Option<f64>,
    pub area: Option<f64>,
    pub utilization: Option<f64>,
    pub status: String,
}

pub const ROW_COLUMNS: [&str; 13] = [
    "workload",
    "N",
    "strategy",
    "rate",
    "seed",
    "accuracy",
    "passes",
    "latency",
    "throughput",
    "energy",
    "area",
    "utilization",
    "status",
];

impl ReportRow {
    pub const OK: &'static str = "ok";
    pub const UNMAPPABLE: &'static str = "unmappable";

    pub fn pending(cfg: &ExperimentConfig, n: usize, strategy: Strategy, rate: f64, seed: u64) -> Self {
        ReportRow {
            workload: cfg.workload.clone(),
            n,
            strategy,
            rate,
            seed,
            accuracy: None,
            passes: None,
            latency: None,
            throughput: None,
            energy: None,
            area: None,
            utilization: None,
            status: "pending".into(),
        }
    }

    pub fn fill(&mut self, accuracy: f64, cost: &CostReport) {
        self.accuracy = Some(accuracy);
        self.passes = Some(cost.passes);
        self.latency = Some(cost.latency_per_sample);
        self.throughput = Some(cost.throughput);
        self.energy = Some(cost.energy_per_sample);
        self.area = Some(cost.area_mm2);
        self.utilization = Some(cost.utilization);
        self.status = Self::OK.into();
    }

    pub fn is_ok(&self) -> bool {
        self.status == Self::OK
    }

    /// Identity of the job that produced this row.
    pub(crate) fn key(&self) -> (Strategy, u64, u64) {
        (self.strategy, self.rate.to_bits(), self.seed)
    }
}

/// Row of the single-kind neuron fault analysis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeuronFaultRow {
    pub workload: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub kind: NeuronFaultTag,
    pub rate: f64,
    pub seed: u64,
    pub accuracy: f64,
}

/// Writes `# key value` header lines followed by a CSV table. An empty
/// `rows` still gets the column header.
pub fn write_csv<T: Serialize>(
    path: impl AsRef<Path>,
    header: &[(&str, String)],
    columns: &[&str],
    rows: &[T],
) -> Result<()> {
    let path = path.as_ref();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut out = BufWriter::new(File::create(path)?);
    for (k, v) in header {
        writeln!(out, "# {k} {v}")?;
    }
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(columns)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a table written by [`write_csv`], skipping `#` lines.
pub fn read_csv<T: for<'de> Deserialize<'de>>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    let mut rows = Vec::new();
    for rec in r.deserialize() {
        rows.push(rec?);
    }
    Ok(rows)
}

/// `# key value` header lines of a report.
pub fn read_header(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    Ok(fs::read_to_string(path)?
        .lines()
        .take_while(|l| l.starts_with('#'))
        .filter_map(|l| {
            let (k, v) = l.trim_start_matches('#').trim().split_once(' ')?;
            Some((k.to_string(), v.to_string()))
        })
        .collect())
}

pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
