use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fam::Strategy;
use crate::fault::generate_fault_map;
use crate::io::LabeledImageSet;

use super::config::ExperimentConfig;
use super::pipeline::{eval_row, neuron_fault_accuracy, TrainedModel};
use super::report::{mean_std, read_csv, write_csv, NeuronFaultRow, ReportRow, ROW_COLUMNS};

pub const ROWS_FILE: &str = "sweep_rows.csv";
pub const AGGREGATE_CSV: &str = "sweep_aggregate.csv";
pub const AGGREGATE_JSON: &str = "sweep_aggregate.json";
const META_FILE: &str = "sweep_meta.json";

/// Mean and sample standard deviation over the seeds of one
/// `(strategy, rate)` cell. Failed rows only count toward `failed`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub strategy: Strategy,
    pub rate: f64,
    pub seeds: usize,
    pub failed: usize,
    pub accuracy_mean: f64,
    pub accuracy_std: f64,
    pub passes_mean: f64,
    pub throughput_mean: f64,
    pub throughput_std: f64,
    pub latency_mean: f64,
    pub energy_mean: f64,
    pub utilization_mean: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub workload: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub config_fingerprint: String,
    pub model_fingerprint: String,
    pub fault_free_accuracy: f64,
    pub cells: Vec<AggregateRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct SweepMeta {
    config_fingerprint: String,
    model_fingerprint: String,
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub rows: Vec<ReportRow>,
    pub aggregate: AggregateReport,
    /// Rows reused from an earlier interrupted run.
    pub resumed: usize,
    pub rows_path: PathBuf,
}

/// Evaluates every `(rate, seed, strategy)` job of the config.
///
/// All strategies of one `(rate, seed)` share a fault map. Rows are appended
/// to `out_dir/sweep_rows.csv` as each map finishes; a rerun against the same
/// config and model skips jobs already on disk. The final files are written
/// in canonical order, so they do not depend on how often the sweep was
/// interrupted.
pub fn run_sweep(
    cfg: &ExperimentConfig,
    trained: &TrainedModel,
    test: &LabeledImageSet,
    out_dir: &Path,
) -> Result<SweepOutcome> {
    fs::create_dir_all(out_dir)?;
    let meta = SweepMeta {
        config_fingerprint: cfg.fingerprint().to_string(),
        model_fingerprint: trained.fingerprint().to_string(),
    };
    let header = report_header(&meta, trained.fault_free_accuracy);
    let rows_path = out_dir.join(ROWS_FILE);
    let meta_path = out_dir.join(META_FILE);

    let mut done: HashMap<_, ReportRow> = HashMap::new();
    let previous: Option<SweepMeta> = fs::read(&meta_path)
        .ok()
        .and_then(|b| serde_json::from_slice(&b).ok());
    if previous.as_ref() == Some(&meta) && rows_path.is_file() {
        if let Ok(rows) = read_csv::<ReportRow>(&rows_path) {
            done.extend(rows.into_iter().map(|r| (r.key(), r)));
        }
    }
    let resumed_keys: Vec<_> = done.keys().copied().collect();
    fs::write(&meta_path, serde_json::to_vec_pretty(&meta).expect("meta serializes"))?;

    let model = &trained.model;
    let geometry = cfg.geometry()?;
    let order = canonical_jobs(cfg);
    let mut progress: Vec<ReportRow> = order.iter().filter_map(|k| done.get(k).cloned()).collect();
    write_csv(&rows_path, &header, &ROW_COLUMNS, &progress)?;

    for &rate in &cfg.sweep.rates {
        for &seed in &cfg.sweep.seeds {
            let pending: Vec<Strategy> = cfg
                .sweep
                .strategies
                .iter()
                .copied()
                .filter(|s| !done.contains_key(&(*s, rate.to_bits(), seed)))
                .collect();
            if pending.is_empty() {
                continue;
            }
            let map = generate_fault_map(geometry, rate, seed, cfg.crossbar.granularity)?;
            for strategy in pending {
                let row = eval_row(cfg, model, &map, strategy, test);
                done.insert(row.key(), row.clone());
                progress.push(row);
            }
            write_csv(&rows_path, &header, &ROW_COLUMNS, &progress)?;
        }
    }

    let rows: Vec<ReportRow> = order.iter().map(|k| done[k].clone()).collect();
    write_csv(&rows_path, &header, &ROW_COLUMNS, &rows)?;
    let aggregate = aggregate(cfg, &meta, trained.fault_free_accuracy, &rows);
    write_csv(out_dir.join(AGGREGATE_CSV), &header, &AGGREGATE_COLUMNS, &aggregate.cells)?;
    let mut json = serde_json::to_vec_pretty(&aggregate).expect("aggregate serializes");
    json.push(b'\n');
    fs::write(out_dir.join(AGGREGATE_JSON), json)?;

    Ok(SweepOutcome {
        resumed: resumed_keys.iter().filter(|k| order.contains(k)).count(),
        rows,
        aggregate,
        rows_path,
    })
}

const AGGREGATE_COLUMNS: [&str; 12] = [
    "strategy",
    "rate",
    "seeds",
    "failed",
    "accuracy_mean",
    "accuracy_std",
    "passes_mean",
    "throughput_mean",
    "throughput_std",
    "latency_mean",
    "energy_mean",
    "utilization_mean",
];

fn report_header(meta: &SweepMeta, fault_free_accuracy: f64) -> Vec<(&'static str, String)> {
    vec![
        ("config_fingerprint", meta.config_fingerprint.clone()),
        ("model_fingerprint", meta.model_fingerprint.clone()),
        ("fault_free_accuracy", fault_free_accuracy.to_string()),
    ]
}

fn canonical_jobs(cfg: &ExperimentConfig) -> Vec<(Strategy, u64, u64)> {
    let mut jobs = Vec::new();
    for &rate in &cfg.sweep.rates {
        for &seed in &cfg.sweep.seeds {
            for &s in &cfg.sweep.strategies {
                let key = (s, rate.to_bits(), seed);
                if !jobs.contains(&key) {
                    jobs.push(key);
                }
            }
        }
    }
    jobs
}

fn aggregate(
    cfg: &ExperimentConfig,
    meta: &SweepMeta,
    fault_free_accuracy: f64,
    rows: &[ReportRow],
) -> AggregateReport {
    let mut cells = Vec::new();
    let mut seen = Vec::new();
    for &rate in &cfg.sweep.rates {
        for &strategy in &cfg.sweep.strategies {
            if seen.contains(&(strategy, rate.to_bits())) {
                continue;
            }
            seen.push((strategy, rate.to_bits()));
            let cell: Vec<&ReportRow> = rows
                .iter()
                .filter(|r| r.strategy == strategy && r.rate.to_bits() == rate.to_bits())
                .collect();
            let ok: Vec<&ReportRow> = cell.iter().copied().filter(|r| r.is_ok()).collect();
            let col = |f: fn(&ReportRow) -> Option<f64>| -> Vec<f64> {
                ok.iter().filter_map(|r| f(r)).collect()
            };
            let (accuracy_mean, accuracy_std) = mean_std(&col(|r| r.accuracy));
            let (throughput_mean, throughput_std) = mean_std(&col(|r| r.throughput));
            cells.push(AggregateRow {
                strategy,
                rate,
                seeds: ok.len(),
                failed: cell.len() - ok.len(),
                accuracy_mean,
                accuracy_std,
                passes_mean: mean_std(&col(|r| r.passes.map(|p| p as f64))).0,
                throughput_mean,
                throughput_std,
                latency_mean: mean_std(&col(|r| r.latency)).0,
                energy_mean: mean_std(&col(|r| r.energy)).0,
                utilization_mean: mean_std(&col(|r| r.utilization)).0,
            });
        }
    }
    AggregateReport {
        workload: cfg.workload.clone(),
        n: cfg.model.n_neurons,
        config_fingerprint: meta.config_fingerprint.clone(),
        model_fingerprint: meta.model_fingerprint.clone(),
        fault_free_accuracy,
        cells,
    }
}

/// Single-kind neuron fault analysis over `sweep.neuron_kinds` x
/// `sweep.neuron_rates` x `sweep.seeds`, synapses fault-free.
pub fn analyze_neuron_faults(
    cfg: &ExperimentConfig,
    trained: &TrainedModel,
    test: &LabeledImageSet,
) -> Result<Vec<NeuronFaultRow>> {
    let mut rows = Vec::new();
    for &kind in &cfg.sweep.neuron_kinds {
        for &rate in &cfg.sweep.neuron_rates {
            for &seed in &cfg.sweep.seeds {
                let accuracy = if rate == 0.0 {
                    trained.fault_free_accuracy
                } else {
                    neuron_fault_accuracy(cfg, &trained.model, kind, rate, seed, test)?
                };
                rows.push(NeuronFaultRow {
                    workload: cfg.workload.clone(),
                    n: trained.model.n_neurons(),
                    kind,
                    rate,
                    seed,
                    accuracy,
                });
            }
        }
    }
    Ok(rows)
}

pub const NEURON_COLUMNS: [&str; 6] = ["workload", "N", "kind", "rate", "seed", "accuracy"];
