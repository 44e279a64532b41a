mod common;

use std::fs;
use std::path::Path;

use snn_fam::fam::{build_plan, Strategy};
use snn_fam::fault::{generate_fault_map, CrossbarGeometry, NeuronGranularity};
use snn_fam::harness::{
    load_datasets, read_csv, read_header, run_sweep, train_model, Datasets, ExperimentConfig, ReportRow,
    TrainedModel, AGGREGATE_CSV, AGGREGATE_JSON, ROWS_FILE,
};
use snn_fam::io::{load_fault_map, load_model, load_plan, save_fault_map, save_model, save_plan};
use snn_fam::Error;

fn setup(dir: &Path) -> (ExperimentConfig, Datasets, TrainedModel) {
    let cfg = ExperimentConfig::load(common::tiny_workspace(dir)).unwrap();
    let data = load_datasets(&cfg).unwrap();
    let trained = train_model(&cfg, &data, cfg.training.seed).unwrap();
    (cfg, data, trained)
}

fn outputs(dir: &Path) -> Vec<Vec<u8>> {
    [ROWS_FILE, AGGREGATE_CSV, AGGREGATE_JSON]
        .iter()
        .map(|f| fs::read(dir.join(f)).unwrap())
        .collect()
}

#[test]
fn interrupted_sweep_resumes_to_identical_reports() {
    let ws = tempfile::tempdir().unwrap();
    let (cfg, data, trained) = setup(ws.path());

    let fresh = ws.path().join("fresh");
    let outcome = run_sweep(&cfg, &trained, &data.test, &fresh).unwrap();
    assert_eq!(outcome.resumed, 0);
    assert_eq!(outcome.rows.len(), 2 * 2 * 4);
    assert!(outcome.rows.iter().all(ReportRow::is_ok));

    // cut the row file back to its first three rows, as if killed mid-run
    let resumed = ws.path().join("resumed");
    run_sweep(&cfg, &trained, &data.test, &resumed).unwrap();
    let text = fs::read_to_string(resumed.join(ROWS_FILE)).unwrap();
    let n_header = text.lines().take_while(|l| l.starts_with('#')).count() + 1;
    let kept: Vec<&str> = text.lines().take(n_header + 3).collect();
    fs::write(resumed.join(ROWS_FILE), kept.join("\n") + "\n").unwrap();
    fs::remove_file(resumed.join(AGGREGATE_JSON)).unwrap();

    let outcome = run_sweep(&cfg, &trained, &data.test, &resumed).unwrap();
    assert_eq!(outcome.resumed, 3);
    assert_eq!(outputs(&fresh), outputs(&resumed));
}

#[test]
fn changed_config_discards_previous_rows() {
    let ws = tempfile::tempdir().unwrap();
    let (mut cfg, data, trained) = setup(ws.path());
    let out = ws.path().join("sweep");
    run_sweep(&cfg, &trained, &data.test, &out).unwrap();
    cfg.encoding.eval_seed += 1;
    assert_eq!(run_sweep(&cfg, &trained, &data.test, &out).unwrap().resumed, 0);
}

#[test]
fn sweep_is_deterministic_and_self_describing() {
    let ws = tempfile::tempdir().unwrap();
    let (cfg, data, trained) = setup(ws.path());
    let again = train_model(&cfg, &data, cfg.training.seed).unwrap();
    assert_eq!(trained.model, again.model);

    run_sweep(&cfg, &trained, &data.test, &ws.path().join("a")).unwrap();
    run_sweep(&cfg, &again, &data.test, &ws.path().join("b")).unwrap();
    assert_eq!(outputs(&ws.path().join("a")), outputs(&ws.path().join("b")));

    let header = read_header(ws.path().join("a").join(ROWS_FILE)).unwrap();
    let get = |k: &str| header.iter().find(|(key, _)| key == k).map(|(_, v)| v.clone());
    assert_eq!(get("config_fingerprint"), Some(cfg.fingerprint().to_string()));
    assert_eq!(get("model_fingerprint"), Some(trained.fingerprint().to_string()));
    let rows: Vec<ReportRow> = read_csv(ws.path().join("a").join(ROWS_FILE)).unwrap();
    assert_eq!(rows.len(), 16);
}

#[test]
fn empty_rate_list_gives_header_only_reports() {
    let ws = tempfile::tempdir().unwrap();
    let (mut cfg, data, trained) = setup(ws.path());
    cfg.sweep.rates.clear();
    let out = ws.path().join("sweep");
    let outcome = run_sweep(&cfg, &trained, &data.test, &out).unwrap();
    assert!(outcome.rows.is_empty());
    assert!(outcome.aggregate.cells.is_empty());
    let rows: Vec<ReportRow> = read_csv(out.join(ROWS_FILE)).unwrap();
    assert!(rows.is_empty());
    let text = fs::read_to_string(out.join(ROWS_FILE)).unwrap();
    assert!(text.lines().any(|l| l.starts_with("workload,N,strategy,rate,seed")));
}

#[test]
fn unmappable_jobs_are_reported_not_fatal() {
    let ws = tempfile::tempdir().unwrap();
    let (mut cfg, data, trained) = setup(ws.path());
    cfg.sweep.rates = vec![1.0];
    cfg.sweep.seeds = vec![1];
    let outcome = run_sweep(&cfg, &trained, &data.test, &ws.path().join("sweep")).unwrap();
    for row in &outcome.rows {
        let s: Strategy = row.strategy;
        // every column is faulty; fam3 still keeps the non-reset ones
        let excludes_all = matches!(s, Strategy::Fam1 | Strategy::Fam2);
        assert_eq!(row.status == ReportRow::UNMAPPABLE, excludes_all, "{s}");
    }
    let fam1 = outcome.aggregate.cells.iter().find(|c| c.strategy == Strategy::Fam1).unwrap();
    assert_eq!(fam1.failed, 1);
}

#[test]
fn artifacts_roundtrip_through_files() {
    let ws = tempfile::tempdir().unwrap();
    let (_, _, trained) = setup(ws.path());
    let p = |f: &str| ws.path().join(f);

    let fp = save_model(&trained.model, p("m.snnm")).unwrap();
    let model = load_model(p("m.snnm")).unwrap();
    assert_eq!(model, trained.model);
    assert_eq!(model.fingerprint(), fp);

    let g = CrossbarGeometry::new(64, 32).unwrap();
    let map = generate_fault_map(g, 0.2, 9, NeuronGranularity::PerOperation).unwrap();
    assert_eq!(save_fault_map(&map, p("f.snfm")).unwrap(), map.fingerprint());
    assert_eq!(load_fault_map(p("f.snfm")).unwrap(), map);

    let plan = build_plan(Strategy::Fam2, &map, 784, 20).unwrap();
    save_plan(&plan, p("p.snmp")).unwrap();
    assert_eq!(load_plan(p("p.snmp"), &map).unwrap(), plan);
    let other = generate_fault_map(g, 0.2, 10, NeuronGranularity::PerOperation).unwrap();
    assert!(matches!(load_plan(p("p.snmp"), &other), Err(Error::StaleArtifact { .. })));

    // a model file is not a fault map, and a flipped byte is caught
    assert!(load_fault_map(p("m.snnm")).is_err());
    let mut bytes = fs::read(p("f.snfm")).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 1;
    fs::write(p("f.snfm"), bytes).unwrap();
    assert!(load_fault_map(p("f.snfm")).is_err());
}
