//! Full strategy x rate x seed sweep with row and aggregate reports.
//!
//! Rerunning with the same config resumes from the rows already written.
//!
//! `cargo run --release --example sweep -- [config] [out_dir]`

use std::path::PathBuf;

use snn_fam::harness::{load_datasets, run_sweep, train_model, ExperimentConfig};

fn main() -> snn_fam::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/desk.toml"));
    let cfg = ExperimentConfig::load(&config)?;
    let out_dir = args.next().map(PathBuf::from).unwrap_or_else(|| cfg.output_dir.clone());

    let data = load_datasets(&cfg)?;
    let trained = train_model(&cfg, &data, cfg.training.seed)?;
    let outcome = run_sweep(&cfg, &trained, &data.test, &out_dir)?;
    println!(
        "{} rows ({} resumed), config {}",
        outcome.rows.len(),
        outcome.resumed,
        &outcome.aggregate.config_fingerprint[..16]
    );
    println!("\nstrategy  rate   accuracy        throughput  passes");
    for c in &outcome.aggregate.cells {
        println!(
            "{:<9} {:<6} {:>6.2}% +- {:<5.2} {:>10.1}  {:.1}",
            c.strategy,
            c.rate,
            100.0 * c.accuracy_mean,
            100.0 * c.accuracy_std,
            c.throughput_mean,
            c.passes_mean
        );
    }
    println!("\nreports in {}", out_dir.display());
    Ok(())
}
