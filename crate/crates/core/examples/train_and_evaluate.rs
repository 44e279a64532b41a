//! Train the desk-scale network, then run it on one faulty chip under every
//! mapping strategy.
//!
//! Needs the MNIST-format files named in the config.
//!
//! `cargo run --release --example train_and_evaluate -- [config] [rate] [seed]`

use std::path::PathBuf;

use snn_fam::fam::Strategy;
use snn_fam::fault::generate_fault_map;
use snn_fam::harness::{evaluate_on_map, load_datasets, train_model, ExperimentConfig};

fn main() -> snn_fam::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/desk.toml"));
    let rate: f64 = args.next().map_or(0.3, |a| a.parse().expect("rate"));
    let seed: u64 = args.next().map_or(1, |a| a.parse().expect("seed"));

    let cfg = ExperimentConfig::load(&config)?;
    let data = load_datasets(&cfg)?;
    println!(
        "training N{} on {} images for {} epoch(s)",
        cfg.model.n_neurons,
        data.train.len(),
        cfg.training.epochs
    );
    let trained = train_model(&cfg, &data, cfg.training.seed)?;
    let silent = trained.model.neuron_labels.iter().filter(|l| l.is_none()).count();
    println!(
        "fault-free accuracy {:.2}%  ({} unlabeled neurons)",
        100.0 * trained.fault_free_accuracy,
        silent
    );

    let map = generate_fault_map(cfg.geometry()?, rate, seed, cfg.crossbar.granularity)?;
    println!("\nrate {rate}, seed {seed}");
    for strategy in Strategy::ALL {
        let (acc, cost) = evaluate_on_map(&cfg, &trained.model, &map, strategy, &data.test)?;
        println!(
            "{strategy:<9} accuracy {:>6.2}%  passes {}  throughput {:.0}/s",
            100.0 * acc,
            cost.passes,
            cost.throughput
        );
    }
    Ok(())
}
