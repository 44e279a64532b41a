//! Accuracy when only one kind of neuron operation is broken and all
//! synapses are healthy.
//!
//! `cargo run --release --example neuron_fault_analysis -- [config]`

use std::path::PathBuf;

use snn_fam::harness::{analyze_neuron_faults, load_datasets, train_model, ExperimentConfig};

fn main() -> snn_fam::Result<()> {
    let config = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/desk.toml"));
    let cfg = ExperimentConfig::load(&config)?;
    let data = load_datasets(&cfg)?;
    let trained = train_model(&cfg, &data, cfg.training.seed)?;
    println!("fault-free accuracy {:.2}%\n", 100.0 * trained.fault_free_accuracy);

    let rows = analyze_neuron_faults(&cfg, &trained, &data.test)?;
    print!("{:<17}", "kind \\ rate");
    for r in &cfg.sweep.neuron_rates {
        print!("{r:>8}");
    }
    println!();
    for kind in &cfg.sweep.neuron_kinds {
        print!("{:<17}", kind.name());
        for &rate in &cfg.sweep.neuron_rates {
            let accs: Vec<f64> = rows
                .iter()
                .filter(|r| r.kind == *kind && r.rate == rate)
                .map(|r| r.accuracy)
                .collect();
            print!("{:>7.1}%", 100.0 * accs.iter().sum::<f64>() / accs.len() as f64);
        }
        println!();
    }
    Ok(())
}
