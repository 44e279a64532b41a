//! The four mapping strategies on one faulty chip: which columns each
//! excludes, how many passes it needs and how much weight significance the
//! rotations recover.
//!
//! `cargo run --example mapping_plans -- [rate] [seed]`

use snn_fam::fam::{build_plan, synapses_exceeding_budget, Strategy, MAX_FAULTY_BITS};
use snn_fam::fault::{corrupt_weight_matrix, generate_fault_map, CrossbarGeometry, NeuronGranularity};
use snn_fam::snn::WeightCode;

fn main() -> snn_fam::Result<()> {
    let mut args = std::env::args().skip(1);
    let rate: f64 = args.next().map_or(0.1, |a| a.parse().expect("rate"));
    let seed: u64 = args.next().map_or(1, |a| a.parse().expect("seed"));
    let (n_inputs, n_neurons) = (784, 240);

    let geometry = CrossbarGeometry::new(256, 256)?;
    let map = generate_fault_map(geometry, rate, seed, NeuronGranularity::PerNeuron)?;
    let heavy = synapses_exceeding_budget(&map).len();
    println!(
        "rate {rate}, seed {seed}: {} stuck bits, {} faulty neurons, {heavy} synapses over {MAX_FAULTY_BITS} stuck bits",
        map.stuck_bit_count(),
        map.faulty_neuron_op_count()
    );

    // a mid-range weight everywhere makes the corruption easy to compare
    let weights = vec![WeightCode(100); n_inputs * n_neurons];
    println!("\nstrategy  excluded  usable  passes  utilization  mean |dw|");
    for strategy in Strategy::ALL {
        let plan = build_plan(strategy, &map, n_inputs, n_neurons)?;
        let read = corrupt_weight_matrix(&weights, n_inputs, &map, &plan)?;
        let err: f64 = read
            .iter()
            .map(|w| (w.value() - WeightCode(100).value()).abs() as f64)
            .sum::<f64>()
            / read.len() as f64;
        println!(
            "{:<9} {:>8} {:>7} {:>7} {:>12.4} {:>10.5}",
            strategy,
            plan.excluded().len(),
            plan.usable_cols(),
            plan.passes(),
            plan.utilization(),
            err
        );
    }
    Ok(())
}
