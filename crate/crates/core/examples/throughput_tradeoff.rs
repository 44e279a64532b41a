//! Throughput and energy of each strategy relative to the unmitigated
//! baseline, over an ensemble of random chips.
//!
//! `cargo run --example throughput_tradeoff -- [n_neurons]`

use snn_fam::cost::{compare_strategies, HwConstants};
use snn_fam::fam::Strategy;
use snn_fam::fault::{generate_fault_map, CrossbarGeometry, NeuronGranularity};

fn main() -> snn_fam::Result<()> {
    let n_neurons: usize = std::env::args().nth(1).map_or(1600, |a| a.parse().expect("n_neurons"));
    let hw = HwConstants::default();
    let geometry = CrossbarGeometry::new(256, 256)?;
    let seeds = 1..=20u64;
    println!("N{n_neurons} on 256x256, {} seeds per rate", seeds.clone().count());
    println!("area overhead of the enhanced engine: {:.1}%", 100.0 * hw.area_overhead());
    println!("\nrate   strategy  throughput loss (mean, min..max)  energy ratio");
    for rate in [0.01, 0.1, 0.25, 0.5] {
        let mut loss = vec![Vec::new(); 4];
        let mut energy = [0.0; 4];
        for seed in seeds.clone() {
            let map = generate_fault_map(geometry, rate, seed, NeuronGranularity::PerNeuron)?;
            let reports = compare_strategies(&map, 784, n_neurons, &hw, 100)?;
            let base = &reports[0];
            for (k, r) in reports.iter().enumerate() {
                loss[k].push(1.0 - r.throughput / base.throughput);
                energy[k] += r.energy_per_sample / base.energy_per_sample / 20.0;
            }
        }
        for (k, s) in Strategy::ALL.iter().enumerate() {
            let l = &loss[k];
            let mean = l.iter().sum::<f64>() / l.len() as f64;
            let (lo, hi) = l.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
            println!(
                "{rate:<6} {s:<9} {:>6.1}% ({:>5.1}%..{:>5.1}%)          {:.3}",
                100.0 * mean,
                100.0 * lo,
                100.0 * hi,
                energy[k]
            );
        }
    }
    Ok(())
}
