//! Seeded fault maps: exact fault counts, disjoint stuck-at masks, and the
//! artifact roundtrip.
//!
//! `cargo run --example fault_injection`

use snn_fam::fault::{faults_for_rate, generate_fault_map, total_locations, CrossbarGeometry, NeuronGranularity, NeuronFaultTag};
use snn_fam::io::{decode_fault_map, dump_fault_map, encode_fault_map};

fn main() -> snn_fam::Result<()> {
    println!("geometry   rate   locations   faults  stuck bits  neuron ops");
    for (rows, cols) in [(4, 4), (64, 64), (256, 256)] {
        let g = CrossbarGeometry::new(rows, cols)?;
        let total = total_locations(g, NeuronGranularity::PerNeuron);
        for rate in [0.0, 0.1, 0.25, 0.5, 1.0] {
            let map = generate_fault_map(g, rate, 7, NeuronGranularity::PerNeuron)?;
            assert_eq!(map.fault_count(), faults_for_rate(rate, total));
            assert!(map.cell_masks().iter().all(|m| m.stuck0() & m.stuck1() == 0));
            println!(
                "{:>3}x{:<5} {:<5} {:>10} {:>8} {:>11} {:>11}",
                rows,
                cols,
                rate,
                total,
                map.fault_count(),
                map.stuck_bit_count(),
                map.faulty_neuron_op_count()
            );
        }
    }

    let g = CrossbarGeometry::new(4, 4)?;
    let map = generate_fault_map(g, 0.1, 3, NeuronGranularity::PerNeuron)?;
    let bytes = encode_fault_map(&map);
    assert_eq!(decode_fault_map(&bytes)?, map);
    println!("\n{} byte artifact, fingerprint {}", bytes.len(), map.fingerprint().short());
    print!("{}", dump_fault_map(&map));

    let tags = map.neuron_tags();
    for kind in NeuronFaultTag::FAULTY {
        println!("{kind:>16}: {} columns", tags.iter().filter(|&&t| t == kind).count());
    }
    Ok(())
}
