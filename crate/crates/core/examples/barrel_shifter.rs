//! Shuffled storage and the barrel-shifter read path.
//!
//! A weight is written rotated so its high-order bits avoid stuck cells, and
//! the column's shifter rotates it back on every read.
//!
//! `cargo run --example barrel_shifter`

use snn_fam::fam::{build_plan, shuffle_word, unshuffle_word, EnhancementControlUnit, Rotation, Strategy};
use snn_fam::fault::{apply_stuck_at, generate_fault_map, CrossbarGeometry, NeuronGranularity};
use snn_fam::snn::WeightCode;

fn main() -> snn_fam::Result<()> {
    for r in 0..8 {
        let r = Rotation::new(r)?;
        assert!((0..=255u8).all(|w| unshuffle_word(shuffle_word(w, r), r) == w));
    }
    println!("unshuffle(shuffle(w, r), r) == w for all 2048 (w, r) pairs");

    let geometry = CrossbarGeometry::new(8, 4)?;
    let map = generate_fault_map(geometry, 0.2, 11, NeuronGranularity::PerNeuron)?;
    let plan = build_plan(Strategy::Fam2, &map, 8, 2)?;
    let col = plan.assignment()[0].col;
    let weights: Vec<u8> = vec![200, 17, 255, 0, 96, 130, 64, 7];

    // what the cells hold after writing, with stuck bits forced
    let stored: Vec<u8> = weights
        .iter()
        .enumerate()
        .map(|(row, &w)| {
            let r = plan.rotation(row, col);
            let mask = map.mask(row, col);
            shuffle_word(apply_stuck_at(WeightCode(w), mask, r).0, r)
        })
        .collect();

    let mut ecu = EnhancementControlUnit::from_plan(&plan);
    let read = ecu.read_column(col, &stored)?;
    println!("\ncolumn {col}, {} bits of shuffle registers", ecu.register_bits());
    println!("row  rot  stuck0   stuck1   written  stored    read  plain");
    for row in 0..weights.len() {
        let m = map.mask(row, col);
        let plain = apply_stuck_at(WeightCode(weights[row]), m, Rotation::IDENTITY).0;
        println!(
            "{row:>3}  {}    {:08b} {:08b} {:>7}  {:08b} {:>5}  {:>5}",
            plan.rotation(row, col).get(),
            m.stuck0(),
            m.stuck1(),
            weights[row],
            stored[row],
            read[row],
            plain
        );
    }
    Ok(())
}
