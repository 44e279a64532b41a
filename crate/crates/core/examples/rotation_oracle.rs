//! Minimum-corruption rotation search checked against brute force.
//!
//! Every 8-bit stuck-cell pattern is tried under all eight rotations; the
//! search must land on the exhaustive minimum.
//!
//! `cargo run --example rotation_oracle`

use snn_fam::fam::{compute_rotation, corruption_cost, longest_clean_run, Rotation};
use snn_fam::fault::CellFaultMask;

fn main() -> snn_fam::Result<()> {
    let mut rotated = 0;
    let mut saved = 0u32;
    for faulty in 0..=255u8 {
        // stuck-at polarity does not matter for the search
        let mask = CellFaultMask::new(faulty, 0)?;
        let brute = (0..8)
            .map(|r| corruption_cost(mask, Rotation::new(r).unwrap()))
            .min()
            .unwrap();
        let r = compute_rotation(mask);
        assert_eq!(corruption_cost(mask, r), brute, "pattern {faulty:08b}");
        if !r.is_identity() {
            rotated += 1;
        }
        saved += corruption_cost(mask, Rotation::IDENTITY) - brute;
    }
    println!("all 256 stuck-cell patterns match the exhaustive minimum");
    println!("{rotated} patterns need a non-zero rotation; total significance saved {saved}");

    println!("\n stuck    rot  cost(r=0)  cost(best)  clean run");
    for faulty in [0b1000_0000u8, 0b1100_0000, 0b1000_0001, 0b0101_0000, 0b1110_0111] {
        let mask = CellFaultMask::new(0, faulty)?;
        let r = compute_rotation(mask);
        let run = longest_clean_run(mask);
        println!(
            "{faulty:08b}  {}    {:>9}  {:>10}  start {} len {}",
            r.get(),
            corruption_cost(mask, Rotation::IDENTITY),
            corruption_cost(mask, r),
            run.start,
            run.len
        );
    }
    Ok(())
}
