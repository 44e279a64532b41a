use crate::error::{Error, Result};
use crate::fault::CrossbarGeometry;

use super::plan::MappingPlan;
use super::rotation::Rotation;

/// Word written into a synapse register: bit `j` goes to cell `(j + r) mod 8`.
#[inline]
pub fn shuffle_word(code: u8, r: Rotation) -> u8 {
    code.rotate_left(r.get() as u32)
}

/// Barrel-shifter read path; inverse of [`shuffle_word`].
#[inline]
pub fn unshuffle_word(stored: u8, r: Rotation) -> u8 {
    stored.rotate_right(r.get() as u32)
}

/// Behavioral model of the enhancement control unit and the per-column
/// barrel shifters it drives.
///
/// The ECU keeps one 3-bit `shuffle` register per synapse and one `sel`
/// pointer per column. Synapses of a column share that column's shifter and
/// take turns on it as `sel` walks down the rows.
#[derive(Clone, Debug)]
pub struct EnhancementControlUnit {
    geometry: CrossbarGeometry,
    shuffle: Vec<Rotation>,
    sel: Vec<usize>,
}

impl EnhancementControlUnit {
    pub fn from_plan(plan: &MappingPlan) -> Self {
        EnhancementControlUnit {
            geometry: plan.geometry(),
            shuffle: plan.rotations().to_vec(),
            sel: vec![0; plan.geometry().cols],
        }
    }

    /// Shift-register storage in bits.
    pub fn register_bits(&self) -> usize {
        self.geometry.synapses() * 3
    }

    pub fn select(&mut self, col: usize, row: usize) -> Result<()> {
        if row >= self.geometry.rows || col >= self.geometry.cols {
            return Err(Error::invalid(format!("synapse ({row}, {col}) outside crossbar")));
        }
        self.sel[col] = row;
        Ok(())
    }

    pub fn selected(&self, col: usize) -> usize {
        self.sel[col]
    }

    /// Restores the word read from the currently selected synapse of `col`.
    pub fn restore(&self, col: usize, stored: u8) -> u8 {
        let row = self.sel[col];
        unshuffle_word(stored, self.shuffle[row * self.geometry.cols + col])
    }

    /// Streams one column through its shifter, top row first.
    pub fn read_column(&mut self, col: usize, stored: &[u8]) -> Result<Vec<u8>> {
        if stored.len() != self.geometry.rows {
            return Err(Error::dims("column words", self.geometry.rows, stored.len()));
        }
        let mut out = Vec::with_capacity(stored.len());
        for (row, &word) in stored.iter().enumerate() {
            self.select(col, row)?;
            out.push(self.restore(col, word));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fam::{build_plan, Strategy};
    use crate::fault::{generate_fault_map, NeuronGranularity};

    #[test]
    fn shuffle_examples() {
        for w in 0..=255u8 {
            assert_eq!(shuffle_word(w, Rotation::IDENTITY), w);
            assert_eq!(unshuffle_word(w, Rotation::IDENTITY), w);
        }
        assert_eq!(shuffle_word(0b0000_0001, Rotation::new(1).unwrap()), 0b0000_0010);
    }

    #[test]
    fn roundtrip_all_pairs() {
        for w in 0..=255u8 {
            for r in 0..8 {
                let r = Rotation::new(r).unwrap();
                assert_eq!(unshuffle_word(shuffle_word(w, r), r), w);
            }
        }
    }

    #[test]
    fn ecu_restores_clean_columns() {
        let g = CrossbarGeometry::new(16, 8).unwrap();
        let map = generate_fault_map(g, 0.2, 4, NeuronGranularity::PerNeuron).unwrap();
        let plan = build_plan(Strategy::Fam3, &map, 16, 4).unwrap();
        let mut ecu = EnhancementControlUnit::from_plan(&plan);
        assert_eq!(ecu.register_bits(), 16 * 8 * 3);
        let col = plan.assignment()[0].col;
        let weights: Vec<u8> = (0..16).map(|k| (k * 37) as u8).collect();
        let stored: Vec<u8> = weights
            .iter()
            .enumerate()
            .map(|(row, &w)| shuffle_word(w, plan.rotation(row, col)))
            .collect();
        assert_eq!(ecu.read_column(col, &stored).unwrap(), weights);
        assert_eq!(ecu.selected(col), 15);
        assert!(ecu.select(col, 16).is_err());
    }
}
