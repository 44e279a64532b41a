use crate::error::{Error, Result};
use crate::fam::{shuffle_word, unshuffle_word, MappingPlan, Rotation};
use crate::snn::WeightCode;

use super::{CellFaultMask, FaultMap};

/// Stores `code` in a faulty register under the placement `rotation` and
/// reads it back. Bit `j` lives in cell `(j + r) mod 8`; stuck cells override
/// whatever bit was written there.
#[inline]
pub fn apply_stuck_at(code: WeightCode, mask: CellFaultMask, rotation: Rotation) -> WeightCode {
    let stored = shuffle_word(code.0, rotation);
    let forced = (stored & !mask.stuck0()) | mask.stuck1();
    WeightCode(unshuffle_word(forced, rotation))
}

/// Effective weight matrix seen by the neurons when `weights`
/// (`n_inputs x n_neurons`, row-major) are deployed with `plan` on the chip
/// described by `fault_map`.
///
/// Logical synapse `(i, n)` sits in physical row `i mod rows` of the column
/// assigned to neuron `n`, read through that synapse's rotation.
pub fn corrupt_weight_matrix(
    weights: &[WeightCode],
    n_inputs: usize,
    fault_map: &FaultMap,
    plan: &MappingPlan,
) -> Result<Vec<WeightCode>> {
    plan.check_against(fault_map)?;
    let n_neurons = plan.n_neurons();
    if plan.n_inputs() != n_inputs {
        return Err(Error::dims("plan inputs", n_inputs, plan.n_inputs()));
    }
    if weights.len() != n_inputs * n_neurons {
        return Err(Error::dims("weight matrix", n_inputs * n_neurons, weights.len()));
    }
    let rows = fault_map.geometry().rows;
    let cols: Vec<usize> = plan.assignment().iter().map(|a| a.col).collect();
    let mut out = Vec::with_capacity(weights.len());
    for (i, row) in weights.chunks_exact(n_neurons).enumerate() {
        let phys_row = i % rows;
        for (&w, &col) in row.iter().zip(&cols) {
            let mask = fault_map.mask(phys_row, col);
            out.push(if mask.is_clean() {
                w
            } else {
                apply_stuck_at(w, mask, plan.rotation(phys_row, col))
            });
        }
    }
    Ok(out)
}
