use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fault::{CrossbarGeometry, FaultMap, NeuronFaultTag};
use crate::io::Fingerprint;

use super::rotation::{compute_rotation, Rotation};

/// Stuck bits per 8-bit weight that the bit-shuffling analysis treats as
/// tolerable.
pub const MAX_FAULTY_BITS: u32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[repr(u8)]
pub enum Strategy {
    /// Map onto every column, faulty or not.
    Baseline = 0,
    /// Skip columns with any faulty neuron.
    Fam1 = 1,
    /// FAM1 exclusions plus per-synapse bit shuffling.
    Fam2 = 2,
    /// Skip only saturating (faulty reset) columns, with bit shuffling.
    Fam3 = 3,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::Baseline, Strategy::Fam1, Strategy::Fam2, Strategy::Fam3];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Baseline => "baseline",
            Strategy::Fam1 => "fam1",
            Strategy::Fam2 => "fam2",
            Strategy::Fam3 => "fam3",
        }
    }

    /// Whether the strategy stores shuffled words and needs the barrel
    /// shifters at run time.
    pub fn uses_shuffling(self) -> bool {
        matches!(self, Strategy::Fam2 | Strategy::Fam3)
    }

    pub fn excludes(self, tag: NeuronFaultTag) -> bool {
        match self {
            Strategy::Baseline => false,
            Strategy::Fam1 | Strategy::Fam2 => tag.is_faulty(),
            Strategy::Fam3 => tag == NeuronFaultTag::FaultyReset,
        }
    }

    pub(crate) fn from_u8(v: u8) -> Result<Self> {
        Strategy::ALL
            .get(v as usize)
            .copied()
            .ok_or_else(|| Error::Format(format!("unknown strategy code {v}")))
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "baseline" => Ok(Strategy::Baseline),
            "fam1" => Ok(Strategy::Fam1),
            "fam2" => Ok(Strategy::Fam2),
            "fam3" => Ok(Strategy::Fam3),
            other => Err(Error::invalid(format!("unknown strategy `{other}`"))),
        }
    }
}

/// Where a logical neuron runs: the column-pass index and physical column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Placement {
    pub pass: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MappingPlan {
    strategy: Strategy,
    geometry: CrossbarGeometry,
    n_inputs: usize,
    n_neurons: usize,
    excluded: Vec<usize>,
    assignment: Vec<Placement>,
    rotations: Vec<Rotation>,
    fault_map: Fingerprint,
}

impl MappingPlan {
    /// Reassembles a plan and checks its structural invariants.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        strategy: Strategy,
        geometry: CrossbarGeometry,
        n_inputs: usize,
        n_neurons: usize,
        excluded: Vec<usize>,
        assignment: Vec<Placement>,
        rotations: Vec<Rotation>,
        fault_map: Fingerprint,
    ) -> Result<Self> {
        if assignment.len() != n_neurons {
            return Err(Error::dims("plan assignment", n_neurons, assignment.len()));
        }
        if rotations.len() != geometry.synapses() {
            return Err(Error::dims("plan rotations", geometry.synapses(), rotations.len()));
        }
        let mut is_excluded = vec![false; geometry.cols];
        for &c in &excluded {
            if c >= geometry.cols {
                return Err(Error::Format(format!("excluded column {c} outside crossbar")));
            }
            is_excluded[c] = true;
        }
        if excluded.len() >= geometry.cols {
            return Err(Error::Unmappable { cols: geometry.cols });
        }
        let mut seen = std::collections::HashSet::new();
        for p in &assignment {
            if p.col >= geometry.cols || is_excluded[p.col] {
                return Err(Error::Format(format!("neuron mapped onto unusable column {}", p.col)));
            }
            if !seen.insert((p.pass, p.col)) {
                return Err(Error::Format(format!(
                    "column {} used twice in pass {}",
                    p.col, p.pass
                )));
            }
        }
        if !strategy.uses_shuffling() && rotations.iter().any(|r| !r.is_identity()) {
            return Err(Error::Format(format!("{strategy} plans cannot rotate weights")));
        }
        Ok(MappingPlan {
            strategy,
            geometry,
            n_inputs,
            n_neurons,
            excluded,
            assignment,
            rotations,
            fault_map,
        })
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn geometry(&self) -> CrossbarGeometry {
        self.geometry
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_neurons(&self) -> usize {
        self.n_neurons
    }

    /// Excluded physical columns, ascending.
    pub fn excluded(&self) -> &[usize] {
        &self.excluded
    }

    pub fn assignment(&self) -> &[Placement] {
        &self.assignment
    }

    pub fn rotations(&self) -> &[Rotation] {
        &self.rotations
    }

    #[inline]
    pub fn rotation(&self, row: usize, col: usize) -> Rotation {
        self.rotations[row * self.geometry.cols + col]
    }

    pub fn fault_map_fingerprint(&self) -> &Fingerprint {
        &self.fault_map
    }

    pub fn usable_cols(&self) -> usize {
        self.geometry.cols - self.excluded.len()
    }

    pub fn column_passes(&self) -> usize {
        self.n_neurons.div_ceil(self.usable_cols())
    }

    pub fn row_passes(&self) -> usize {
        self.n_inputs.div_ceil(self.geometry.rows)
    }

    /// Crossbar passes needed per timestep.
    pub fn passes(&self) -> usize {
        self.column_passes() * self.row_passes()
    }

    pub fn utilization(&self) -> f64 {
        self.usable_cols() as f64 / self.geometry.cols as f64
    }

    /// Fault tag each logical neuron inherits from its physical column.
    pub fn neuron_overlay(&self, fault_map: &FaultMap) -> Result<Vec<NeuronFaultTag>> {
        self.check_against(fault_map)?;
        Ok(self
            .assignment
            .iter()
            .map(|p| fault_map.neuron_tag(p.col))
            .collect())
    }

    /// Rejects a fault map other than the one this plan was built for.
    pub fn check_against(&self, fault_map: &FaultMap) -> Result<()> {
        let actual = fault_map.fingerprint();
        if actual != self.fault_map {
            return Err(Error::StaleArtifact {
                expected: self.fault_map.to_string(),
                actual: actual.to_string(),
            });
        }
        Ok(())
    }
}

/// Maps `n_neurons` logical neurons with `n_inputs` inputs each onto the chip
/// described by `fault_map`.
///
/// Usable columns are filled in ascending order; neurons beyond the usable
/// column count spill into further column passes. Shuffling strategies get
/// the minimum-corruption rotation for every synapse they occupy.
pub fn build_plan(
    strategy: Strategy,
    fault_map: &FaultMap,
    n_inputs: usize,
    n_neurons: usize,
) -> Result<MappingPlan> {
    if n_inputs == 0 || n_neurons == 0 {
        return Err(Error::invalid("network dimensions must be positive"));
    }
    let geometry = fault_map.geometry();
    let excluded: Vec<usize> = (0..geometry.cols)
        .filter(|&c| strategy.excludes(fault_map.neuron_tag(c)))
        .collect();
    let usable: Vec<usize> = (0..geometry.cols)
        .filter(|&c| !strategy.excludes(fault_map.neuron_tag(c)))
        .collect();
    if usable.is_empty() {
        return Err(Error::Unmappable { cols: geometry.cols });
    }
    let assignment: Vec<Placement> = (0..n_neurons)
        .map(|k| Placement {
            pass: k / usable.len(),
            col: usable[k % usable.len()],
        })
        .collect();

    let mut rotations = vec![Rotation::IDENTITY; geometry.synapses()];
    if strategy.uses_shuffling() {
        let used_cols = &usable[..usable.len().min(n_neurons)];
        for row in 0..geometry.rows.min(n_inputs) {
            for &col in used_cols {
                rotations[row * geometry.cols + col] = compute_rotation(fault_map.mask(row, col));
            }
        }
    }
    MappingPlan::from_parts(
        strategy,
        geometry,
        n_inputs,
        n_neurons,
        excluded,
        assignment,
        rotations,
        fault_map.fingerprint(),
    )
}

/// Synapses holding more than [`MAX_FAULTY_BITS`] stuck bits, as
/// `(row, col, stuck_bits)`.
pub fn synapses_exceeding_budget(fault_map: &FaultMap) -> Vec<(usize, usize, u32)> {
    let cols = fault_map.geometry().cols;
    fault_map
        .cell_masks()
        .iter()
        .enumerate()
        .filter(|(_, m)| m.fault_count() > MAX_FAULTY_BITS)
        .map(|(k, m)| (k / cols, k % cols, m.fault_count()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fault::{generate_fault_map, CellFaultMask, NeuronGranularity};

    fn geom(r: usize, c: usize) -> CrossbarGeometry {
        CrossbarGeometry::new(r, c).unwrap()
    }

    fn same_layout(a: &MappingPlan, b: &MappingPlan) -> bool {
        a.excluded() == b.excluded()
            && a.assignment() == b.assignment()
            && a.rotations() == b.rotations()
            && a.passes() == b.passes()
    }

    #[test]
    fn fault_free_plans_match_baseline() {
        let map = FaultMap::fault_free(geom(8, 16));
        let base = build_plan(Strategy::Baseline, &map, 20, 40).unwrap();
        assert_eq!(base.passes(), 3 * 3);
        for s in Strategy::ALL {
            assert!(same_layout(&build_plan(s, &map, 20, 40).unwrap(), &base));
        }
    }

    #[test]
    fn leak_fault_excluded_by_fam1_fam2_only() {
        let mut map = FaultMap::fault_free(geom(4, 8));
        map.set_neuron_tag(5, NeuronFaultTag::FaultyLeak);
        for s in [Strategy::Fam1, Strategy::Fam2] {
            assert_eq!(build_plan(s, &map, 4, 8).unwrap().excluded(), &[5]);
        }
        assert!(build_plan(Strategy::Fam3, &map, 4, 8).unwrap().excluded().is_empty());
        assert!(build_plan(Strategy::Baseline, &map, 4, 8).unwrap().excluded().is_empty());
    }

    #[test]
    fn pass_arithmetic() {
        // 400 neurons on 256 columns with 10 excluded: ceil(400 / 246) = 2
        let mut map = FaultMap::fault_free(geom(256, 256));
        for c in 0..10 {
            map.set_neuron_tag(c * 7, NeuronFaultTag::FaultyIncrease);
        }
        let plan = build_plan(Strategy::Fam1, &map, 256, 400).unwrap();
        assert_eq!(plan.usable_cols(), 246);
        assert_eq!(plan.column_passes(), 2);
        assert_eq!(plan.passes(), 2);
        let plan = build_plan(Strategy::Fam1, &map, 784, 400).unwrap();
        assert_eq!(plan.passes(), 2 * 4);
    }

    #[test]
    fn assignment_is_ascending_and_injective_per_pass() {
        let g = geom(8, 10);
        let map = generate_fault_map(g, 0.3, 12, NeuronGranularity::PerNeuron).unwrap();
        let plan = build_plan(Strategy::Fam1, &map, 8, 25).unwrap();
        for pass in 0..plan.column_passes() {
            let cols: Vec<usize> = plan
                .assignment()
                .iter()
                .filter(|p| p.pass == pass)
                .map(|p| p.col)
                .collect();
            assert!(cols.windows(2).all(|w| w[0] < w[1]));
            assert!(cols.iter().all(|c| !plan.excluded().contains(c)));
        }
    }

    #[test]
    fn all_columns_excluded_is_unmappable() {
        let g = geom(2, 3);
        let mut map = FaultMap::fault_free(g);
        for c in 0..3 {
            map.set_neuron_tag(c, NeuronFaultTag::FaultyReset);
        }
        for s in [Strategy::Fam1, Strategy::Fam2, Strategy::Fam3] {
            assert!(matches!(build_plan(s, &map, 2, 2), Err(Error::Unmappable { cols: 3 })));
        }
        assert!(build_plan(Strategy::Baseline, &map, 2, 2).is_ok());
    }

    #[test]
    fn rotations_only_for_shuffling_strategies() {
        let g = geom(16, 16);
        let map = generate_fault_map(g, 0.2, 3, NeuronGranularity::PerNeuron).unwrap();
        for s in [Strategy::Baseline, Strategy::Fam1] {
            let plan = build_plan(s, &map, 16, 16).unwrap();
            assert!(plan.rotations().iter().all(|r| r.is_identity()));
        }
        let plan = build_plan(Strategy::Fam2, &map, 16, 16).unwrap();
        assert!(plan.rotations().iter().any(|r| !r.is_identity()));
        for p in plan.assignment() {
            for row in 0..16 {
                assert_eq!(plan.rotation(row, p.col), compute_rotation(map.mask(row, p.col)));
            }
        }
    }

    #[test]
    fn plan_is_deterministic() {
        let map = generate_fault_map(geom(32, 32), 0.25, 8, NeuronGranularity::PerNeuron).unwrap();
        for s in Strategy::ALL {
            assert_eq!(build_plan(s, &map, 40, 50).unwrap(), build_plan(s, &map, 40, 50).unwrap());
        }
    }

    #[test]
    fn budget_report() {
        let g = geom(3, 3);
        let mut map = FaultMap::fault_free(g);
        assert!(synapses_exceeding_budget(&map).is_empty());
        map.set_mask(1, 2, CellFaultMask::new(0b001, 0b110).unwrap());
        map.set_mask(0, 0, CellFaultMask::new(0b001, 0b010).unwrap());
        assert_eq!(synapses_exceeding_budget(&map), vec![(1, 2, 3)]);
        let full = generate_fault_map(g, 1.0, 0, NeuronGranularity::PerNeuron).unwrap();
        let listed = synapses_exceeding_budget(&full);
        assert_eq!(listed.len(), 9);
        assert!(listed.iter().all(|&(_, _, n)| n == 8));
    }

    #[test]
    fn strategy_names() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
            assert_eq!(Strategy::from_u8(s as u8).unwrap(), s);
        }
        assert!("fam4".parse::<Strategy>().is_err());
    }
}
