//! Permanent-fault maps for the synapse crossbar and the neuron column units.
//!
//! Potential fault locations are the `rows * cols * 8` weight memory cells
//! plus the neuron operation units, one per column by default. A map picks
//! exactly `round(rate * total_locations)` distinct locations uniformly at
//! random, then draws a stuck-at polarity per faulty cell and a faulty
//! operation per faulty neuron.

mod corrupt;
mod neuron;

pub use corrupt::{apply_stuck_at, corrupt_weight_matrix};
pub use neuron::faulty_neuron_step;

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const BITS_PER_WEIGHT: u8 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CrossbarGeometry {
    pub rows: usize,
    pub cols: usize,
}

impl CrossbarGeometry {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(format!(
                "crossbar needs rows, cols > 0 (got {rows} x {cols})"
            )));
        }
        Ok(CrossbarGeometry { rows, cols })
    }

    pub fn bits_per_weight(&self) -> u8 {
        BITS_PER_WEIGHT
    }

    pub fn synapses(&self) -> usize {
        self.rows * self.cols
    }

    pub fn cells(&self) -> usize {
        self.synapses() * BITS_PER_WEIGHT as usize
    }
}

/// Stuck-at state of the eight cells of one synapse register. Bit `c` refers
/// to physical cell `c`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct CellFaultMask {
    stuck0: u8,
    stuck1: u8,
}

impl CellFaultMask {
    pub const CLEAN: CellFaultMask = CellFaultMask {
        stuck0: 0,
        stuck1: 0,
    };

    pub fn new(stuck0: u8, stuck1: u8) -> Result<Self> {
        if stuck0 & stuck1 != 0 {
            return Err(Error::invalid(format!(
                "cells {:#010b} cannot be stuck at both 0 and 1",
                stuck0 & stuck1
            )));
        }
        Ok(CellFaultMask { stuck0, stuck1 })
    }

    pub fn stuck0(self) -> u8 {
        self.stuck0
    }

    pub fn stuck1(self) -> u8 {
        self.stuck1
    }

    /// Cells stuck at either value.
    #[inline]
    pub fn faulty(self) -> u8 {
        self.stuck0 | self.stuck1
    }

    pub fn fault_count(self) -> u32 {
        self.faulty().count_ones()
    }

    pub fn is_clean(self) -> bool {
        self.faulty() == 0
    }
}

/// The four LIF operations that can be broken, plus the healthy state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum NeuronFaultTag {
    #[default]
    None = 0,
    FaultyIncrease = 1,
    FaultyLeak = 2,
    FaultyReset = 3,
    FaultySpikeGeneration = 4,
}

impl NeuronFaultTag {
    pub const FAULTY: [NeuronFaultTag; 4] = [
        NeuronFaultTag::FaultyIncrease,
        NeuronFaultTag::FaultyLeak,
        NeuronFaultTag::FaultyReset,
        NeuronFaultTag::FaultySpikeGeneration,
    ];

    pub fn is_faulty(self) -> bool {
        self != NeuronFaultTag::None
    }

    /// Bit of this operation inside an [`OpMask`].
    fn op_bit(self) -> u8 {
        match self {
            NeuronFaultTag::None => 0,
            other => 1 << (other as u8 - 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NeuronFaultTag::None => "none",
            NeuronFaultTag::FaultyIncrease => "increase",
            NeuronFaultTag::FaultyLeak => "leak",
            NeuronFaultTag::FaultyReset => "reset",
            NeuronFaultTag::FaultySpikeGeneration => "spike_generation",
        }
    }
}

impl fmt::Display for NeuronFaultTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for NeuronFaultTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(NeuronFaultTag::None),
            "increase" | "faulty_increase" => Ok(NeuronFaultTag::FaultyIncrease),
            "leak" | "faulty_leak" => Ok(NeuronFaultTag::FaultyLeak),
            "reset" | "faulty_reset" => Ok(NeuronFaultTag::FaultyReset),
            "spike_generation" | "faulty_spike_generation" => {
                Ok(NeuronFaultTag::FaultySpikeGeneration)
            }
            other => Err(Error::invalid(format!("unknown neuron fault kind `{other}`"))),
        }
    }
}

/// Set of broken operations of one neuron unit; bit `k` is
/// `NeuronFaultTag::FAULTY[k]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct OpMask(u8);

impl OpMask {
    pub const NONE: OpMask = OpMask(0);

    pub fn from_bits(bits: u8) -> Result<Self> {
        if bits & !0x0f != 0 {
            return Err(Error::Format(format!("neuron op mask {bits:#04x} out of range")));
        }
        Ok(OpMask(bits))
    }

    pub fn single(tag: NeuronFaultTag) -> Self {
        OpMask(tag.op_bit())
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn count(self) -> u32 {
        self.0.count_ones()
    }

    pub fn contains(self, tag: NeuronFaultTag) -> bool {
        tag.is_faulty() && self.0 & tag.op_bit() != 0
    }

    /// Observable behavior of the unit. With several broken operations, a
    /// neuron that cannot integrate or cannot emit is dormant no matter what
    /// else fails, and a saturating reset outranks a missing leak.
    pub fn effective_tag(self) -> NeuronFaultTag {
        [
            NeuronFaultTag::FaultyIncrease,
            NeuronFaultTag::FaultySpikeGeneration,
            NeuronFaultTag::FaultyReset,
            NeuronFaultTag::FaultyLeak,
        ]
        .into_iter()
        .find(|&t| self.contains(t))
        .unwrap_or(NeuronFaultTag::None)
    }
}

/// How many potential fault locations a neuron unit contributes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum NeuronGranularity {
    /// One location per neuron; the broken operation is drawn on fault.
    #[default]
    PerNeuron = 0,
    /// One location per operation (four per neuron).
    PerOperation = 1,
}

impl NeuronGranularity {
    pub fn locations_per_neuron(self) -> usize {
        match self {
            NeuronGranularity::PerNeuron => 1,
            NeuronGranularity::PerOperation => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FaultMap {
    geometry: CrossbarGeometry,
    granularity: NeuronGranularity,
    fault_rate: f64,
    seed: u64,
    cell_masks: Vec<CellFaultMask>,
    neuron_ops: Vec<OpMask>,
}

impl FaultMap {
    pub fn fault_free(geometry: CrossbarGeometry) -> Self {
        FaultMap {
            geometry,
            granularity: NeuronGranularity::PerNeuron,
            fault_rate: 0.0,
            seed: 0,
            cell_masks: vec![CellFaultMask::CLEAN; geometry.synapses()],
            neuron_ops: vec![OpMask::NONE; geometry.cols],
        }
    }

    pub fn from_parts(
        geometry: CrossbarGeometry,
        granularity: NeuronGranularity,
        fault_rate: f64,
        seed: u64,
        cell_masks: Vec<CellFaultMask>,
        neuron_ops: Vec<OpMask>,
    ) -> Result<Self> {
        if cell_masks.len() != geometry.synapses() {
            return Err(Error::dims("cell masks", geometry.synapses(), cell_masks.len()));
        }
        if neuron_ops.len() != geometry.cols {
            return Err(Error::dims("neuron faults", geometry.cols, neuron_ops.len()));
        }
        if granularity == NeuronGranularity::PerNeuron && neuron_ops.iter().any(|m| m.count() > 1) {
            return Err(Error::invalid(
                "per-neuron granularity allows one faulty operation per neuron",
            ));
        }
        if !(0.0..=1.0).contains(&fault_rate) {
            return Err(Error::invalid(format!("fault rate {fault_rate} outside [0, 1]")));
        }
        Ok(FaultMap {
            geometry,
            granularity,
            fault_rate,
            seed,
            cell_masks,
            neuron_ops,
        })
    }

    pub fn geometry(&self) -> CrossbarGeometry {
        self.geometry
    }

    pub fn granularity(&self) -> NeuronGranularity {
        self.granularity
    }

    pub fn fault_rate(&self) -> f64 {
        self.fault_rate
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn mask(&self, row: usize, col: usize) -> CellFaultMask {
        self.cell_masks[row * self.geometry.cols + col]
    }

    pub fn set_mask(&mut self, row: usize, col: usize, mask: CellFaultMask) {
        self.cell_masks[row * self.geometry.cols + col] = mask;
    }

    pub fn cell_masks(&self) -> &[CellFaultMask] {
        &self.cell_masks
    }

    pub fn neuron_ops(&self) -> &[OpMask] {
        &self.neuron_ops
    }

    pub fn neuron_tag(&self, col: usize) -> NeuronFaultTag {
        self.neuron_ops[col].effective_tag()
    }

    pub fn set_neuron_tag(&mut self, col: usize, tag: NeuronFaultTag) {
        self.neuron_ops[col] = OpMask::single(tag);
    }

    /// Effective fault tag of every column.
    pub fn neuron_tags(&self) -> Vec<NeuronFaultTag> {
        self.neuron_ops.iter().map(|m| m.effective_tag()).collect()
    }

    pub fn total_locations(&self) -> usize {
        total_locations(self.geometry, self.granularity)
    }

    pub fn stuck_bit_count(&self) -> usize {
        self.cell_masks.iter().map(|m| m.fault_count() as usize).sum()
    }

    pub fn faulty_neuron_op_count(&self) -> usize {
        self.neuron_ops.iter().map(|m| m.count() as usize).sum()
    }

    /// Faulty locations of every kind.
    pub fn fault_count(&self) -> usize {
        self.stuck_bit_count() + self.faulty_neuron_op_count()
    }
}

pub fn total_locations(geometry: CrossbarGeometry, granularity: NeuronGranularity) -> usize {
    geometry.cells() + geometry.cols * granularity.locations_per_neuron()
}

/// Number of faulty locations for a rate: `round(rate * total)`.
pub fn faults_for_rate(rate: f64, total: usize) -> usize {
    ((rate * total as f64).round() as usize).min(total)
}

/// Seeded map with exactly `round(rate * total_locations)` faults placed
/// uniformly without replacement.
pub fn generate_fault_map(
    geometry: CrossbarGeometry,
    fault_rate: f64,
    seed: u64,
    granularity: NeuronGranularity,
) -> Result<FaultMap> {
    if !(0.0..=1.0).contains(&fault_rate) {
        return Err(Error::invalid(format!(
            "fault rate must be in [0, 1], got {fault_rate}"
        )));
    }
    let total = total_locations(geometry, granularity);
    let n_faults = faults_for_rate(fault_rate, total);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut locations = index::sample(&mut rng, total, n_faults).into_vec();
    locations.sort_unstable();

    let cells = geometry.cells();
    let mut stuck0 = vec![0u8; geometry.synapses()];
    let mut stuck1 = vec![0u8; geometry.synapses()];
    let mut ops = vec![0u8; geometry.cols];
    for loc in locations {
        if loc < cells {
            let (synapse, cell) = (loc / 8, loc % 8);
            if rng.gen_bool(0.5) {
                stuck1[synapse] |= 1 << cell;
            } else {
                stuck0[synapse] |= 1 << cell;
            }
        } else {
            let unit = loc - cells;
            match granularity {
                NeuronGranularity::PerNeuron => {
                    let tag = NeuronFaultTag::FAULTY[rng.gen_range(0..4)];
                    ops[unit] = OpMask::single(tag).bits();
                }
                NeuronGranularity::PerOperation => {
                    ops[unit / 4] |= 1 << (unit % 4);
                }
            }
        }
    }
    let cell_masks = stuck0
        .into_iter()
        .zip(stuck1)
        .map(|(s0, s1)| CellFaultMask { stuck0: s0, stuck1: s1 })
        .collect();
    let neuron_ops = ops.into_iter().map(OpMask).collect();
    FaultMap::from_parts(geometry, granularity, fault_rate, seed, cell_masks, neuron_ops)
}

/// Map with fault-free synapses where `round(rate * cols)` uniformly chosen
/// columns carry the single neuron fault `kind`.
pub fn generate_neuron_fault_map(
    geometry: CrossbarGeometry,
    kind: NeuronFaultTag,
    rate: f64,
    seed: u64,
) -> Result<FaultMap> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::invalid(format!("fault rate must be in [0, 1], got {rate}")));
    }
    if !kind.is_faulty() {
        return Err(Error::invalid("neuron fault kind must not be `none`"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = faults_for_rate(rate, geometry.cols);
    let mut map = FaultMap::fault_free(geometry);
    map.fault_rate = rate;
    map.seed = seed;
    for col in index::sample(&mut rng, geometry.cols, n) {
        map.set_neuron_tag(col, kind);
    }
    Ok(map)
}
