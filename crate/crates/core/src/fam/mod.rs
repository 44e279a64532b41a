//! Fault-aware mapping.
//!
//! Three mechanisms are combined into the FAM strategies:
//!
//! * column exclusion driven by the neuron fault tags,
//! * a per-synapse circular shift that moves the most significant weight
//!   bits away from stuck cells,
//! * a per-column barrel shifter (HEB) driven by per-synapse shift registers
//!   (ECU) that restores the original bit order on read.
//!
//! Placement convention everywhere: with rotation `r`, weight bit `j` is
//! stored in cell `(j + r) mod 8`.

mod heb;
mod plan;
mod rotation;

pub use heb::{shuffle_word, unshuffle_word, EnhancementControlUnit};
pub use plan::{build_plan, synapses_exceeding_budget, MappingPlan, Placement, Strategy, MAX_FAULTY_BITS};
pub use rotation::{compute_rotation, corruption_cost, longest_clean_run, CleanRun, Rotation};
