//! Permanent-fault simulation and fault-aware mapping for spiking neural
//! network crossbar accelerators.
//!
//! The crate is organized bottom-up:
//!
//! * [`snn`]: single-layer fully-connected LIF network with rate coding,
//!   lateral inhibition and weight-dependent STDP.
//! * [`fault`]: seeded stuck-at and faulty-neuron-operation maps and the
//!   exact corruption semantics for both.
//! * [`fam`]: fault-aware mapping plans (baseline, FAM1, FAM2, FAM3), the
//!   circular-shift rotation search and a behavioral barrel shifter model.
//! * [`cost`]: latency, throughput, energy and area estimates per plan.
//! * [`io`]: IDX dataset ingestion and the versioned artifact formats.
//! * [`harness`]: config-driven train / inject / map / eval / sweep pipelines.

pub mod cost;
pub mod error;
pub mod fam;
pub mod fault;
pub mod harness;
pub mod io;
pub mod snn;

pub use error::{Error, Result};
