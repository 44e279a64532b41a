//! Discrete-time simulation of a single-layer fully-connected spiking network.
//!
//! Inputs are rate coded into Bernoulli spike trains, every output neuron is a
//! leaky integrate-and-fire unit, and competition between neurons comes from a
//! subtractive lateral inhibition. Synapses learn with pair-based,
//! weight-dependent STDP and are stored as 8-bit fixed-point codes.

mod encode;
mod lif;
mod network;
mod params;
mod readout;
mod stdp;
mod train;

pub use encode::{encode_rate, RateEncoder, SpikeGrid};
pub use lif::{lif_step, NeuronState};
pub use network::{run_inference, SnnModel, Simulator, SpikeRaster};
pub use params::{LifParams, StdpParams};
pub use readout::{
    accuracy, assign_labels, classify, evaluate, labels_from_responses, Evaluation, N_CLASSES,
};
pub use stdp::{stdp_update, SpikeEvent};
pub use train::{train_stdp, Homeostasis, TrainOptions};


use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Unsigned 8-bit fixed-point synaptic weight; the real value is `code / 255`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeightCode(pub u8);

impl WeightCode {
    pub const ZERO: WeightCode = WeightCode(0);
    pub const MAX: WeightCode = WeightCode(u8::MAX);

    #[inline]
    pub fn value(self) -> f32 {
        self.0 as f32 / 255.0
    }

    /// Nearest code for a real weight; values outside `[0, 1]` saturate.
    pub fn from_value(value: f32) -> Self {
        let v = if value.is_nan() { 0.0 } else { value.clamp(0.0, 1.0) };
        WeightCode((v * 255.0).round() as u8)
    }
}

impl From<u8> for WeightCode {
    fn from(code: u8) -> Self {
        WeightCode(code)
    }
}

/// Independent random stream for sample `index` under a run seed.
///
/// Streams do not depend on evaluation order, so results are identical
/// regardless of how samples are spread over worker threads.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_code_bounds() {
        assert_eq!(WeightCode::MAX.value(), 1.0);
        assert_eq!(WeightCode::ZERO.value(), 0.0);
        assert_eq!(WeightCode::from_value(2.0), WeightCode::MAX);
        assert_eq!(WeightCode::from_value(-1.0), WeightCode::ZERO);
        assert_eq!(WeightCode::from_value(f32::NAN), WeightCode::ZERO);
        for code in 0..=255u8 {
            assert_eq!(WeightCode::from_value(WeightCode(code).value()).0, code);
        }
    }
}
