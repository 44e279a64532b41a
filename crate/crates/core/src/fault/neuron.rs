use crate::error::{Error, Result};
use crate::snn::{lif_step, LifParams, NeuronState};

use super::NeuronFaultTag;

/// One LIF update of a neuron whose operation `tag` is broken.
///
/// * `FaultyIncrease`: incoming spikes never raise `v_mem`; it only leaks.
/// * `FaultyLeak`: no decay, so the unit integrates like an IF neuron.
/// * `FaultyReset`: the first threshold crossing latches the spike generator
///   on; the neuron then spikes every step.
/// * `FaultySpikeGeneration`: dynamics and reset run normally but the output
///   is never asserted.
pub fn faulty_neuron_step(
    state: &mut NeuronState,
    weighted_input: f32,
    params: &LifParams,
    tag: NeuronFaultTag,
) -> Result<bool> {
    match tag {
        NeuronFaultTag::None => lif_step(state, weighted_input, params),
        NeuronFaultTag::FaultyIncrease => lif_step(state, 0.0, params),
        NeuronFaultTag::FaultyLeak => {
            let no_leak = LifParams {
                leak_factor: 1.0,
                ..*params
            };
            lif_step(state, weighted_input, &no_leak)
        }
        NeuronFaultTag::FaultyReset => {
            if state.saturated {
                return Ok(true);
            }
            let v = params.v_rest + params.leak_factor * (state.v_mem - params.v_rest) + weighted_input;
            if !v.is_finite() {
                return Err(Error::NonFinitePotential);
            }
            state.v_mem = v;
            if v >= params.v_th {
                state.saturated = true;
            }
            Ok(state.saturated)
        }
        NeuronFaultTag::FaultySpikeGeneration => {
            lif_step(state, weighted_input, params)?;
            Ok(false)
        }
    }
}
