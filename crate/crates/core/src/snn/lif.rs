use crate::error::{Error, Result};
use crate::fault::{faulty_neuron_step, NeuronFaultTag};

use super::params::LifParams;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NeuronState {
    pub v_mem: f32,
    pub refractory_left: u32,
    pub trace_post: f32,
    /// Latched once a neuron with a broken reset comparator crosses threshold.
    pub saturated: bool,
}

impl NeuronState {
    pub fn at_rest(params: &LifParams) -> Self {
        NeuronState {
            v_mem: params.v_rest,
            refractory_left: 0,
            trace_post: 0.0,
            saturated: false,
        }
    }
}

/// One fault-free LIF update. Returns whether the neuron spiked.
///
/// During refractory steps the input is dropped and `v_mem` is held.
/// Otherwise `v_mem` decays toward `v_rest`, integrates the input and, on
/// reaching `v_th`, spikes and returns to `v_reset`.
pub fn lif_step(state: &mut NeuronState, weighted_input: f32, params: &LifParams) -> Result<bool> {
    if state.refractory_left > 0 {
        state.refractory_left -= 1;
        return Ok(false);
    }
    let v = params.v_rest + params.leak_factor * (state.v_mem - params.v_rest) + weighted_input;
    if !v.is_finite() {
        return Err(Error::NonFinitePotential);
    }
    if v >= params.v_th {
        state.v_mem = params.v_reset;
        state.refractory_left = params.refractory_steps;
        Ok(true)
    } else {
        state.v_mem = v;
        Ok(false)
    }
}

/// Advances every neuron by one step and writes the spike flags. Returns
/// whether any neuron spiked.
pub(crate) fn step_population(
    states: &mut [NeuronState],
    currents: &[f32],
    params: &LifParams,
    tags: Option<&[NeuronFaultTag]>,
    spiked: &mut [bool],
) -> Result<bool> {
    let mut any = false;
    match tags {
        None => {
            for ((state, &input), out) in states.iter_mut().zip(currents).zip(spiked.iter_mut()) {
                *out = lif_step(state, input, params)?;
                any |= *out;
            }
        }
        Some(tags) => {
            for (((state, &input), out), &tag) in states
                .iter_mut()
                .zip(currents)
                .zip(spiked.iter_mut())
                .zip(tags)
            {
                *out = faulty_neuron_step(state, input, params, tag)?;
                any |= *out;
            }
        }
    }
    Ok(any)
}

/// Lateral inhibition: every neuron that did not spike this step loses
/// `strength` of potential, floored at `v_reset`.
pub(crate) fn inhibit(states: &mut [NeuronState], spiked: &[bool], strength: f32, v_reset: f32) {
    for (state, &s) in states.iter_mut().zip(spiked) {
        if !s {
            state.v_mem = (state.v_mem - strength).max(v_reset);
        }
    }
}
