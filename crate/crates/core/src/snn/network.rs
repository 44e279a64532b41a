use rand::Rng;

use crate::error::{Error, Result};
use crate::fault::NeuronFaultTag;

use super::encode::SpikeGrid;
use super::lif::{inhibit, step_population, NeuronState};
use super::params::{LifParams, StdpParams};
use super::WeightCode;

/// Trained single-layer fully-connected network.
///
/// `weights` is row-major `n_inputs x n_neurons`: row `i` holds the fan-out of
/// input line `i`, so one crossbar column stores the fan-in of one neuron.
#[derive(Clone, Debug, PartialEq)]
pub struct SnnModel {
    n_inputs: usize,
    n_neurons: usize,
    weights: Vec<WeightCode>,
    pub lif: LifParams,
    pub stdp: StdpParams,
    pub inhibition_strength: f32,
    pub neuron_labels: Vec<Option<u8>>,
    pub training_seed: u64,
}

impl SnnModel {
    pub fn new(
        n_inputs: usize,
        n_neurons: usize,
        weights: Vec<WeightCode>,
        lif: LifParams,
        stdp: StdpParams,
        inhibition_strength: f32,
    ) -> Result<Self> {
        if n_inputs == 0 || n_neurons == 0 {
            return Err(Error::invalid("network needs at least one input and one neuron"));
        }
        if weights.len() != n_inputs * n_neurons {
            return Err(Error::dims("weight matrix", n_inputs * n_neurons, weights.len()));
        }
        lif.validate()?;
        stdp.validate()?;
        if !(inhibition_strength >= 0.0 && inhibition_strength.is_finite()) {
            return Err(Error::invalid("inhibition_strength must be finite and >= 0"));
        }
        Ok(SnnModel {
            n_inputs,
            n_neurons,
            weights,
            lif,
            stdp,
            inhibition_strength,
            neuron_labels: vec![None; n_neurons],
            training_seed: 0,
        })
    }

    /// Untrained model with weights drawn uniformly from `[0, init_max]`.
    pub fn with_random_weights<R: Rng + ?Sized>(
        n_inputs: usize,
        n_neurons: usize,
        lif: LifParams,
        stdp: StdpParams,
        inhibition_strength: f32,
        init_max: f32,
        rng: &mut R,
    ) -> Result<Self> {
        let hi = WeightCode::from_value(init_max).0;
        let weights = (0..n_inputs * n_neurons)
            .map(|_| WeightCode(rng.gen_range(0..=hi)))
            .collect();
        SnnModel::new(n_inputs, n_neurons, weights, lif, stdp, inhibition_strength)
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_neurons(&self) -> usize {
        self.n_neurons
    }

    pub fn weights(&self) -> &[WeightCode] {
        &self.weights
    }

    #[inline]
    pub fn weight(&self, input: usize, neuron: usize) -> WeightCode {
        self.weights[input * self.n_neurons + neuron]
    }

    pub fn set_weights(&mut self, weights: Vec<WeightCode>) -> Result<()> {
        if weights.len() != self.weights.len() {
            return Err(Error::dims("weight matrix", self.weights.len(), weights.len()));
        }
        self.weights = weights;
        Ok(())
    }
}

/// Recorded input and output activity of one simulated sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpikeRaster {
    pub input_spikes: SpikeGrid,
    pub output_spikes: SpikeGrid,
}

impl SpikeRaster {
    pub fn steps(&self) -> usize {
        self.output_spikes.steps()
    }

    pub fn spike_counts(&self) -> Vec<u32> {
        self.output_spikes.counts()
    }
}

/// Read-only inference engine: a model with its (possibly corrupted) weights
/// expanded to `f32` and an optional per-neuron fault overlay.
#[derive(Clone, Debug)]
pub struct Simulator {
    n_inputs: usize,
    n_neurons: usize,
    weights: Vec<f32>,
    lif: LifParams,
    inhibition_strength: f32,
    overlay: Option<Vec<NeuronFaultTag>>,
}

impl Simulator {
    pub fn new(
        model: &SnnModel,
        overlay: Option<&[NeuronFaultTag]>,
        effective_weights: Option<&[WeightCode]>,
    ) -> Result<Self> {
        let codes = effective_weights.unwrap_or(&model.weights);
        if codes.len() != model.weights.len() {
            return Err(Error::dims("effective weight matrix", model.weights.len(), codes.len()));
        }
        if let Some(tags) = overlay {
            if tags.len() != model.n_neurons {
                return Err(Error::dims("neuron fault overlay", model.n_neurons, tags.len()));
            }
        }
        // an all-healthy overlay is the fault-free path
        let overlay = overlay
            .filter(|tags| tags.iter().any(|t| *t != NeuronFaultTag::None))
            .map(|tags| tags.to_vec());
        Ok(Simulator {
            n_inputs: model.n_inputs,
            n_neurons: model.n_neurons,
            weights: codes.iter().map(|w| w.value()).collect(),
            lif: model.lif,
            inhibition_strength: model.inhibition_strength,
            overlay,
        })
    }

    pub fn n_neurons(&self) -> usize {
        self.n_neurons
    }

    /// Whether state survives from one sample to the next. A neuron with a
    /// broken reset cannot be returned to rest between samples, so once
    /// saturated it stays saturated.
    pub fn has_latching_faults(&self) -> bool {
        self.overlay
            .as_ref()
            .is_some_and(|tags| tags.contains(&NeuronFaultTag::FaultyReset))
    }

    fn simulate(
        &self,
        input: &SpikeGrid,
        saturated: &mut [bool],
        mut record: impl FnMut(usize, &[bool]),
    ) -> Result<()> {
        if input.width() != self.n_inputs {
            return Err(Error::dims("input spike grid", self.n_inputs, input.width()));
        }
        let n = self.n_neurons;
        let mut states: Vec<NeuronState> = saturated
            .iter()
            .map(|&sat| NeuronState {
                saturated: sat,
                ..NeuronState::at_rest(&self.lif)
            })
            .collect();
        let mut currents = vec![0f32; n];
        let mut spiked = vec![false; n];
        for step in 0..input.steps() {
            currents.iter_mut().for_each(|c| *c = 0.0);
            for (i, _) in input.row(step).iter().enumerate().filter(|(_, &s)| s) {
                let row = &self.weights[i * n..(i + 1) * n];
                for (c, w) in currents.iter_mut().zip(row) {
                    *c += w;
                }
            }
            let any = step_population(
                &mut states,
                &currents,
                &self.lif,
                self.overlay.as_deref(),
                &mut spiked,
            )?;
            if any {
                inhibit(&mut states, &spiked, self.inhibition_strength, self.lif.v_reset);
            }
            record(step, &spiked);
        }
        for (sat, state) in saturated.iter_mut().zip(&states) {
            *sat = state.saturated;
        }
        Ok(())
    }

    pub fn run(&self, input: &SpikeGrid) -> Result<SpikeRaster> {
        let mut output = SpikeGrid::zeros(input.steps(), self.n_neurons);
        self.simulate(input, &mut vec![false; self.n_neurons], |step, spiked| {
            for (j, &s) in spiked.iter().enumerate() {
                if s {
                    output.set(step, j, true);
                }
            }
        })?;
        Ok(SpikeRaster {
            input_spikes: input.clone(),
            output_spikes: output,
        })
    }

    /// Per-neuron output spike totals, without materializing the raster.
    pub fn run_counts(&self, input: &SpikeGrid) -> Result<Vec<u32>> {
        self.run_counts_latched(input, &mut vec![false; self.n_neurons])
    }

    /// Like [`Simulator::run_counts`], but starts with the saturation flags in
    /// `saturated` and writes back the flags at the end of the sample.
    pub fn run_counts_latched(&self, input: &SpikeGrid, saturated: &mut [bool]) -> Result<Vec<u32>> {
        if saturated.len() != self.n_neurons {
            return Err(Error::dims("saturation flags", self.n_neurons, saturated.len()));
        }
        let mut counts = vec![0u32; self.n_neurons];
        self.simulate(input, saturated, |_, spiked| {
            for (c, &s) in counts.iter_mut().zip(spiked) {
                *c += s as u32;
            }
        })?;
        Ok(counts)
    }
}

/// Simulates one input grid. `neuron_fault_overlay` assigns a fault tag to
/// every neuron; `effective_weights` replaces the stored weights, e.g. with a
/// matrix read back through faulty synapse registers.
pub fn run_inference(
    model: &SnnModel,
    input: &SpikeGrid,
    neuron_fault_overlay: Option<&[NeuronFaultTag]>,
    effective_weights: Option<&[WeightCode]>,
) -> Result<SpikeRaster> {
    Simulator::new(model, neuron_fault_overlay, effective_weights)?.run(input)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_model(weight: u8, n_inputs: usize, n_neurons: usize) -> SnnModel {
        let lif = LifParams {
            v_th: 1.0,
            v_reset: 0.0,
            v_rest: 0.0,
            leak_factor: 0.9,
            refractory_steps: 0,
            dt: 1.0,
        };
        SnnModel::new(
            n_inputs,
            n_neurons,
            vec![WeightCode(weight); n_inputs * n_neurons],
            lif,
            StdpParams::default(),
            0.0,
        )
        .unwrap()
    }

    fn constant_input(steps: usize, width: usize) -> SpikeGrid {
        SpikeGrid::from_vec(steps, width, vec![true; steps * width]).unwrap()
    }

    #[test]
    fn silent_input_gives_silent_output() {
        let model = tiny_model(255, 4, 3);
        let raster = run_inference(&model, &SpikeGrid::zeros(50, 4), None, None).unwrap();
        assert_eq!(raster.output_spikes.total(), 0);
    }

    #[test]
    fn saturated_reset_fault_fires_every_step_after_crossing() {
        // two inputs at 0.4 each: 0.8 on step 0, crosses on step 1
        let model = tiny_model(102, 2, 2);
        let tags = [NeuronFaultTag::FaultyReset, NeuronFaultTag::None];
        let raster =
            run_inference(&model, &constant_input(20, 2), Some(&tags), None).unwrap();
        let first = (0..20).find(|&t| raster.output_spikes.get(t, 0)).unwrap();
        assert_eq!(first, 1);
        assert!((first..20).all(|t| raster.output_spikes.get(t, 0)));
    }

    #[test]
    fn saturation_latches_across_samples() {
        let model = tiny_model(102, 2, 2);
        let tags = [NeuronFaultTag::FaultyReset, NeuronFaultTag::None];
        let sim = Simulator::new(&model, Some(&tags), None).unwrap();
        assert!(sim.has_latching_faults());
        let mut saturated = vec![false; 2];
        let first = sim.run_counts_latched(&constant_input(10, 2), &mut saturated).unwrap();
        assert_eq!(first[0], 9);
        assert_eq!(saturated, vec![true, false]);
        // silent input: the saturated neuron keeps firing, the healthy one rests
        let second = sim.run_counts_latched(&SpikeGrid::zeros(10, 2), &mut saturated).unwrap();
        assert_eq!(second, vec![10, 0]);
        // a fresh run starts unsaturated
        assert_eq!(sim.run_counts(&SpikeGrid::zeros(10, 2)).unwrap(), vec![0, 0]);
        let healthy = Simulator::new(&model, Some(&[NeuronFaultTag::None; 2]), None).unwrap();
        assert!(!healthy.has_latching_faults());
    }

    #[test]
    fn dead_spike_generator_never_fires() {
        let model = tiny_model(255, 3, 2);
        let tags = [NeuronFaultTag::FaultySpikeGeneration, NeuronFaultTag::None];
        let raster =
            run_inference(&model, &constant_input(30, 3), Some(&tags), None).unwrap();
        assert_eq!(raster.spike_counts()[0], 0);
        assert!(raster.spike_counts()[1] > 0);
    }

    #[test]
    fn inhibition_lets_one_winner_through() {
        let mut model = tiny_model(0, 2, 2);
        // neuron 0 is driven harder and reaches threshold first
        let w = vec![WeightCode(200), WeightCode(100), WeightCode(200), WeightCode(100)];
        model.set_weights(w).unwrap();
        model.inhibition_strength = 10.0;
        let raster = run_inference(&model, &constant_input(40, 2), None, None).unwrap();
        let counts = raster.spike_counts();
        assert!(counts[0] > 0);
        assert_eq!(counts[1], 0);
    }

    #[test]
    fn effective_weights_override_stored_weights() {
        let model = tiny_model(255, 2, 1);
        let zeros = vec![WeightCode::ZERO; 2];
        let raster = run_inference(&model, &constant_input(10, 2), None, Some(&zeros)).unwrap();
        assert_eq!(raster.output_spikes.total(), 0);
    }

    #[test]
    fn rejects_mismatched_shapes() {
        let model = tiny_model(10, 4, 3);
        assert!(run_inference(&model, &SpikeGrid::zeros(5, 3), None, None).is_err());
        assert!(run_inference(&model, &SpikeGrid::zeros(5, 4), Some(&[NeuronFaultTag::None]), None).is_err());
        assert!(run_inference(&model, &SpikeGrid::zeros(5, 4), None, Some(&[WeightCode(1)])).is_err());
    }

    #[test]
    fn deterministic_raster() {
        let model = tiny_model(90, 4, 3);
        let input = constant_input(25, 4);
        let tags = [
            NeuronFaultTag::FaultyLeak,
            NeuronFaultTag::None,
            NeuronFaultTag::FaultyReset,
        ];
        let a = run_inference(&model, &input, Some(&tags), None).unwrap();
        let b = run_inference(&model, &input, Some(&tags), None).unwrap();
        assert_eq!(a, b);
    }
}
