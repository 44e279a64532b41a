use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::io::LabeledImageSet;

use super::encode::RateEncoder;
use super::lif::{inhibit, lif_step, NeuronState};
use super::network::SnnModel;
use super::stdp::weight_power;
use super::{LifParams, WeightCode};

#[derive(Clone, Debug, PartialEq)]
pub struct TrainOptions {
    pub epochs: usize,
    pub encoder: RateEncoder,
    /// Target fan-in sum per neuron, re-imposed after every sample. `None`
    /// leaves weights unnormalized.
    pub column_norm: Option<f32>,
    /// Training-time adaptive thresholds. Folded into the weights when
    /// training ends, so the returned model uses the fixed `v_th`.
    pub homeostasis: Option<Homeostasis>,
}

/// Per-neuron threshold offset `theta`: raised by `theta_plus` on each spike
/// and multiplied by `theta_decay` every step.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Homeostasis {
    pub theta_plus: f32,
    pub theta_decay: f32,
}

impl Homeostasis {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta_plus >= 0.0 && self.theta_plus.is_finite()) {
            return Err(Error::invalid("theta_plus must be finite and >= 0"));
        }
        if !(self.theta_decay > 0.0 && self.theta_decay <= 1.0) {
            return Err(Error::invalid("theta_decay must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Unsupervised STDP training on fault-free hardware.
///
/// Weights are tracked in `f32` during training and quantized to 8-bit codes
/// once at the end; per-event updates are far below one code step. Traces
/// decay every step and jump by 1 on their spike. Within a step, depression
/// for presynaptic spikes uses the postsynaptic traces from before this step's
/// output spikes, and potentiation for postsynaptic spikes sees the
/// presynaptic traces including this step's inputs.
///
/// With homeostasis, neuron `j` fires at `v_th + theta_j` during training.
/// Afterwards column `j` is scaled by `v_th / (v_th + theta_j)`, which leaves
/// the trained behavior unchanged whenever `v_reset = v_rest = 0` and the
/// inhibition strength is at least `v_th`.
pub fn train_stdp<R: Rng + ?Sized>(
    model: &SnnModel,
    dataset: &LabeledImageSet,
    options: &TrainOptions,
    rng: &mut R,
) -> Result<SnnModel> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if dataset.n_pixels() != model.n_inputs() || options.encoder.n_inputs != model.n_inputs() {
        return Err(Error::dims("training images", model.n_inputs(), dataset.n_pixels()));
    }
    if let Some(h) = &options.homeostasis {
        h.validate()?;
    }
    let mut trained = model.clone();
    if options.epochs == 0 {
        return Ok(trained);
    }

    let n_in = model.n_inputs();
    let n = model.n_neurons();
    let lif = &model.lif;
    let stdp = &model.stdp;
    let wmax = stdp.wgh_max;

    let mut w: Vec<f32> = model.weights().iter().map(|c| c.value()).collect();
    let mut states = vec![NeuronState::at_rest(lif); n];
    let mut currents = vec![0f32; n];
    let mut spiked = vec![false; n];
    let mut x_pre = vec![0f32; n_in];
    let mut active = Vec::with_capacity(n_in);
    let mut theta = vec![0f32; n];

    let mut order: Vec<usize> = (0..dataset.len()).collect();
    for _ in 0..options.epochs {
        order.shuffle(rng);
        for &idx in &order {
            let input = options.encoder.encode(dataset.image(idx), rng)?;
            states.iter_mut().for_each(|s| *s = NeuronState::at_rest(lif));
            x_pre.iter_mut().for_each(|x| *x = 0.0);

            for step in 0..input.steps() {
                active.clear();
                active.extend(
                    input
                        .row(step)
                        .iter()
                        .enumerate()
                        .filter(|(_, &s)| s)
                        .map(|(i, _)| i),
                );

                currents.iter_mut().for_each(|c| *c = 0.0);
                for &i in &active {
                    for (c, wi) in currents.iter_mut().zip(&w[i * n..(i + 1) * n]) {
                        *c += wi;
                    }
                }
                let mut any = false;
                for j in 0..n {
                    let params = LifParams {
                        v_th: lif.v_th + theta[j],
                        ..*lif
                    };
                    spiked[j] = lif_step(&mut states[j], currents[j], &params)?;
                    any |= spiked[j];
                }
                if let Some(h) = &options.homeostasis {
                    for (t, &s) in theta.iter_mut().zip(&spiked) {
                        *t = *t * h.theta_decay + if s { h.theta_plus } else { 0.0 };
                    }
                }
                if any {
                    inhibit(&mut states, &spiked, model.inhibition_strength, lif.v_reset);
                }

                x_pre.iter_mut().for_each(|x| *x *= stdp.trace_decay_pre);
                states
                    .iter_mut()
                    .for_each(|s| s.trace_post *= stdp.trace_decay_post);

                // depression on presynaptic spikes
                for &i in &active {
                    x_pre[i] += 1.0;
                    let row = &mut w[i * n..(i + 1) * n];
                    for (wi, s) in row.iter_mut().zip(&states) {
                        if s.trace_post > 0.0 {
                            let dw = -stdp.eta_pre * s.trace_post * weight_power(*wi, stdp.mu);
                            *wi = (*wi + dw).clamp(0.0, wmax);
                        }
                    }
                }

                // potentiation on postsynaptic spikes
                if any {
                    for j in (0..n).filter(|&j| spiked[j]) {
                        states[j].trace_post += 1.0;
                        for (i, &xp) in x_pre.iter().enumerate() {
                            if xp > 0.0 {
                                let wi = &mut w[i * n + j];
                                let dw = stdp.eta_post * xp * weight_power(wmax - *wi, stdp.mu);
                                *wi = (*wi + dw).clamp(0.0, wmax);
                            }
                        }
                    }
                }
            }

            if let Some(target) = options.column_norm {
                normalize_columns(&mut w, n_in, n, target, wmax);
            }
        }
    }

    if options.homeostasis.is_some() {
        for (j, t) in theta.iter().enumerate() {
            let scale = lif.v_th / (lif.v_th + t);
            for i in 0..n_in {
                w[i * n + j] *= scale;
            }
        }
    }
    trained.set_weights(w.iter().map(|&v| WeightCode::from_value(v)).collect())?;
    Ok(trained)
}

fn normalize_columns(w: &mut [f32], n_in: usize, n: usize, target: f32, wmax: f32) {
    for j in 0..n {
        let sum: f32 = (0..n_in).map(|i| w[i * n + j]).sum();
        if sum > 0.0 {
            let scale = target / sum;
            for i in 0..n_in {
                let v = &mut w[i * n + j];
                *v = (*v * scale).min(wmax);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snn::{LifParams, StdpParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toy_set() -> LabeledImageSet {
        // two 16-pixel classes: left half lit vs right half lit
        let mut images = Vec::new();
        let mut labels = Vec::new();
        for k in 0..20 {
            let class = (k % 2) as u8;
            let img: Vec<u8> = (0..16)
                .map(|p| if (p < 8) == (class == 0) { 255 } else { 0 })
                .collect();
            images.extend(img);
            labels.push(class);
        }
        LabeledImageSet::new(16, images, labels, "toy").unwrap()
    }

    fn toy_model(rng: &mut ChaCha8Rng) -> SnnModel {
        let lif = LifParams {
            v_th: 4.0,
            ..LifParams::default()
        };
        SnnModel::with_random_weights(16, 4, lif, StdpParams::default(), 4.0, 0.3, rng).unwrap()
    }

    fn options(epochs: usize) -> TrainOptions {
        TrainOptions {
            epochs,
            encoder: RateEncoder::new(16, 40, 0.5).unwrap(),
            column_norm: Some(3.0),
            homeostasis: None,
        }
    }

    #[test]
    fn zero_epochs_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let model = toy_model(&mut rng);
        let trained = train_stdp(&model, &toy_set(), &options(0), &mut rng).unwrap();
        assert_eq!(trained.weights(), model.weights());
    }

    #[test]
    fn training_changes_weights_deterministically() {
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            let model = toy_model(&mut rng);
            train_stdp(&model, &toy_set(), &options(2), &mut rng).unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a, b);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        assert_ne!(a.weights(), toy_model(&mut rng).weights());
    }

    #[test]
    fn empty_dataset_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let model = toy_model(&mut rng);
        let empty = LabeledImageSet::new(16, vec![], vec![], "empty").unwrap();
        assert!(matches!(
            train_stdp(&model, &empty, &options(1), &mut rng),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn homeostasis_folds_into_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let model = toy_model(&mut rng);
        let mut opts = options(2);
        opts.homeostasis = Some(Homeostasis {
            theta_plus: 0.5,
            theta_decay: 1.0,
        });
        let trained = train_stdp(&model, &toy_set(), &opts, &mut rng).unwrap();
        assert_eq!(trained.lif, model.lif);
        // thresholds only grow, so folded column sums fall below the target
        for j in 0..4 {
            let sum: f32 = (0..16).map(|i| trained.weight(i, j).value()).sum();
            assert!(sum <= 3.0 + 16.0 / 255.0, "column {j} sum {sum}");
        }
        opts.homeostasis = Some(Homeostasis {
            theta_plus: -1.0,
            theta_decay: 1.0,
        });
        assert!(train_stdp(&model, &toy_set(), &opts, &mut rng).is_err());
    }

    #[test]
    fn normalization_hits_target() {
        let mut w = vec![0.1f32, 0.2, 0.3, 0.4, 0.0, 0.0];
        normalize_columns(&mut w, 3, 2, 1.0, 1.0);
        let col0: f32 = [w[0], w[2], w[4]].iter().sum();
        let col1: f32 = [w[1], w[3], w[5]].iter().sum();
        assert!((col0 - 1.0).abs() < 1e-6);
        assert!((col1 - 1.0).abs() < 1e-6);
    }
}
