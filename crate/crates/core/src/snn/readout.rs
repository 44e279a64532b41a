use rayon::prelude::*;

use crate::error::Result;
use crate::io::LabeledImageSet;

use super::encode::RateEncoder;
use super::network::{SnnModel, Simulator};
use super::sample_rng;

pub const N_CLASSES: usize = 10;

/// Labels each neuron with the class that maximizes its mean spike count.
/// Ties go to the lower class id; neurons that never spiked stay unassigned.
pub fn labels_from_responses<'a, I>(n_neurons: usize, responses: I) -> Vec<Option<u8>>
where
    I: IntoIterator<Item = (u8, &'a [u32])>,
{
    let mut sums = vec![[0u64; N_CLASSES]; n_neurons];
    let mut per_class = [0u64; N_CLASSES];
    for (label, counts) in responses {
        let class = label as usize;
        per_class[class] += 1;
        for (s, &c) in sums.iter_mut().zip(counts) {
            s[class] += c as u64;
        }
    }
    sums.iter()
        .map(|s| {
            let mut best: Option<(usize, f64)> = None;
            for class in 0..N_CLASSES {
                if per_class[class] == 0 || s[class] == 0 {
                    continue;
                }
                let mean = s[class] as f64 / per_class[class] as f64;
                if best.is_none_or(|(_, m)| mean > m) {
                    best = Some((class, mean));
                }
            }
            best.map(|(class, _)| class as u8)
        })
        .collect()
}

/// Runs the fault-free model on a calibration set and labels its neurons.
pub fn assign_labels(
    model: &SnnModel,
    calibration: &LabeledImageSet,
    encoder: &RateEncoder,
    seed: u64,
) -> Result<Vec<Option<u8>>> {
    let sim = Simulator::new(model, None, None)?;
    let responses = spike_counts(&sim, calibration, encoder, seed)?;
    Ok(labels_from_responses(
        model.n_neurons(),
        calibration
            .labels()
            .iter()
            .zip(&responses)
            .map(|(&l, c)| (l, c.as_slice())),
    ))
}

/// Predicted class: the label whose neurons have the highest mean spike
/// count, lowest id on ties. `None` when no labeled neuron spiked.
pub fn classify(counts: &[u32], labels: &[Option<u8>]) -> Option<u8> {
    let mut sums = [0u64; N_CLASSES];
    let mut members = [0u64; N_CLASSES];
    for (&c, label) in counts.iter().zip(labels) {
        if let Some(l) = label {
            sums[*l as usize] += c as u64;
            members[*l as usize] += 1;
        }
    }
    let mut best: Option<(usize, f64)> = None;
    for class in 0..N_CLASSES {
        if sums[class] == 0 {
            continue;
        }
        let mean = sums[class] as f64 / members[class] as f64;
        if best.is_none_or(|(_, m)| mean > m) {
            best = Some((class, mean));
        }
    }
    best.map(|(class, _)| class as u8)
}

/// Spike counts for every sample in dataset order. Samples run in parallel
/// unless saturated neurons carry over between samples, in which case the
/// set is presented sequentially as on the chip.
fn spike_counts(
    sim: &Simulator,
    set: &LabeledImageSet,
    encoder: &RateEncoder,
    seed: u64,
) -> Result<Vec<Vec<u32>>> {
    let encode = |idx: usize| {
        let mut rng = sample_rng(seed, idx as u64);
        encoder.encode(set.image(idx), &mut rng)
    };
    if sim.has_latching_faults() {
        let mut saturated = vec![false; sim.n_neurons()];
        return (0..set.len())
            .map(|idx| sim.run_counts_latched(&encode(idx)?, &mut saturated))
            .collect();
    }
    (0..set.len())
        .into_par_iter()
        .map(|idx| sim.run_counts(&encode(idx)?))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub predictions: Vec<Option<u8>>,
    pub correct: usize,
    pub total: usize,
}

impl Evaluation {
    pub fn accuracy(&self) -> f64 {
        accuracy(self.correct, self.total)
    }

    /// Samples where no labeled neuron spiked.
    pub fn silent(&self) -> usize {
        self.predictions.iter().filter(|p| p.is_none()).count()
    }
}

pub fn accuracy(correct: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        correct as f64 / total as f64
    }
}

/// Classifies every sample of `set`. Sample `k` is encoded from the random
/// stream `(seed, k)`, so two simulators evaluated with the same seed see
/// identical input spike trains.
pub fn evaluate(
    sim: &Simulator,
    labels: &[Option<u8>],
    set: &LabeledImageSet,
    encoder: &RateEncoder,
    seed: u64,
) -> Result<Evaluation> {
    let responses = spike_counts(sim, set, encoder, seed)?;
    let predictions: Vec<Option<u8>> = responses.iter().map(|c| classify(c, labels)).collect();
    let correct = predictions
        .iter()
        .zip(set.labels())
        .filter(|(p, &l)| **p == Some(l))
        .count();
    Ok(Evaluation {
        predictions,
        correct,
        total: set.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neuron_selective_for_one_class() {
        let resp: Vec<(u8, Vec<u32>)> = vec![(3, vec![5, 0]), (1, vec![0, 0]), (3, vec![7, 0])];
        let labels = labels_from_responses(2, resp.iter().map(|(l, c)| (*l, c.as_slice())));
        assert_eq!(labels, vec![Some(3), None]);
    }

    #[test]
    fn label_ties_break_low() {
        let resp: Vec<(u8, Vec<u32>)> = vec![(4, vec![2]), (2, vec![2])];
        let labels = labels_from_responses(1, resp.iter().map(|(l, c)| (*l, c.as_slice())));
        assert_eq!(labels, vec![Some(2)]);
    }

    #[test]
    fn labels_use_class_means_not_sums() {
        // class 0 seen three times with 2 spikes each, class 1 once with 5
        let resp: Vec<(u8, Vec<u32>)> =
            vec![(0, vec![2]), (0, vec![2]), (0, vec![2]), (1, vec![5])];
        let labels = labels_from_responses(1, resp.iter().map(|(l, c)| (*l, c.as_slice())));
        assert_eq!(labels, vec![Some(1)]);
    }

    #[test]
    fn classify_cases() {
        let labels = [Some(7), Some(2), None];
        assert_eq!(classify(&[4, 0, 9], &labels), Some(7));
        assert_eq!(classify(&[0, 0, 0], &labels), None);
        assert_eq!(classify(&[0, 0, 9], &labels), None);
        let labels = [Some(1), Some(0)];
        assert_eq!(classify(&[5, 5], &labels), Some(0));
    }

    #[test]
    fn accuracy_of_empty_is_zero() {
        assert_eq!(accuracy(0, 0), 0.0);
        assert_eq!(accuracy(3, 4), 0.75);
    }
}
