use rand::Rng;

use crate::error::{Error, Result};

/// Boolean spike grid, `steps` rows by `width` lines, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpikeGrid {
    steps: usize,
    width: usize,
    spikes: Vec<bool>,
}

impl SpikeGrid {
    pub fn zeros(steps: usize, width: usize) -> Self {
        SpikeGrid {
            steps,
            width,
            spikes: vec![false; steps * width],
        }
    }

    pub fn from_vec(steps: usize, width: usize, spikes: Vec<bool>) -> Result<Self> {
        if spikes.len() != steps * width {
            return Err(Error::dims("spike grid", steps * width, spikes.len()));
        }
        Ok(SpikeGrid {
            steps,
            width,
            spikes,
        })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn row(&self, step: usize) -> &[bool] {
        &self.spikes[step * self.width..(step + 1) * self.width]
    }

    pub fn set(&mut self, step: usize, line: usize, spike: bool) {
        self.spikes[step * self.width + line] = spike;
    }

    pub fn get(&self, step: usize, line: usize) -> bool {
        self.spikes[step * self.width + line]
    }

    /// Total spikes emitted on each line.
    pub fn counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.width];
        for step in 0..self.steps {
            for (c, &s) in counts.iter_mut().zip(self.row(step)) {
                *c += s as u32;
            }
        }
        counts
    }

    pub fn total(&self) -> usize {
        self.spikes.iter().filter(|&&s| s).count()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.spikes
    }
}

/// Bernoulli rate coder: pixel `p` fires with probability `(p / 255) * max_rate`
/// at every step.
pub fn encode_rate<R: Rng + ?Sized>(
    image: &[u8],
    steps: usize,
    max_rate: f64,
    rng: &mut R,
) -> Result<SpikeGrid> {
    if steps == 0 {
        return Err(Error::invalid("rate coding needs at least one step"));
    }
    if !(max_rate > 0.0 && max_rate <= 1.0) {
        return Err(Error::invalid(format!(
            "max_rate must be in (0, 1], got {max_rate}"
        )));
    }
    let width = image.len();
    let probs: Vec<f64> = image
        .iter()
        .map(|&p| (p as f64 / 255.0) * max_rate)
        .collect();
    let mut grid = SpikeGrid::zeros(steps, width);
    for step in 0..steps {
        let row = &mut grid.spikes[step * width..(step + 1) * width];
        for (slot, &p) in row.iter_mut().zip(&probs) {
            // zero-intensity pixels never fire, so they consume no randomness
            if p > 0.0 {
                *slot = rng.gen_bool(p);
            }
        }
    }
    Ok(grid)
}

/// Rate coder bound to an input width.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateEncoder {
    pub n_inputs: usize,
    pub steps: usize,
    pub max_rate: f64,
}

impl RateEncoder {
    pub fn new(n_inputs: usize, steps: usize, max_rate: f64) -> Result<Self> {
        if steps == 0 {
            return Err(Error::invalid("rate coding needs at least one step"));
        }
        if !(max_rate > 0.0 && max_rate <= 1.0) {
            return Err(Error::invalid(format!(
                "max_rate must be in (0, 1], got {max_rate}"
            )));
        }
        Ok(RateEncoder {
            n_inputs,
            steps,
            max_rate,
        })
    }

    pub fn encode<R: Rng + ?Sized>(&self, image: &[u8], rng: &mut R) -> Result<SpikeGrid> {
        if image.len() != self.n_inputs {
            return Err(Error::dims("rate encoder input", self.n_inputs, image.len()));
        }
        encode_rate(image, self.steps, self.max_rate, rng)
    }
}
