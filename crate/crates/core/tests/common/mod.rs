//! Tiny synthetic workspace shared by the integration tests.

#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use snn_fam::io::{write_idx, LabeledImageSet};

/// Class `k` lights a horizontal bar at rows `2k + 4 .. 2k + 8`, plus noise.
pub fn bar_digits(n: usize, seed: u64) -> LabeledImageSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut images = Vec::with_capacity(n * 784);
    let mut labels = Vec::with_capacity(n);
    for k in 0..n {
        let class = (k % 10) as u8;
        let top = 2 * class as usize + 4;
        for row in 0..28 {
            for _ in 0..28 {
                let lit = (top..top + 4).contains(&row);
                images.push(if lit { 200 + rng.gen_range(0..56) } else if rng.gen_bool(0.03) { 120 } else { 0 });
            }
        }
        labels.push(class);
    }
    LabeledImageSet::new(784, images, labels, "bars").unwrap()
}

pub const TINY_CONFIG: &str = r#"
workload = "bars"
output_dir = "out"

[model]
n_neurons = 20

[training]
epochs = 1
seed = 1

[encoding]
steps_per_sample = 40

[data]
train_images = "train-images.idx"
train_labels = "train-labels.idx"
test_images = "test-images.idx"
test_labels = "test-labels.idx"
train_subset = 100
test_subset = 40

[crossbar]
rows = 64
cols = 32

[sweep]
rates = [0.0, 0.2]
seeds = [1, 2]
neuron_rates = [0.0, 0.1]
"#;

/// Writes the datasets and `config.toml` into `dir`; returns the config path.
pub fn tiny_workspace(dir: &Path) -> PathBuf {
    let d = |name: &str| dir.join(name);
    write_idx(&bar_digits(100, 1), 28, d("train-images.idx"), d("train-labels.idx")).unwrap();
    write_idx(&bar_digits(40, 2), 28, d("test-images.idx"), d("test-labels.idx")).unwrap();
    let path = d("config.toml");
    fs::write(&path, TINY_CONFIG).unwrap();
    path
}
