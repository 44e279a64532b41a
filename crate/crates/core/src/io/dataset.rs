use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::snn::N_CLASSES;

/// Images of equal size with class labels in `0..10`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledImageSet {
    n_pixels: usize,
    images: Vec<u8>,
    labels: Vec<u8>,
    source: String,
}

impl LabeledImageSet {
    pub fn new(n_pixels: usize, images: Vec<u8>, labels: Vec<u8>, source: impl Into<String>) -> Result<Self> {
        if n_pixels == 0 {
            return Err(Error::invalid("images need at least one pixel"));
        }
        if images.len() != labels.len() * n_pixels {
            return Err(Error::CountMismatch {
                images: images.len() / n_pixels,
                labels: labels.len(),
            });
        }
        if let Some((index, &label)) = labels.iter().enumerate().find(|(_, &l)| l as usize >= N_CLASSES) {
            return Err(Error::InvalidLabel { index, label });
        }
        Ok(LabeledImageSet {
            n_pixels,
            images,
            labels,
            source: source.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_pixels(&self) -> usize {
        self.n_pixels
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn image(&self, index: usize) -> &[u8] {
        &self.images[index * self.n_pixels..(index + 1) * self.n_pixels]
    }

    pub fn images(&self) -> &[u8] {
        &self.images
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn class_histogram(&self) -> [usize; N_CLASSES] {
        let mut h = [0usize; N_CLASSES];
        for &l in &self.labels {
            h[l as usize] += 1;
        }
        h
    }

    /// New set holding the given samples in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut images = Vec::with_capacity(indices.len() * self.n_pixels);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            images.extend_from_slice(self.image(i));
            labels.push(self.labels[i]);
        }
        LabeledImageSet {
            n_pixels: self.n_pixels,
            images,
            labels,
            source: self.source.clone(),
        }
    }
}

/// Class-stratified, seeded sample of `n` images.
///
/// Every class gets `n / 10` samples (the remainder goes to the lowest class
/// ids); a class with too few images gives all it has and the shortfall is
/// spread over the others. The result is shuffled. Asking for the whole set
/// returns it unchanged.
pub fn subset(set: &LabeledImageSet, n: usize, seed: u64) -> Result<LabeledImageSet> {
    if n > set.len() {
        return Err(Error::invalid(format!(
            "subset of {n} requested from a set of {}",
            set.len()
        )));
    }
    if n == set.len() {
        return Ok(set.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); N_CLASSES];
    for (i, &l) in set.labels().iter().enumerate() {
        by_class[l as usize].push(i);
    }
    for members in &mut by_class {
        members.shuffle(&mut rng);
    }

    // water-fill the quotas
    let mut quota = [0usize; N_CLASSES];
    let mut left = n;
    while left > 0 {
        let open: Vec<usize> = (0..N_CLASSES).filter(|&c| quota[c] < by_class[c].len()).collect();
        let share = left / open.len();
        let extra = left % open.len();
        let mut given = 0;
        for (k, &c) in open.iter().enumerate() {
            let want = share + usize::from(k < extra);
            let take = want.min(by_class[c].len() - quota[c]);
            quota[c] += take;
            given += take;
        }
        left -= given;
    }

    let mut picked: Vec<usize> = (0..N_CLASSES)
        .flat_map(|c| by_class[c][..quota[c]].iter().copied())
        .collect();
    picked.shuffle(&mut rng);
    Ok(set.select(&picked))
}
