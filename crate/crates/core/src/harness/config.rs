use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cost::HwConstants;
use crate::error::{Error, Result};
use crate::fam::Strategy;
use crate::fault::{CrossbarGeometry, NeuronFaultTag, NeuronGranularity};
use crate::io::Fingerprint;
use crate::snn::{Homeostasis, LifParams, RateEncoder, StdpParams};

/// One experiment, read from a TOML file. Relative paths resolve against the
/// directory holding the config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Tag written into every report row.
    pub workload: String,
    pub model: ModelConfig,
    pub training: TrainingConfig,
    pub encoding: EncodingConfig,
    pub data: DataConfig,
    pub crossbar: CrossbarConfig,
    pub sweep: SweepConfig,
    pub hardware: HwConstants,
    pub output_dir: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub n_neurons: usize,
    pub inhibition_strength: f32,
    /// Initial weights are uniform in `[0, init_max]`.
    pub init_max: f32,
    pub lif: LifParams,
    pub stdp: StdpParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainingConfig {
    pub epochs: usize,
    pub seed: u64,
    pub column_norm: Option<f32>,
    pub homeostasis: Option<Homeostasis>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EncodingConfig {
    pub steps_per_sample: usize,
    pub max_rate: f64,
    /// Seed of the input spike trains used for labeling and evaluation.
    pub eval_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataConfig {
    pub train_images: PathBuf,
    pub train_labels: PathBuf,
    pub test_images: PathBuf,
    pub test_labels: PathBuf,
    pub train_subset: usize,
    pub test_subset: usize,
    pub subset_seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CrossbarConfig {
    pub rows: usize,
    pub cols: usize,
    pub granularity: NeuronGranularity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub strategies: Vec<Strategy>,
    pub rates: Vec<f64>,
    pub seeds: Vec<u64>,
    /// Fault kinds and rates for the single-kind neuron analysis.
    pub neuron_kinds: Vec<NeuronFaultTag>,
    pub neuron_rates: Vec<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            workload: "mnist".into(),
            model: ModelConfig::default(),
            training: TrainingConfig::default(),
            encoding: EncodingConfig::default(),
            data: DataConfig::default(),
            crossbar: CrossbarConfig::default(),
            sweep: SweepConfig::default(),
            hardware: HwConstants::default(),
            output_dir: "out".into(),
        }
    }
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            n_neurons: 100,
            inhibition_strength: 80.0,
            init_max: 0.1,
            lif: LifParams::default(),
            stdp: StdpParams::default(),
        }
    }
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            epochs: 2,
            seed: 1,
            column_norm: Some(60.0),
            homeostasis: Some(Homeostasis {
                theta_plus: 0.25,
                theta_decay: 0.99999,
            }),
        }
    }
}

impl Default for EncodingConfig {
    fn default() -> Self {
        EncodingConfig {
            steps_per_sample: 150,
            max_rate: 0.25,
            eval_seed: 1000,
        }
    }
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            train_images: "train-images-idx3-ubyte.gz".into(),
            train_labels: "train-labels-idx1-ubyte.gz".into(),
            test_images: "t10k-images-idx3-ubyte.gz".into(),
            test_labels: "t10k-labels-idx1-ubyte.gz".into(),
            train_subset: 5000,
            test_subset: 1000,
            subset_seed: 0,
        }
    }
}

impl Default for CrossbarConfig {
    fn default() -> Self {
        CrossbarConfig {
            rows: 256,
            cols: 256,
            granularity: NeuronGranularity::PerNeuron,
        }
    }
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            strategies: Strategy::ALL.to_vec(),
            rates: vec![0.0, 0.1, 0.25, 0.5],
            seeds: vec![1, 2, 3],
            neuron_kinds: NeuronFaultTag::FAULTY.to_vec(),
            neuron_rates: vec![0.0, 0.05, 0.1, 0.2, 0.3],
        }
    }
}

impl ExperimentConfig {
    /// Reads and validates a config; relative paths are resolved against the
    /// config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        cfg.resolve_paths(path.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let d = &mut self.data;
        for p in [
            &mut d.train_images,
            &mut d.train_labels,
            &mut d.test_images,
            &mut d.test_labels,
            &mut self.output_dir,
        ] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.model.n_neurons == 0 {
            return bad("model.n_neurons must be positive".into());
        }
        if self.crossbar.rows == 0 || self.crossbar.cols == 0 {
            return bad("crossbar dimensions must be positive".into());
        }
        if self.encoding.steps_per_sample == 0 {
            return bad("encoding.steps_per_sample must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.encoding.max_rate) {
            return bad("encoding.max_rate must lie in [0, 1]".into());
        }
        for &r in self.sweep.rates.iter().chain(&self.sweep.neuron_rates) {
            if !(0.0..=1.0).contains(&r) {
                return bad(format!("fault rate {r} outside [0, 1]"));
            }
        }
        if self.sweep.neuron_kinds.contains(&NeuronFaultTag::None) {
            return bad("sweep.neuron_kinds cannot contain \"none\"".into());
        }
        if self.data.train_subset == 0 || self.data.test_subset == 0 {
            return bad("dataset subsets must be non-empty".into());
        }
        let wrap = |e: Error| Error::Config(e.to_string());
        self.model.lif.validate().map_err(wrap)?;
        self.model.stdp.validate().map_err(wrap)?;
        self.hardware.validate().map_err(wrap)?;
        if let Some(h) = &self.training.homeostasis {
            h.validate().map_err(wrap)?;
        }
        if !(self.model.inhibition_strength >= 0.0 && self.model.inhibition_strength.is_finite()) {
            return bad("model.inhibition_strength must be finite and >= 0".into());
        }
        if !(self.model.init_max >= 0.0 && self.model.init_max <= 1.0) {
            return bad("model.init_max must lie in [0, 1]".into());
        }
        Ok(())
    }

    /// Fails with a data error naming the first missing dataset file.
    pub fn check_data_files(&self) -> Result<()> {
        let d = &self.data;
        for p in [&d.train_images, &d.train_labels, &d.test_images, &d.test_labels] {
            if !p.is_file() {
                return Err(Error::Io(std::io::Error::new(
                    std::io::ErrorKind::NotFound,
                    format!("dataset file {} not found", p.display()),
                )));
            }
        }
        Ok(())
    }

    /// Digest of the canonical JSON form. Output location does not count.
    pub fn fingerprint(&self) -> Fingerprint {
        let mut canonical = self.clone();
        canonical.output_dir = PathBuf::new();
        let json = serde_json::to_vec(&canonical).expect("config serializes");
        Fingerprint(Sha256::digest(json).into())
    }

    pub fn geometry(&self) -> Result<CrossbarGeometry> {
        CrossbarGeometry::new(self.crossbar.rows, self.crossbar.cols)
    }

    pub fn encoder(&self) -> Result<RateEncoder> {
        RateEncoder::new(
            crate::harness::N_PIXELS,
            self.encoding.steps_per_sample,
            self.encoding.max_rate,
        )
    }
}
