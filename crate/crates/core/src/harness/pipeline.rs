use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cost::{estimate_cost, CostReport};
use crate::error::{Error, Result};
use crate::fam::{build_plan, Strategy};
use crate::fault::{corrupt_weight_matrix, FaultMap, NeuronFaultTag};
use crate::io::{load_idx, subset, Fingerprint, LabeledImageSet};
use crate::snn::{assign_labels, evaluate, train_stdp, Simulator, SnnModel, TrainOptions};

use super::config::ExperimentConfig;
use super::report::ReportRow;

/// Pixels per MNIST-format image.
pub const N_PIXELS: usize = 28 * 28;

#[derive(Clone, Debug)]
pub struct Datasets {
    pub train: LabeledImageSet,
    pub test: LabeledImageSet,
}

/// Loads both splits and draws the configured stratified subsets.
pub fn load_datasets(cfg: &ExperimentConfig) -> Result<Datasets> {
    cfg.check_data_files()?;
    let d = &cfg.data;
    let train = load_idx(&d.train_images, &d.train_labels)?;
    let test = load_idx(&d.test_images, &d.test_labels)?;
    for set in [&train, &test] {
        if set.n_pixels() != N_PIXELS {
            return Err(Error::dims("image pixels", N_PIXELS, set.n_pixels()));
        }
    }
    Ok(Datasets {
        train: subset(&train, d.train_subset, d.subset_seed)?,
        test: subset(&test, d.test_subset, d.subset_seed.wrapping_add(1))?,
    })
}

#[derive(Clone, Debug)]
pub struct TrainedModel {
    pub model: SnnModel,
    pub fault_free_accuracy: f64,
}

impl TrainedModel {
    pub fn fingerprint(&self) -> Fingerprint {
        self.model.fingerprint()
    }
}

/// Trains on fault-free hardware, labels neurons on the training subset and
/// measures test accuracy.
pub fn train_model(cfg: &ExperimentConfig, data: &Datasets, seed: u64) -> Result<TrainedModel> {
    let m = &cfg.model;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init = SnnModel::with_random_weights(
        N_PIXELS,
        m.n_neurons,
        m.lif,
        m.stdp.clone(),
        m.inhibition_strength,
        m.init_max,
        &mut rng,
    )?;
    let encoder = cfg.encoder()?;
    let options = TrainOptions {
        epochs: cfg.training.epochs,
        encoder,
        column_norm: cfg.training.column_norm,
        homeostasis: cfg.training.homeostasis,
    };
    let mut model = train_stdp(&init, &data.train, &options, &mut rng)?;
    model.training_seed = seed;
    model.neuron_labels = assign_labels(&model, &data.train, &encoder, cfg.encoding.eval_seed)?;
    let fault_free_accuracy = test_accuracy(cfg, &model, &data.test)?;
    Ok(TrainedModel {
        model,
        fault_free_accuracy,
    })
}

/// Fault-free accuracy of an already labeled model.
pub fn test_accuracy(cfg: &ExperimentConfig, model: &SnnModel, test: &LabeledImageSet) -> Result<f64> {
    let sim = Simulator::new(model, None, None)?;
    Ok(evaluate(&sim, &model.neuron_labels, test, &cfg.encoder()?, cfg.encoding.eval_seed)?.accuracy())
}

/// Accuracy and cost of running `model` on the chip described by `map`.
///
/// Weights are read back through the plan's rotations and the stuck bits;
/// each neuron inherits the fault of the column it was placed on.
pub fn evaluate_on_map(
    cfg: &ExperimentConfig,
    model: &SnnModel,
    map: &FaultMap,
    strategy: Strategy,
    test: &LabeledImageSet,
) -> Result<(f64, CostReport)> {
    let plan = build_plan(strategy, map, model.n_inputs(), model.n_neurons())?;
    let effective = corrupt_weight_matrix(model.weights(), model.n_inputs(), map, &plan)?;
    let overlay = plan.neuron_overlay(map)?;
    let sim = Simulator::new(model, Some(&overlay), Some(&effective))?;
    let eval = evaluate(&sim, &model.neuron_labels, test, &cfg.encoder()?, cfg.encoding.eval_seed)?;
    let cost = estimate_cost(&plan, cfg.encoding.steps_per_sample, &cfg.hardware)?;
    Ok((eval.accuracy(), cost))
}

/// Like [`evaluate_on_map`] but folds failures into the row status.
pub fn eval_row(
    cfg: &ExperimentConfig,
    model: &SnnModel,
    map: &FaultMap,
    strategy: Strategy,
    test: &LabeledImageSet,
) -> ReportRow {
    let mut row = ReportRow::pending(cfg, model.n_neurons(), strategy, map.fault_rate(), map.seed());
    match evaluate_on_map(cfg, model, map, strategy, test) {
        Ok((accuracy, cost)) => row.fill(accuracy, &cost),
        Err(Error::Unmappable { .. }) => row.status = ReportRow::UNMAPPABLE.into(),
        Err(e) => row.status = format!("error: {e}"),
    }
    row
}

/// Accuracy with only `kind` neuron faults at `rate` and clean synapses,
/// mapped without mitigation.
pub fn neuron_fault_accuracy(
    cfg: &ExperimentConfig,
    model: &SnnModel,
    kind: NeuronFaultTag,
    rate: f64,
    seed: u64,
    test: &LabeledImageSet,
) -> Result<f64> {
    let map = crate::fault::generate_neuron_fault_map(cfg.geometry()?, kind, rate, seed)?;
    Ok(evaluate_on_map(cfg, model, &map, Strategy::Baseline, test)?.0)
}
