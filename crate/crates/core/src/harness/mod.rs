//! Config-driven experiment pipelines behind the `snn-fam` binary.
//!
//! Every pipeline is deterministic in `(config, seeds)`: sample `k` of any
//! evaluation draws its input spikes from stream `k` of
//! `encoding.eval_seed`, and fault maps depend only on `(rate, seed)`.

mod config;
mod pipeline;
mod report;
mod sweep;

pub use config::{
    CrossbarConfig, DataConfig, EncodingConfig, ExperimentConfig, ModelConfig, SweepConfig,
    TrainingConfig,
};
pub use pipeline::{
    eval_row, evaluate_on_map, load_datasets, neuron_fault_accuracy, test_accuracy, train_model,
    Datasets, TrainedModel, N_PIXELS,
};
pub use report::{read_csv, read_header, write_csv, NeuronFaultRow, ReportRow, ROW_COLUMNS};
pub use sweep::{
    analyze_neuron_faults, run_sweep, AggregateReport, AggregateRow, SweepOutcome, AGGREGATE_CSV,
    AGGREGATE_JSON, NEURON_COLUMNS, ROWS_FILE,
};

use crate::error::Error;

/// Process exit code for an error: 2 configuration, 3 data or artifact,
/// 4 unmappable plan, 1 anything else.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidParameter(_) => 2,
        Error::Io(_)
        | Error::Csv(_)
        | Error::BadMagic { .. }
        | Error::Truncated { .. }
        | Error::CountMismatch { .. }
        | Error::InvalidLabel { .. }
        | Error::EmptyDataset
        | Error::Format(_)
        | Error::StaleArtifact { .. }
        | Error::DimensionMismatch { .. } => 3,
        Error::Unmappable { .. } => 4,
        Error::NonFinitePotential => 1,
    }
}
