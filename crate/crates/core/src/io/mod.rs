//! Dataset ingestion and artifact persistence.

mod artifact;
mod dataset;
mod idx;

pub use artifact::{
    decode_fault_map, decode_model, decode_plan, dump_fault_map, encode_fault_map, encode_model,
    encode_plan, load_fault_map, load_model, load_plan, model_fingerprint, save_fault_map, save_model,
    save_plan,
    Fingerprint,
};
pub use dataset::{subset, LabeledImageSet};
pub use idx::{load_idx, parse_idx_images, parse_idx_labels, write_idx, IMAGES_MAGIC, LABELS_MAGIC};
