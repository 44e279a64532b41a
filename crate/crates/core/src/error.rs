use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("membrane potential became non-finite")]
    NonFinitePotential,

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("unmappable: all {cols} crossbar columns are excluded")]
    Unmappable { cols: usize },

    #[error("{}: bad magic number, expected {expected:#010x}, found {found:#010x}", path.display())]
    BadMagic {
        path: PathBuf,
        expected: u32,
        found: u32,
    },

    #[error("{}: truncated, expected {expected} bytes, found {actual}", path.display())]
    Truncated {
        path: PathBuf,
        expected: usize,
        actual: usize,
    },

    #[error("image/label count mismatch: {images} images, {labels} labels")]
    CountMismatch { images: usize, labels: usize },

    #[error("label {label} at index {index} is not a class id in 0..10")]
    InvalidLabel { index: usize, label: u8 },

    #[error("malformed artifact: {0}")]
    Format(String),

    #[error("plan was built against fault map {expected}, but fault map {actual} was supplied")]
    StaleArtifact { expected: String, actual: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn dims(what: &'static str, expected: usize, actual: usize) -> Self {
        Error::DimensionMismatch {
            what,
            expected,
            actual,
        }
    }
}
