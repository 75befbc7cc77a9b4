//! Transition storage, outcome partitioning, persistence and the
//! ratio-stratified batch sampler.

mod dataset;
mod encode;
mod io;
mod sampler;

pub use dataset::{DatasetMeta, OfflineDataset, Outcome, Transition};
pub use encode::StateEncoder;
pub use io::{load_dataset, parse_dataset, save_dataset, write_dataset, DATASET_MAGIC, DATASET_SCHEMA};
pub use sampler::{collision_count, sample_exp, sample_mixed, sample_pooled, BatchIndex, SamplerConfig, Source};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum DataError {
    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("dataset format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },
    #[error("dataset invariant violated: {0}")]
    Invariant(String),
    #[error("i/o error: {0}")]
    Io(String),
}
