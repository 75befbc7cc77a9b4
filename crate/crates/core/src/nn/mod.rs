//! Small numerical core: feed-forward networks with exact reverse-mode
//! gradients, Adam, soft target updates and a squashed Gaussian policy.

mod adam;
mod checkpoint;
mod mlp;
mod policy;
mod scalar;

pub use adam::{soft_update, AdamState};
pub use checkpoint::{Checkpoint, NetKind, NetRecord, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use mlp::{Activation, Arch, Mlp, Tape};
pub use policy::{GaussianPolicy, BOUND_MARGIN, LOG_STD_MAX, LOG_STD_MIN};
pub use scalar::Scalar;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum NnError {
    #[error("{what}: expected {expected} values, found {found}")]
    Shape { what: &'static str, expected: usize, found: usize },
    #[error("non-finite value produced in layer {layer}")]
    NonFinite { layer: usize },
    #[error("non-finite gradient at parameter {index}")]
    NonFiniteGradient { index: usize },
    #[error("invalid network configuration: {0}")]
    Config(String),
    #[error("checkpoint format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}
