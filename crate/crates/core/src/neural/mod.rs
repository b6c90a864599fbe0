//! Graph network mapping fixed per-vertex noise to per-vertex 3-vectors,
//! with exact gradients, Adam, and a finite-difference oracle.

mod adam;
mod checkpoint;
mod gradcheck;
mod network;
mod params;
mod spec;

pub use adam::{adam_step, AdamState};
pub use checkpoint::{load_params, save_params};
pub use gradcheck::{finite_difference_gradient, max_relative_error};
pub use network::{backward, forward, ForwardCache, ForwardPass};
pub use params::{init_network, LayerParams, ModelParams, NoiseDistribution, NoiseInput};
pub use spec::{ConvKind, LayerKind, LayerShape, NetworkSpec};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NeuralError {
    #[error("invalid network spec: {0}")]
    InvalidSpec(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite {0}")]
    NonFinite(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}
