//! Objective, optimization loop and run bookkeeping.

mod config;
mod loss;
mod report;
mod run;

pub use config::{Task, TrainConfig, CONVERGENCE_WINDOW};
pub use loss::{
    laplacian_loss, matrix_positions, positions_matrix, reconstruction_loss, total_loss, LossTerms,
    Objective,
};
pub use report::{select_output_step, RunReport, SelectionPolicy, StepRecord};
pub use run::{noise_seed, objective_gradient, train_dmp};

use thiserror::Error;

use crate::mesh::MeshError;
use crate::metrics::MetricsError;
use crate::neural::NeuralError;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("mask covers {mask} vertices but the mesh has {vertices}")]
    MaskMismatch { mask: usize, vertices: usize },
    #[error("ground truth: {0}")]
    GroundTruth(String),
    #[error("best-MAD selection needs a ground-truth mesh")]
    MissingGroundTruth,
    #[error("report has no records")]
    EmptyReport,
    #[error("non-finite loss at step {step}")]
    NonFinite { step: usize, report: Box<RunReport> },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Neural(#[from] NeuralError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}
