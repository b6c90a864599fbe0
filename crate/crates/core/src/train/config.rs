use crate::neural::{AdamState, ConvKind, NetworkSpec};
use crate::preprocess::SmoothingConfig;

use super::TrainError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    /// Regress displacements from the smoothed mesh; every vertex supervised.
    Denoise,
    /// As `Denoise`, but the reconstruction term only covers masked-in vertices.
    Complete,
    /// Regress vertex positions directly, no smoothing subtraction.
    PositionsAblation,
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Denoise => "denoise",
            Task::Complete => "complete",
            Task::PositionsAblation => "positions_ablation",
        }
    }

    pub fn predicts_displacements(&self) -> bool {
        !matches!(self, Task::PositionsAblation)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub task: Task,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Weight of the Laplacian term.
    pub lambda: f64,
    pub max_steps: usize,
    pub log_interval: usize,
    pub seed: u64,
    pub smoothing: SmoothingConfig,
    pub spec: NetworkSpec,
    /// Added under every square root of the non-squared norms.
    pub epsilon_norm: f64,
    /// Stop once no vertex moved more than this fraction of the mean edge
    /// length over the last 100 steps. `None` runs the full budget.
    pub convergence_tolerance: Option<f64>,
}

/// Window over which output movement is measured for early stopping.
pub const CONVERGENCE_WINDOW: usize = 100;

impl TrainConfig {
    pub fn denoise() -> Self {
        Self {
            task: Task::Denoise,
            learning_rate: 0.01,
            beta1: AdamState::BETA1,
            beta2: AdamState::BETA2,
            lambda: 0.2,
            max_steps: 4000,
            log_interval: 10,
            seed: 0,
            smoothing: SmoothingConfig::denoising(),
            spec: NetworkSpec::default(),
            epsilon_norm: 1e-12,
            convergence_tolerance: None,
        }
    }

    pub fn complete() -> Self {
        Self {
            task: Task::Complete,
            learning_rate: 0.001,
            lambda: 0.03,
            max_steps: 8000,
            smoothing: SmoothingConfig::completion(),
            ..Self::denoise()
        }
    }

    /// Denoising hyperparameters, predicting positions instead of displacements.
    pub fn positions_ablation() -> Self {
        Self {
            task: Task::PositionsAblation,
            ..Self::denoise()
        }
    }

    pub fn with_conv(mut self, kind: ConvKind) -> Self {
        self.spec.conv_kind = kind;
        self
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: String| Err(TrainError::Config(m));
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return bad(format!(
                "learning rate {} must be positive",
                self.learning_rate
            ));
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return bad(format!("lambda {} must be non-negative", self.lambda));
        }
        if self.max_steps == 0 {
            return bad("max_steps must be at least 1".into());
        }
        if self.log_interval == 0 {
            return bad("log_interval must be at least 1".into());
        }
        if !(self.epsilon_norm > 0.0) {
            return bad(format!(
                "epsilon_norm {} must be positive",
                self.epsilon_norm
            ));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return bad("Adam betas must lie in [0, 1)".into());
        }
        SmoothingConfig::new(self.smoothing.step_size, self.smoothing.iterations)
            .map_err(|e| TrainError::Config(e.to_string()))?;
        if self.spec.output_dim != 3 {
            return bad("network output must be 3-dimensional".into());
        }
        self.spec
            .validate()
            .map_err(|e| TrainError::Config(e.to_string()))?;
        Ok(())
    }

    /// Key/value echo used in report headers.
    pub fn describe(&self) -> Vec<(&'static str, String)> {
        let conv = match self.spec.conv_kind {
            ConvKind::Spectral => "spectral".to_string(),
            ConvKind::Chebyshev { order } => format!("chebyshev(K={order})"),
        };
        vec![
            ("task", self.task.name().to_string()),
            ("learning_rate", format!("{:?}", self.learning_rate)),
            ("betas", format!("{:?},{:?}", self.beta1, self.beta2)),
            ("lambda", format!("{:?}", self.lambda)),
            ("max_steps", self.max_steps.to_string()),
            ("log_interval", self.log_interval.to_string()),
            ("seed", self.seed.to_string()),
            ("smoothing_step", format!("{:?}", self.smoothing.step_size)),
            (
                "smoothing_iterations",
                self.smoothing.iterations.to_string(),
            ),
            ("conv", conv),
            ("conv_layers", self.spec.conv_layers.to_string()),
            ("hidden_width", self.spec.hidden_width.to_string()),
            ("fc_layers", self.spec.fc_layers.to_string()),
            ("input_dim", self.spec.input_dim.to_string()),
            ("leaky_slope", format!("{:?}", self.spec.leaky_slope)),
            ("epsilon_norm", format!("{:?}", self.epsilon_norm)),
            (
                "convergence_tolerance",
                self.convergence_tolerance
                    .map_or("none".to_string(), |t| format!("{t:?}")),
            ),
        ]
    }
}
