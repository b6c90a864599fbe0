use ndarray::{Array1, Array2};
use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{NetworkSpec, NeuralError};

#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    /// One matrix per basis term (`fan_in x fan_out`); Chebyshev layers hold `K`.
    pub weights: Vec<Array2<f64>>,
    pub bias: Array1<f64>,
}

/// Trainable tensors of a network. Also used to hold gradients and optimizer
/// moments, which share the same layout.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub layers: Vec<LayerParams>,
}

impl ModelParams {
    pub fn zeros(spec: &NetworkSpec) -> Self {
        let layers = spec
            .layer_shapes()
            .iter()
            .map(|s| LayerParams {
                weights: (0..s.weight_count())
                    .map(|_| Array2::zeros((s.fan_in, s.fan_out)))
                    .collect(),
                bias: Array1::zeros(s.fan_out),
            })
            .collect();
        Self { layers }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            layers: self
                .layers
                .iter()
                .map(|l| LayerParams {
                    weights: l
                        .weights
                        .iter()
                        .map(|w| Array2::zeros(w.raw_dim()))
                        .collect(),
                    bias: Array1::zeros(l.bias.len()),
                })
                .collect(),
        }
    }

    /// All tensors in a fixed order: per layer, weights then bias.
    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out = Vec::new();
        for l in &self.layers {
            for w in &l.weights {
                out.push(w.as_slice().expect("standard layout"));
            }
            out.push(l.bias.as_slice().expect("standard layout"));
        }
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::new();
        for l in &mut self.layers {
            for w in &mut l.weights {
                out.push(w.as_slice_mut().expect("standard layout"));
            }
            out.push(l.bias.as_slice_mut().expect("standard layout"));
        }
        out
    }

    pub fn entry_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.tensors().concat()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors()
            .iter()
            .all(|t| t.iter().all(|v| v.is_finite()))
    }

    pub fn same_layout(&self, other: &ModelParams) -> bool {
        self.layers.len() == other.layers.len()
            && self.layers.iter().zip(&other.layers).all(|(a, b)| {
                a.bias.len() == b.bias.len()
                    && a.weights.len() == b.weights.len()
                    && a.weights
                        .iter()
                        .zip(&b.weights)
                        .all(|(x, y)| x.dim() == y.dim())
            })
    }

    pub fn matches_spec(&self, spec: &NetworkSpec) -> bool {
        self.same_layout(&ModelParams::zeros(spec))
    }
}

/// Glorot-uniform weights in `±sqrt(6 / (fan_in + fan_out))`, zero biases.
/// Entries are drawn row-major, layer by layer, from one seeded stream.
pub fn init_network(spec: &NetworkSpec, seed: u64) -> Result<ModelParams, NeuralError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = ModelParams::zeros(spec);
    for layer in &mut params.layers {
        for w in &mut layer.weights {
            let (fan_in, fan_out) = w.dim();
            let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let dist = Uniform::new_inclusive(-bound, bound).expect("finite bound");
            for v in w.iter_mut() {
                *v = dist.sample(&mut rng);
            }
        }
    }
    Ok(params)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseDistribution {
    Uniform { low: f64, high: f64 },
}

/// Fixed random per-vertex input features, sampled once per run.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseInput {
    pub values: Array2<f64>,
    pub seed: u64,
    pub distribution: NoiseDistribution,
}

impl NoiseInput {
    pub const DEFAULT_HIGH: f64 = 0.1;

    pub fn uniform(vertex_count: usize, dim: usize, low: f64, high: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = Uniform::new(low, high).expect("low < high");
        let values = Array2::from_shape_simple_fn((vertex_count, dim), || dist.sample(&mut rng));
        Self {
            values,
            seed,
            distribution: NoiseDistribution::Uniform { low, high },
        }
    }

    /// Uniform on `[0, 0.1)`.
    pub fn standard(vertex_count: usize, dim: usize, seed: u64) -> Self {
        Self::uniform(vertex_count, dim, 0.0, Self::DEFAULT_HIGH, seed)
    }
}
