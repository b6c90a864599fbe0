//! Forward pass and hand-derived reverse pass for the fixed layer set.

use ndarray::{Array2, Axis};

use super::spec::{LayerKind, LayerShape};
use super::{ModelParams, NetworkSpec, NeuralError};
use crate::mesh::VertexGraph;

#[derive(Debug, Clone)]
enum LayerInput {
    /// `Â H` for spectral layers.
    Propagated(Array2<f64>),
    /// `T_0(L̃) H, ..., T_{K-1}(L̃) H`.
    Chebyshev(Vec<Array2<f64>>),
    /// Plain `H` for dense layers.
    Dense(Array2<f64>),
}

#[derive(Debug, Clone)]
struct LayerCache {
    shape: LayerShape,
    input: LayerInput,
    pre_activation: Array2<f64>,
}

/// Intermediates retained by [`forward`] for [`backward`].
#[derive(Debug, Clone)]
pub struct ForwardCache {
    layers: Vec<LayerCache>,
    leaky_slope: f64,
    vertex_count: usize,
}

#[derive(Debug, Clone)]
pub struct ForwardPass {
    /// Per-vertex output, `vertex_count x output_dim`.
    pub output: Array2<f64>,
    pub cache: ForwardCache,
}

fn leaky(z: &Array2<f64>, slope: f64) -> Array2<f64> {
    z.mapv(|v| if v > 0.0 { v } else { slope * v })
}

fn check_shapes(
    params: &ModelParams,
    spec: &NetworkSpec,
    input: &Array2<f64>,
    graph: &VertexGraph,
) -> Result<(), NeuralError> {
    spec.validate()?;
    if !params.matches_spec(spec) {
        return Err(NeuralError::Dimension(
            "parameters do not match the network spec".into(),
        ));
    }
    if input.nrows() != graph.vertex_count() || input.ncols() != spec.input_dim {
        return Err(NeuralError::Dimension(format!(
            "input is {}x{}, expected {}x{}",
            input.nrows(),
            input.ncols(),
            graph.vertex_count(),
            spec.input_dim
        )));
    }
    Ok(())
}

/// Chebyshev basis `T_k(L̃) H` for `k < order` via `T_k = 2 L̃ T_{k-1} - T_{k-2}`.
fn chebyshev_basis(graph: &VertexGraph, h: &Array2<f64>, order: usize) -> Vec<Array2<f64>> {
    let lap = &graph.scaled_laplacian;
    let mut basis = Vec::with_capacity(order);
    basis.push(h.clone());
    if order > 1 {
        basis.push(lap.apply(h));
    }
    for k in 2..order {
        let next = lap.apply(&basis[k - 1]) * 2.0 - &basis[k - 2];
        basis.push(next);
    }
    basis
}

pub fn forward(
    params: &ModelParams,
    spec: &NetworkSpec,
    input: &Array2<f64>,
    graph: &VertexGraph,
) -> Result<ForwardPass, NeuralError> {
    check_shapes(params, spec, input, graph)?;
    let shapes = spec.layer_shapes();
    let mut caches = Vec::with_capacity(shapes.len());
    let mut h = input.clone();

    for (shape, layer) in shapes.iter().zip(&params.layers) {
        let (cached, mut z) = match shape.kind {
            LayerKind::Spectral => {
                let p = graph.propagation.apply(&h);
                let z = p.dot(&layer.weights[0]);
                (LayerInput::Propagated(p), z)
            }
            LayerKind::Chebyshev(order) => {
                let basis = chebyshev_basis(graph, &h, order);
                let mut z = basis[0].dot(&layer.weights[0]);
                for (t, w) in basis.iter().zip(&layer.weights).skip(1) {
                    z += &t.dot(w);
                }
                (LayerInput::Chebyshev(basis), z)
            }
            LayerKind::Dense => {
                let z = h.dot(&layer.weights[0]);
                (LayerInput::Dense(h), z)
            }
        };
        z += &layer.bias;
        h = if shape.activated {
            leaky(&z, spec.leaky_slope)
        } else {
            z.clone()
        };
        caches.push(LayerCache {
            shape: *shape,
            input: cached,
            pre_activation: z,
        });
    }

    Ok(ForwardPass {
        output: h,
        cache: ForwardCache {
            layers: caches,
            leaky_slope: spec.leaky_slope,
            vertex_count: graph.vertex_count(),
        },
    })
}

/// Gradients of `<upstream, output>` with respect to every parameter.
/// Uses `Âᵀ = Â` and `L̃ᵀ = L̃`.
pub fn backward(
    params: &ModelParams,
    graph: &VertexGraph,
    cache: &ForwardCache,
    upstream: &Array2<f64>,
) -> Result<ModelParams, NeuralError> {
    let last = cache
        .layers
        .last()
        .ok_or_else(|| NeuralError::Dimension("empty cache".into()))?;
    if upstream.dim() != last.pre_activation.dim() {
        return Err(NeuralError::Dimension(format!(
            "upstream gradient is {:?}, output is {:?}",
            upstream.dim(),
            last.pre_activation.dim()
        )));
    }
    if params.layers.len() != cache.layers.len() || graph.vertex_count() != cache.vertex_count {
        return Err(NeuralError::Dimension(
            "cache does not belong to these parameters".into(),
        ));
    }

    let mut grads = params.zeros_like();
    let mut delta = upstream.clone();
    let slope = cache.leaky_slope;

    for (idx, layer) in cache.layers.iter().enumerate().rev() {
        if layer.shape.activated {
            ndarray::Zip::from(&mut delta)
                .and(&layer.pre_activation)
                .for_each(|d, &z| {
                    if z <= 0.0 {
                        *d *= slope;
                    }
                });
        }
        let weights = &params.layers[idx].weights;
        let grad = &mut grads.layers[idx];
        grad.bias = delta.sum_axis(Axis(0));
        let need_input_grad = idx > 0;

        delta = match &layer.input {
            LayerInput::Propagated(p) => {
                grad.weights[0] = p.t().dot(&delta);
                if need_input_grad {
                    graph.propagation.apply(&delta.dot(&weights[0].t()))
                } else {
                    delta
                }
            }
            LayerInput::Dense(h) => {
                grad.weights[0] = h.t().dot(&delta);
                if need_input_grad {
                    delta.dot(&weights[0].t())
                } else {
                    delta
                }
            }
            LayerInput::Chebyshev(basis) => {
                for (g, t) in grad.weights.iter_mut().zip(basis) {
                    *g = t.t().dot(&delta);
                }
                if need_input_grad {
                    let coeffs: Vec<Array2<f64>> =
                        weights.iter().map(|w| delta.dot(&w.t())).collect();
                    clenshaw_transpose(graph, &coeffs)
                } else {
                    delta
                }
            }
        };
    }
    Ok(grads)
}

/// `Σ_k T_k(L̃) c_k` by Clenshaw's recurrence.
fn clenshaw_transpose(graph: &VertexGraph, coeffs: &[Array2<f64>]) -> Array2<f64> {
    let lap = &graph.scaled_laplacian;
    let order = coeffs.len();
    if order == 1 {
        return coeffs[0].clone();
    }
    let zeros = Array2::<f64>::zeros(coeffs[0].raw_dim());
    let mut b1 = zeros.clone(); // b_{k+1}
    let mut b2 = zeros; // b_{k+2}
    for k in (1..order).rev() {
        let bk = &coeffs[k] + &(lap.apply(&b1) * 2.0) - &b2;
        b2 = b1;
        b1 = bk;
    }
    &coeffs[0] + &lap.apply(&b1) - &b2
}
