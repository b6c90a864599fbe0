use super::ModelParams;

/// Central differences `(f(θ + h e_i) - f(θ - h e_i)) / 2h` for every entry.
pub fn finite_difference_gradient<F>(mut loss: F, params: &ModelParams, h: f64) -> ModelParams
where
    F: FnMut(&ModelParams) -> f64,
{
    let mut grads = params.zeros_like();
    let mut probe = params.clone();
    let shapes: Vec<usize> = params.tensors().iter().map(|t| t.len()).collect();
    for (t, &len) in shapes.iter().enumerate() {
        for i in 0..len {
            let original = params.tensors()[t][i];
            probe.tensors_mut()[t][i] = original + h;
            let plus = loss(&probe);
            probe.tensors_mut()[t][i] = original - h;
            let minus = loss(&probe);
            probe.tensors_mut()[t][i] = original;
            grads.tensors_mut()[t][i] = (plus - minus) / (2.0 * h);
        }
    }
    grads
}

/// Largest entrywise `|a - b| / max(|a|, |b|, floor)`.
pub fn max_relative_error(a: &ModelParams, b: &ModelParams, floor: f64) -> f64 {
    a.flatten()
        .iter()
        .zip(b.flatten())
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(floor))
        .fold(0.0, f64::max)
}
