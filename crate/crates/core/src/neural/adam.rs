use super::{ModelParams, NeuralError};

/// Bias-corrected Adam with per-entry first and second moments.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub first_moment: ModelParams,
    pub second_moment: ModelParams,
    pub step: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub learning_rate: f64,
}

impl AdamState {
    pub const BETA1: f64 = 0.9;
    pub const BETA2: f64 = 0.999;
    pub const EPSILON: f64 = 1e-8;

    pub fn new(params: &ModelParams, learning_rate: f64) -> Self {
        Self::with_betas(params, learning_rate, Self::BETA1, Self::BETA2)
    }

    pub fn with_betas(params: &ModelParams, learning_rate: f64, beta1: f64, beta2: f64) -> Self {
        Self {
            first_moment: params.zeros_like(),
            second_moment: params.zeros_like(),
            step: 0,
            beta1,
            beta2,
            epsilon: Self::EPSILON,
            learning_rate,
        }
    }
}

/// One Adam update. Non-finite gradients are rejected before anything changes.
pub fn adam_step(
    params: &mut ModelParams,
    grads: &ModelParams,
    state: &mut AdamState,
) -> Result<(), NeuralError> {
    if !params.same_layout(grads) || !params.same_layout(&state.first_moment) {
        return Err(NeuralError::Dimension(
            "gradient layout does not match parameters".into(),
        ));
    }
    if !grads.is_finite() {
        return Err(NeuralError::NonFinite("gradient".into()));
    }
    state.step += 1;
    let t = state.step as i32;
    let (b1, b2) = (state.beta1, state.beta2);
    let correction1 = 1.0 - b1.powi(t);
    let correction2 = 1.0 - b2.powi(t);
    let lr = state.learning_rate;
    let eps = state.epsilon;

    let g_all = grads.tensors();
    let m_all = state.first_moment.tensors_mut();
    let v_all = state.second_moment.tensors_mut();
    for (((p, g), m), v) in params
        .tensors_mut()
        .into_iter()
        .zip(g_all)
        .zip(m_all)
        .zip(v_all)
    {
        for i in 0..p.len() {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            let m_hat = m[i] / correction1;
            let v_hat = v[i] / correction2;
            p[i] -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::NetworkSpec;

    fn scalar_spec() -> NetworkSpec {
        NetworkSpec {
            conv_layers: 1,
            fc_layers: 1,
            input_dim: 1,
            hidden_width: 1,
            output_dim: 1,
            ..NetworkSpec::default()
        }
    }

    fn set_first(p: &mut ModelParams, v: f64) {
        p.layers[0].weights[0][[0, 0]] = v;
    }

    fn first(p: &ModelParams) -> f64 {
        p.layers[0].weights[0][[0, 0]]
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        for g in [3.0, -0.02, 1e-3] {
            let mut p = ModelParams::zeros(&scalar_spec());
            let mut grads = p.zeros_like();
            set_first(&mut grads, g);
            let mut state = AdamState::new(&p, 0.01);
            adam_step(&mut p, &grads, &mut state).unwrap();
            assert!((first(&p) + 0.01 * g.signum()).abs() < 1e-6);
            assert_eq!(state.step, 1);
        }
    }

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut p = ModelParams::zeros(&scalar_spec());
        set_first(&mut p, 0.7);
        let grads = p.zeros_like();
        let mut state = AdamState::new(&p, 0.01);
        adam_step(&mut p, &grads, &mut state).unwrap();
        assert_eq!(first(&p), 0.7);
    }

    #[test]
    fn matches_scalar_reference() {
        // independent scalar Adam
        let (lr, b1, b2, eps) = (0.05, 0.9, 0.999, 1e-8);
        let gs = [0.4, -1.3, 0.25];
        let (mut x, mut m, mut v) = (1.5f64, 0.0f64, 0.0f64);
        let mut expected = Vec::new();
        for (k, g) in gs.iter().enumerate() {
            let t = (k + 1) as i32;
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            let mh = m / (1.0 - f64::powi(b1, t));
            let vh = v / (1.0 - f64::powi(b2, t));
            x -= lr * mh / (vh.sqrt() + eps);
            expected.push(x);
        }

        let mut p = ModelParams::zeros(&scalar_spec());
        set_first(&mut p, 1.5);
        let mut state = AdamState::new(&p, lr);
        for (g, want) in gs.iter().zip(&expected) {
            let mut grads = p.zeros_like();
            set_first(&mut grads, *g);
            adam_step(&mut p, &grads, &mut state).unwrap();
            assert!((first(&p) - want).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_finite() {
        let mut p = ModelParams::zeros(&scalar_spec());
        let mut grads = p.zeros_like();
        set_first(&mut grads, f64::NAN);
        let mut state = AdamState::new(&p, 0.01);
        assert!(matches!(
            adam_step(&mut p, &grads, &mut state),
            Err(NeuralError::NonFinite(_))
        ));
        assert_eq!(state.step, 0);
    }
}
