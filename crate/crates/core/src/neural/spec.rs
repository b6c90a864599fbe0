use super::NeuralError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvKind {
    /// `H' = act(Â H W + b)`
    Spectral,
    /// `H' = act(Σ_{k<order} T_k(L̃) H W_k + b)`
    Chebyshev { order: usize },
}

impl ConvKind {
    pub const DEFAULT_CHEBYSHEV_ORDER: usize = 3;

    pub fn chebyshev() -> Self {
        ConvKind::Chebyshev {
            order: Self::DEFAULT_CHEBYSHEV_ORDER,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ConvKind::Spectral => "spectral",
            ConvKind::Chebyshev { .. } => "chebyshev",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    Spectral,
    Chebyshev(usize),
    Dense,
}

/// Shape of one layer: `weight_count` matrices of `fan_in x fan_out` plus a bias.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerShape {
    pub kind: LayerKind,
    pub fan_in: usize,
    pub fan_out: usize,
    pub activated: bool,
}

impl LayerShape {
    pub fn weight_count(&self) -> usize {
        match self.kind {
            LayerKind::Chebyshev(k) => k,
            _ => 1,
        }
    }
}

/// Graph convolutions followed by fully connected layers. Every layer but the
/// last applies a leaky-linear activation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkSpec {
    pub conv_kind: ConvKind,
    pub conv_layers: usize,
    pub hidden_width: usize,
    pub fc_layers: usize,
    pub input_dim: usize,
    pub output_dim: usize,
    pub leaky_slope: f64,
}

impl Default for NetworkSpec {
    fn default() -> Self {
        Self {
            conv_kind: ConvKind::Spectral,
            conv_layers: 8,
            hidden_width: 32,
            fc_layers: 2,
            input_dim: 16,
            output_dim: 3,
            leaky_slope: 0.2,
        }
    }
}

impl NetworkSpec {
    pub fn validate(&self) -> Result<(), NeuralError> {
        let bad = |msg: &str| Err(NeuralError::InvalidSpec(msg.to_string()));
        if self.conv_layers == 0 {
            return bad("at least one graph convolution is required");
        }
        if self.fc_layers == 0 {
            return bad("at least one fully connected layer is required");
        }
        if self.hidden_width == 0 || self.input_dim == 0 || self.output_dim == 0 {
            return bad("layer widths must be positive");
        }
        if let ConvKind::Chebyshev { order } = self.conv_kind {
            if order == 0 {
                return bad("chebyshev order must be positive");
            }
        }
        if !self.leaky_slope.is_finite() {
            return bad("leaky slope must be finite");
        }
        Ok(())
    }

    pub fn layer_shapes(&self) -> Vec<LayerShape> {
        let conv = match self.conv_kind {
            ConvKind::Spectral => LayerKind::Spectral,
            ConvKind::Chebyshev { order } => LayerKind::Chebyshev(order),
        };
        let total = self.conv_layers + self.fc_layers;
        let mut shapes = Vec::with_capacity(total);
        for i in 0..self.conv_layers {
            shapes.push(LayerShape {
                kind: conv,
                fan_in: if i == 0 {
                    self.input_dim
                } else {
                    self.hidden_width
                },
                fan_out: self.hidden_width,
                activated: true,
            });
        }
        for j in 0..self.fc_layers {
            let last = j + 1 == self.fc_layers;
            shapes.push(LayerShape {
                kind: LayerKind::Dense,
                fan_in: self.hidden_width,
                fan_out: if last {
                    self.output_dim
                } else {
                    self.hidden_width
                },
                activated: !last,
            });
        }
        shapes
    }
}
