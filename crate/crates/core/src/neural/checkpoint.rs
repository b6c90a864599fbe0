//! Plain-text parameter dump: a version header, then every tensor's shape
//! followed by its row-major entries in shortest round-trip notation.

use std::fmt::Write;

use ndarray::{Array1, Array2};

use super::{LayerParams, ModelParams, NeuralError};

const HEADER: &str = "dmp-params 1";

pub fn save_params(params: &ModelParams) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "layers {}", params.layers.len()).unwrap();
    for layer in &params.layers {
        writeln!(out, "layer {}", layer.weights.len()).unwrap();
        for w in &layer.weights {
            writeln!(out, "weight {} {}", w.nrows(), w.ncols()).unwrap();
            write_values(&mut out, w.iter());
        }
        writeln!(out, "bias {}", layer.bias.len()).unwrap();
        write_values(&mut out, layer.bias.iter());
    }
    out
}

fn write_values<'a>(out: &mut String, values: impl Iterator<Item = &'a f64>) {
    let mut first = true;
    for v in values {
        if !first {
            out.push(' ');
        }
        write!(out, "{v:?}").unwrap();
        first = false;
    }
    out.push('\n');
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, &'a str), NeuralError> {
        self.inner
            .next()
            .map(|(i, l)| (i + 1, l))
            .ok_or_else(|| NeuralError::Checkpoint("unexpected end of checkpoint".into()))
    }

    fn header(&mut self, keyword: &str, arity: usize) -> Result<Vec<usize>, NeuralError> {
        let (no, line) = self.next()?;
        let mut tokens = line.split_whitespace();
        if tokens.next() != Some(keyword) {
            return Err(NeuralError::Checkpoint(format!(
                "line {no}: expected `{keyword}`"
            )));
        }
        let nums = tokens
            .map(|t| t.parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| NeuralError::Checkpoint(format!("line {no}: {e}")))?;
        if nums.len() != arity {
            return Err(NeuralError::Checkpoint(format!(
                "line {no}: `{keyword}` takes {arity} values"
            )));
        }
        Ok(nums)
    }

    fn values(&mut self, count: usize) -> Result<Vec<f64>, NeuralError> {
        let (no, line) = self.next()?;
        let values = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| NeuralError::Checkpoint(format!("line {no}: {e}")))?;
        if values.len() != count {
            return Err(NeuralError::Checkpoint(format!(
                "line {no}: expected {count} values, found {}",
                values.len()
            )));
        }
        Ok(values)
    }
}

pub fn load_params(text: &str) -> Result<ModelParams, NeuralError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (_, header) = lines.next()?;
    if header.trim() != HEADER {
        return Err(NeuralError::Checkpoint(format!(
            "unsupported header `{}`",
            header.trim()
        )));
    }
    let layer_count = lines.header("layers", 1)?[0];
    let mut layers = Vec::with_capacity(layer_count);
    for _ in 0..layer_count {
        let weight_count = lines.header("layer", 1)?[0];
        let mut weights = Vec::with_capacity(weight_count);
        for _ in 0..weight_count {
            let dims = lines.header("weight", 2)?;
            let values = lines.values(dims[0] * dims[1])?;
            weights.push(Array2::from_shape_vec((dims[0], dims[1]), values).expect("counted"));
        }
        let len = lines.header("bias", 1)?[0];
        let bias = Array1::from(lines.values(len)?);
        layers.push(LayerParams { weights, bias });
    }
    Ok(ModelParams { layers })
}
