use ndarray::Array2;

use crate::mesh::{build_normalized_adjacency, mean_edge_length, Mesh, VertexGraph};
use crate::metrics::mean_angular_difference;
use crate::neural::{
    adam_step, backward, forward, init_network, AdamState, ModelParams, NetworkSpec, NoiseInput,
};
use crate::preprocess::{laplacian_smooth, VertexMask};

use super::config::CONVERGENCE_WINDOW;
use super::{
    matrix_positions, LossTerms, Objective, RunReport, StepRecord, TrainConfig, TrainError,
};

/// Seed of the fixed noise input, derived from the run seed so that weights
/// and input come from different streams.
pub fn noise_seed(seed: u64) -> u64 {
    seed ^ 0x6e6f_6973_655f_696e
}

/// Objective value and its gradient with respect to every parameter.
pub fn objective_gradient(
    params: &ModelParams,
    spec: &NetworkSpec,
    input: &Array2<f64>,
    graph: &VertexGraph,
    objective: &Objective,
) -> Result<(LossTerms, ModelParams), TrainError> {
    let pass = forward(params, spec, input, graph)?;
    let (terms, upstream) = objective.evaluate_with_grad(&pass.output);
    let grads = backward(params, graph, &pass.cache, &upstream)?;
    Ok((terms, grads))
}

fn max_row_change(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    a.rows()
        .into_iter()
        .zip(b.rows())
        .map(|(x, y)| {
            x.iter()
                .zip(y.iter())
                .map(|(p, q)| (p - q) * (p - q))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

pub fn train_dmp(
    mesh: &Mesh,
    mask: &VertexMask,
    config: &TrainConfig,
    ground_truth: Option<&Mesh>,
) -> Result<RunReport, TrainError> {
    config.validate()?;
    mesh.check_indices()?;
    let n = mesh.vertex_count();
    if mask.len() != n {
        return Err(TrainError::MaskMismatch {
            mask: mask.len(),
            vertices: n,
        });
    }
    if let Some(gt) = ground_truth {
        if gt.faces != mesh.faces || gt.vertex_count() != n {
            return Err(TrainError::GroundTruth(
                "connectivity differs from the input mesh".into(),
            ));
        }
    }
    let mean_edge = mean_edge_length(mesh)?;

    let base = config
        .task
        .predicts_displacements()
        .then(|| laplacian_smooth(mesh, &config.smoothing));
    let objective = Objective::new(
        mesh,
        base.as_ref(),
        mask.clone(),
        config.lambda,
        config.epsilon_norm,
    )?;
    let graph = build_normalized_adjacency(mesh);
    let mut params = init_network(&config.spec, config.seed)?;
    let noise = NoiseInput::standard(n, config.spec.input_dim, noise_seed(config.seed));
    let mut adam = AdamState::with_betas(&params, config.learning_rate, config.beta1, config.beta2);
    let input_mad = ground_truth
        .map(|gt| mean_angular_difference(mesh, gt))
        .transpose()?;

    let mut report = RunReport {
        config: config.clone(),
        records: Vec::new(),
        initial: StepRecord {
            step: 1,
            recon_loss: f64::NAN,
            lap_loss: f64::NAN,
            total_loss: f64::NAN,
            mad: None,
        },
        input_mad,
        best_step: None,
        best_output: None,
        final_output: mesh.clone(),
        base: base.clone(),
        steps_run: 0,
        stopped_early: false,
    };
    let mut best_mad = f64::INFINITY;
    let mut snapshot: Option<Array2<f64>> = None;

    for step in 1..=config.max_steps {
        let pass = forward(&params, &config.spec, &noise.values, &graph)?;
        let (terms, upstream) = objective.evaluate_with_grad(&pass.output);
        report.steps_run = step;
        if !terms.is_finite() {
            log::error!("non-finite loss at step {step}: {terms:?}");
            return Err(TrainError::NonFinite {
                step,
                report: Box::new(report),
            });
        }

        let mut converged = false;
        if let Some(tol) = config.convergence_tolerance {
            if step % CONVERGENCE_WINDOW == 0 {
                if let Some(prev) = &snapshot {
                    converged = max_row_change(prev, &pass.output) < tol * mean_edge;
                }
                snapshot = Some(pass.output.clone());
            }
        }
        let is_last = step == config.max_steps || converged;
        let logged = step % config.log_interval == 0 || is_last;

        if step == 1 || logged {
            let output =
                mesh.with_vertices(matrix_positions(&objective.output_positions(&pass.output)));
            let mad = ground_truth
                .map(|gt| mean_angular_difference(&output, gt))
                .transpose()?;
            let record = StepRecord {
                step,
                recon_loss: terms.recon,
                lap_loss: terms.lap,
                total_loss: terms.total,
                mad,
            };
            if step == 1 {
                report.initial = record;
            }
            if logged {
                log::debug!("step {step}: {record:?}");
                report.records.push(record);
                if let Some(m) = mad {
                    if m < best_mad {
                        best_mad = m;
                        report.best_step = Some(step);
                        report.best_output = Some(output.clone());
                    }
                }
                report.final_output = output;
            }
        }
        if is_last {
            report.stopped_early = converged && step < config.max_steps;
            if report.stopped_early {
                log::info!("converged at step {step}");
            }
            break;
        }

        let grads = backward(&params, &graph, &pass.cache, &upstream)?;
        adam_step(&mut params, &grads, &mut adam)?;
    }
    Ok(report)
}
