//! Desk-scale benchmarks and the ablation run matrices shared by the CLI
//! and the acceptance tests.

use std::fmt::Write;

use thiserror::Error;

use crate::mesh::{validate_mesh, Mesh, MeshError, Vec3};
use crate::metrics::{region_rmse, MetricsError};
use crate::preprocess::{
    add_gaussian_noise, fill_holes, remove_cap, BumpyShape, BumpySphere, CapCut, PreprocessError,
    SmoothingConfig, VertexMask,
};
use crate::train::{train_dmp, RunReport, SelectionPolicy, Task, TrainConfig, TrainError};

#[derive(Debug, Error)]
pub enum StudyError {
    #[error("invalid study input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Preprocess(#[from] PreprocessError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkParams {
    pub subdivisions: u32,
    pub bump_count: usize,
    pub bump_height: f64,
    /// Angular radius of each bump, radians.
    pub bump_radius: f64,
    /// Noise standard deviation as a fraction of the mean edge length.
    pub noise: f64,
    pub shape_seed: u64,
    pub noise_seed: u64,
}

impl Default for BenchmarkParams {
    fn default() -> Self {
        Self {
            subdivisions: 4,
            bump_count: 30,
            bump_height: 0.1,
            bump_radius: BumpySphere::DEFAULT_CAP_RADIUS,
            noise: 0.2,
            shape_seed: 0,
            noise_seed: 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Benchmark {
    pub params: BenchmarkParams,
    pub shape: BumpyShape,
    pub clean: Mesh,
    pub noisy: Mesh,
}

#[derive(Debug, Clone)]
pub struct CompletionBenchmark {
    pub shape: BumpyShape,
    pub hole_center: Vec3,
    pub hole_radius: f64,
    pub cut: CapCut,
    pub filled: Mesh,
    pub mask: VertexMask,
    /// Filled mesh projected onto the analytic surface.
    pub reference: Mesh,
}

impl BenchmarkParams {
    fn shape(&self) -> BumpyShape {
        BumpySphere {
            cap_radius: self.bump_radius,
            ..BumpySphere::new(
                self.subdivisions,
                self.bump_count,
                self.bump_height,
                self.shape_seed,
            )
        }
        .build()
    }

    pub fn build(&self) -> Result<Benchmark, StudyError> {
        let shape = self.shape();
        let clean = shape.mesh.clone();
        let noisy = add_gaussian_noise(&clean, self.noise, self.noise_seed)?;
        Ok(Benchmark {
            params: self.clone(),
            shape,
            clean,
            noisy,
        })
    }

    /// Clean shape with a cap of `hole_radius` radians removed around the
    /// first bump, then filled.
    pub fn build_completion(&self, hole_radius: f64) -> Result<CompletionBenchmark, StudyError> {
        let shape = self.shape();
        let hole_center = *shape
            .centers
            .first()
            .ok_or_else(|| StudyError::Invalid("completion benchmark needs a bump".into()))?;
        let cut = remove_cap(&shape.mesh, hole_center, hole_radius);
        if cut.removed_faces == 0 {
            return Err(StudyError::Invalid(format!(
                "hole radius {hole_radius} removes no faces"
            )));
        }
        let (filled, mask) = fill_holes(&cut.mesh)?;
        let reference = shape.reference_for(&filled);
        Ok(CompletionBenchmark {
            shape,
            hole_center,
            hole_radius,
            cut,
            filled,
            mask,
            reference,
        })
    }
}

#[derive(Debug, Clone)]
pub struct CompletionOutcome {
    pub report: RunReport,
    /// RMSE over filled vertices of the plain fill.
    pub fill_rmse: f64,
    /// RMSE over filled vertices of the trained output.
    pub output_rmse: f64,
    pub watertight: bool,
}

pub fn run_completion(
    bench: &CompletionBenchmark,
    config: &TrainConfig,
) -> Result<CompletionOutcome, StudyError> {
    let filled_vertices = bench.mask.filled_indices();
    let report = train_dmp(&bench.filled, &bench.mask, config, None)?;
    let output = report.output(SelectionPolicy::Final)?;
    Ok(CompletionOutcome {
        fill_rmse: region_rmse(&bench.filled, &bench.reference, &filled_vertices)?,
        output_rmse: region_rmse(output, &bench.reference, &filled_vertices)?,
        watertight: validate_mesh(output).is_watertight(),
        report,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Study {
    PositionsVsDisplacements,
    Smoothing,
    LaplacianLoss,
    Convergence,
}

/// Noise levels of the convergence study, as fractions of the mean edge length.
pub const CONVERGENCE_LEVELS: [(&str, f64); 3] = [("clean", 0.0), ("weak", 0.1), ("strong", 0.5)];

/// Step at which the convergence study compares normalized losses. Runs of
/// this study train on the reconstruction term alone.
pub const CONVERGENCE_STEP: usize = 500;

impl Study {
    pub const ALL: [Study; 4] = [
        Study::PositionsVsDisplacements,
        Study::Smoothing,
        Study::LaplacianLoss,
        Study::Convergence,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Study::PositionsVsDisplacements => "positions-vs-displacements",
            Study::Smoothing => "smoothing",
            Study::LaplacianLoss => "laplacian-loss",
            Study::Convergence => "convergence",
        }
    }

    pub fn parse(name: &str) -> Option<Study> {
        Study::ALL.into_iter().find(|s| s.name() == name)
    }
}

#[derive(Debug, Clone)]
pub struct StudyRun {
    pub label: String,
    pub seed: u64,
    pub report: RunReport,
}

#[derive(Debug, Clone)]
pub struct StudyOutcome {
    pub study: Study,
    pub runs: Vec<StudyRun>,
    /// Markdown table.
    pub summary: String,
}

impl StudyOutcome {
    pub fn find(&self, label: &str, seed: u64) -> Option<&RunReport> {
        self.runs
            .iter()
            .find(|r| r.label == label && r.seed == seed)
            .map(|r| &r.report)
    }
}

/// Population standard deviation of MAD over records with step in `[from, to]`.
pub fn mad_std_between(report: &RunReport, from: usize, to: usize) -> Option<f64> {
    let values: Vec<f64> = report
        .mad_series()
        .into_iter()
        .filter(|&(s, _)| s >= from && s <= to)
        .map(|(_, m)| m)
        .collect();
    if values.is_empty() {
        return None;
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64;
    Some(var.sqrt())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("-".to_string(), |x| format!("{x:.4}"))
}

/// Runs the study's matrix on `noisy` against `clean`. `base` supplies the
/// shared training flags; each run overrides only what the study varies.
pub fn run_study(
    study: Study,
    noisy: &Mesh,
    clean: &Mesh,
    base: &TrainConfig,
    seeds: &[u64],
) -> Result<StudyOutcome, StudyError> {
    if seeds.is_empty() {
        return Err(StudyError::Invalid("at least one seed is required".into()));
    }
    let mask = VertexMask::all_true(noisy.vertex_count());
    let mut runs = Vec::new();
    let mut run = |label: &str, seed: u64, mesh: &Mesh, config: TrainConfig| {
        log::info!("{}: {label} seed {seed}", study.name());
        let report = train_dmp(mesh, &mask, &TrainConfig { seed, ..config }, Some(clean))?;
        runs.push(StudyRun {
            label: label.to_string(),
            seed,
            report,
        });
        Ok::<_, StudyError>(())
    };
    let displacements = TrainConfig {
        task: Task::Denoise,
        ..base.clone()
    };
    let mut summary = String::new();

    match study {
        Study::PositionsVsDisplacements => {
            for &seed in seeds {
                let positions = TrainConfig {
                    task: Task::PositionsAblation,
                    ..base.clone()
                };
                run("positions", seed, noisy, positions)?;
                run("displacements", seed, noisy, displacements.clone())?;
            }
        }
        Study::Smoothing => {
            for &seed in seeds {
                let raw = TrainConfig {
                    smoothing: SmoothingConfig::none(),
                    ..displacements.clone()
                };
                run("unprocessed", seed, noisy, raw)?;
                run("smoothed", seed, noisy, displacements.clone())?;
            }
        }
        Study::LaplacianLoss => {
            for &seed in seeds {
                let off = TrainConfig {
                    lambda: 0.0,
                    ..displacements.clone()
                };
                run("lambda=0", seed, noisy, off)?;
                let label = format!("lambda={}", base.lambda);
                run(&label, seed, noisy, displacements.clone())?;
            }
        }
        Study::Convergence => {
            for &seed in seeds {
                for (level, sigma) in CONVERGENCE_LEVELS {
                    let target = if sigma > 0.0 {
                        add_gaussian_noise(clean, sigma, seed)?
                    } else {
                        clean.clone()
                    };
                    for (mode, task) in [
                        ("positions", Task::PositionsAblation),
                        ("displacements", Task::Denoise),
                    ] {
                        let config = TrainConfig {
                            task,
                            lambda: 0.0,
                            ..base.clone()
                        };
                        run(&format!("{mode}/{level}"), seed, &target, config)?;
                    }
                }
            }
        }
    }

    let input_mad = runs.first().and_then(|r| r.report.input_mad);
    match study {
        Study::Convergence => {
            let at = CONVERGENCE_STEP.min(base.max_steps);
            writeln!(summary, "| run | seed | recon(step {at}) / recon(step 1) |").unwrap();
            writeln!(summary, "|---|---|---|").unwrap();
            for r in &runs {
                writeln!(
                    summary,
                    "| {} | {} | {} |",
                    r.label,
                    r.seed,
                    fmt_opt(r.report.normalized_recon(at))
                )
                .unwrap();
            }
        }
        _ => {
            let from = base.max_steps / 2;
            writeln!(summary, "Input MAD: {}", fmt_opt(input_mad)).unwrap();
            writeln!(summary).unwrap();
            writeln!(
                summary,
                "| run | seed | best MAD | best step | final MAD | MAD std (steps {from}-{}) |",
                base.max_steps
            )
            .unwrap();
            writeln!(summary, "|---|---|---|---|---|---|").unwrap();
            for r in &runs {
                writeln!(
                    summary,
                    "| {} | {} | {} | {} | {} | {} |",
                    r.label,
                    r.seed,
                    fmt_opt(r.report.best_mad()),
                    r.report.best_step.map_or("-".into(), |s| s.to_string()),
                    fmt_opt(r.report.final_mad()),
                    fmt_opt(mad_std_between(&r.report, from, base.max_steps)),
                )
                .unwrap();
            }
        }
    }

    Ok(StudyOutcome {
        study,
        runs,
        summary,
    })
}
