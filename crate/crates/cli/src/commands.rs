use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use dmp_core::mesh::{find_boundary_loops, load_obj, save_obj, validate_mesh, Mesh};
use dmp_core::metrics::{export_report_to, report_csv};
use dmp_core::neural::ConvKind;
use dmp_core::preprocess::{
    add_gaussian_noise, fill_holes_with, remove_cap, BumpySphere, FillOptions, SmoothingConfig,
    VertexMask,
};
use dmp_core::studies::{run_study, BenchmarkParams, Study};
use dmp_core::train::{train_dmp, RunReport, SelectionPolicy, Task, TrainConfig, TrainError};
use dmp_core::Vec3;

use crate::error::CliError;
use crate::{
    AblateArgs, CompleteArgs, ConvArg, DenoiseArgs, PredictArg, SelectArg, StudyArg, SynthArgs,
    TrainArgs,
};

fn load_mesh(path: &Path) -> Result<Mesh, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let mesh = load_obj(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let report = validate_mesh(&mesh);
    if !report.is_manifold {
        return Err(CliError::Input(format!(
            "{}: mesh is not manifold",
            path.display()
        )));
    }
    if report.edge_count == 0 {
        return Err(CliError::Input(format!(
            "{}: mesh has no edges",
            path.display()
        )));
    }
    if report.degenerate_face_count > 0 {
        log::warn!(
            "{}: {} degenerate faces",
            path.display(),
            report.degenerate_face_count
        );
    }
    Ok(mesh)
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn train_config(mut config: TrainConfig, args: &TrainArgs) -> Result<TrainConfig, CliError> {
    if let Some(lr) = args.lr {
        config.learning_rate = lr;
    }
    if let Some(lambda) = args.lambda {
        config.lambda = lambda;
    }
    if let Some(steps) = args.steps {
        config.max_steps = steps;
    }
    let iterations = args.smooth_iters.unwrap_or(config.smoothing.iterations);
    config.smoothing = SmoothingConfig::new(args.smooth_step, iterations)?;
    config.spec.conv_kind = match args.conv {
        ConvArg::Spectral => ConvKind::Spectral,
        ConvArg::Chebyshev => ConvKind::Chebyshev {
            order: args.cheb_order,
        },
    };
    config.seed = args.seed;
    config.log_interval = args.log_interval;
    config.convergence_tolerance = args.converge_tol;
    config.validate()?;
    Ok(config)
}

fn policy(select: Option<SelectArg>, has_ground_truth: bool) -> Result<SelectionPolicy, CliError> {
    match select {
        Some(SelectArg::BestMad) if !has_ground_truth => Err(CliError::Usage(
            "--select best_mad requires --ground-truth".into(),
        )),
        Some(SelectArg::BestMad) => Ok(SelectionPolicy::BestMad),
        Some(SelectArg::Final) => Ok(SelectionPolicy::Final),
        None if has_ground_truth => Ok(SelectionPolicy::BestMad),
        None => Ok(SelectionPolicy::Final),
    }
}

/// Trains and, on a non-finite loss, still leaves the partial report behind.
fn train_or_dump(
    mesh: &Mesh,
    mask: &VertexMask,
    config: &TrainConfig,
    ground_truth: Option<&Mesh>,
    report_path: &Path,
) -> Result<RunReport, CliError> {
    match train_dmp(mesh, mask, config, ground_truth) {
        Ok(report) => Ok(report),
        Err(TrainError::NonFinite { step, report }) => {
            let _ = fs::write(report_path, report_csv(&report));
            Err(CliError::Numerical(format!(
                "non-finite loss at step {step}; partial report in {}",
                report_path.display()
            )))
        }
        Err(e) => Err(e.into()),
    }
}

fn print_summary(report: &RunReport, policy: SelectionPolicy) {
    let last = report.last_record().expect("training logs the last step");
    println!("steps: {} (selected: {})", report.steps_run, policy.name());
    println!(
        "final loss: total {:.6} recon {:.6} lap {:.6}",
        last.total_loss, last.recon_loss, last.lap_loss
    );
    if let Some(m) = report.input_mad {
        println!("input MAD: {m:.4}");
    }
    if let Some(m) = report.final_mad() {
        println!("final MAD: {m:.4}");
    }
    if let (Some(m), Some(step)) = (report.best_mad(), report.best_step) {
        println!("best MAD: {m:.4} at step {step}");
    }
}

pub fn denoise(args: DenoiseArgs) -> Result<(), CliError> {
    let mesh = load_mesh(&args.input)?;
    let ground_truth = args.ground_truth.as_deref().map(load_mesh).transpose()?;
    let mut config = train_config(TrainConfig::denoise(), &args.train)?;
    if args.predict == PredictArg::Positions {
        config.task = Task::PositionsAblation;
    }
    let policy = policy(args.select, ground_truth.is_some())?;
    let mask = VertexMask::all_true(mesh.vertex_count());
    let report = train_or_dump(&mesh, &mask, &config, ground_truth.as_ref(), &args.report)?;
    export_report_to(&report, &args.report, &args.out, policy)?;
    print_summary(&report, policy);
    println!("wrote {} and {}", args.out.display(), args.report.display());
    Ok(())
}

fn mask_listing(mask: &VertexMask) -> String {
    let mut out = String::new();
    writeln!(out, "# 1 = original vertex, 0 = inserted by hole filling").unwrap();
    writeln!(
        out,
        "# vertices {} inserted {}",
        mask.len(),
        mask.len() - mask.count_true()
    )
    .unwrap();
    for &flag in mask.flags() {
        out.push(if flag { '1' } else { '0' });
        out.push('\n');
    }
    out
}

pub fn complete(args: CompleteArgs) -> Result<(), CliError> {
    let mesh = load_mesh(&args.input)?;
    let ground_truth = args.ground_truth.as_deref().map(load_mesh).transpose()?;
    let config = train_config(TrainConfig::complete(), &args.train)?;
    let policy = policy(args.select, ground_truth.is_some())?;

    let loops = find_boundary_loops(&mesh)?;
    let (filled, mask) = if loops.is_empty() {
        eprintln!("warning: no holes; every vertex is supervised");
        let n = mesh.vertex_count();
        (mesh, VertexMask::all_true(n))
    } else {
        let options = FillOptions {
            refine_factor: args.refine_factor,
        };
        let (filled, mask) = fill_holes_with(&mesh, &options)?;
        println!(
            "filled {} holes with {} new vertices",
            loops.len(),
            mask.len() - mask.count_true()
        );
        (filled, mask)
    };

    let report = train_or_dump(&filled, &mask, &config, ground_truth.as_ref(), &args.report)?;
    let mask_path = args
        .mask_out
        .clone()
        .unwrap_or_else(|| sidecar(&args.out, "mask.txt"));
    export_report_to(&report, &args.report, &args.out, policy)?;
    write(&mask_path, mask_listing(&mask))?;
    print_summary(&report, policy);
    println!(
        "wrote {}, {} and {}",
        args.out.display(),
        args.report.display(),
        mask_path.display()
    );
    Ok(())
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map_or("output".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn study(arg: StudyArg) -> Study {
    match arg {
        StudyArg::PositionsVsDisplacements => Study::PositionsVsDisplacements,
        StudyArg::Smoothing => Study::Smoothing,
        StudyArg::LaplacianLoss => Study::LaplacianLoss,
        StudyArg::Convergence => Study::Convergence,
    }
}

fn file_label(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub fn ablate(args: AblateArgs) -> Result<(), CliError> {
    let (noisy, clean) = match (&args.input, &args.ground_truth) {
        (Some(input), Some(gt)) => (load_mesh(input)?, load_mesh(gt)?),
        (None, None) => {
            let s = &args.shape;
            let bench = BenchmarkParams {
                subdivisions: s.subdivisions,
                bump_count: s.bumps,
                bump_height: s.bump_height,
                bump_radius: s.bump_radius,
                noise: s.noise,
                shape_seed: s.shape_seed,
                noise_seed: s.noise_seed,
            }
            .build()?;
            (bench.noisy, bench.clean)
        }
        _ => {
            return Err(CliError::Usage(
                "--input and --ground-truth must be given together".into(),
            ))
        }
    };
    let base = train_config(TrainConfig::denoise(), &args.train)?;
    let study = study(args.study);
    let outcome = run_study(study, &noisy, &clean, &base, &args.seeds)?;

    fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Input(format!("{}: {e}", args.out_dir.display())))?;
    for run in &outcome.runs {
        let path = args
            .out_dir
            .join(format!("{}_seed{}.csv", file_label(&run.label), run.seed));
        write(&path, report_csv(&run.report))?;
    }
    let summary = format!("# {}\n\n{}", study.name(), outcome.summary);
    write(&args.out_dir.join("summary.md"), &summary)?;
    print!("{summary}");
    Ok(())
}

fn parse_hole(spec: &str) -> Result<Option<f64>, CliError> {
    let spec = spec.trim();
    if spec == "none" {
        return Ok(None);
    }
    let number = spec.strip_suffix("rad").unwrap_or(spec);
    let radius: f64 = number
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid --hole `{spec}`")))?;
    if !(radius > 0.0 && radius < std::f64::consts::PI) {
        return Err(CliError::Usage(format!(
            "hole radius {radius} must lie in (0, pi)"
        )));
    }
    Ok(Some(radius))
}

pub fn synth(args: SynthArgs) -> Result<(), CliError> {
    if args.subdivisions > 7 {
        return Err(CliError::Usage("--subdivisions must be at most 7".into()));
    }
    if !(args.bump_height >= 0.0) || !(args.bump_radius > 0.0) || !(args.noise >= 0.0) {
        return Err(CliError::Usage(
            "bump height and noise must be non-negative, bump radius positive".into(),
        ));
    }
    let hole = parse_hole(&args.hole)?;

    let shape = BumpySphere {
        cap_radius: args.bump_radius,
        ..BumpySphere::new(
            args.subdivisions,
            args.bumps,
            args.bump_height,
            args.shape_seed,
        )
    }
    .build();
    let ground_truth = shape.mesh.clone();
    let mut corrupted = if args.noise > 0.0 {
        add_gaussian_noise(&ground_truth, args.noise, args.seed)?
    } else {
        ground_truth.clone()
    };

    let mut provenance = String::new();
    let mut line = |k: &str, v: String| writeln!(provenance, "{k}={v}").unwrap();
    line("subdivisions", args.subdivisions.to_string());
    line("bumps", args.bumps.to_string());
    line("bump_height", format!("{:?}", args.bump_height));
    line("bump_radius", format!("{:?}", args.bump_radius));
    line("shape_seed", args.shape_seed.to_string());
    line("noise", format!("{:?}", args.noise));
    line("seed", args.seed.to_string());

    if let Some(radius) = hole {
        let center = match &args.hole_center {
            Some(c) => {
                if c.len() != 3 {
                    return Err(CliError::Usage("--hole-center takes x,y,z".into()));
                }
                let v = Vec3::new(c[0], c[1], c[2]);
                if !(v.norm() > 0.0) {
                    return Err(CliError::Usage("--hole-center must be non-zero".into()));
                }
                v.normalize()
            }
            None => shape.centers.first().copied().unwrap_or(Vec3::z()),
        };
        let cut = remove_cap(&corrupted, center, radius);
        if cut.removed_faces == 0 {
            eprintln!("warning: hole of radius {radius} removes no faces");
        }
        line("hole_radius", format!("{radius:?}"));
        line(
            "hole_center",
            format!("{:?},{:?},{:?}", center.x, center.y, center.z),
        );
        line("removed_faces", cut.removed_faces.to_string());
        corrupted = cut.mesh;
    } else {
        line("hole", "none".into());
    }
    line("ground_truth", args.ground_truth_out.display().to_string());
    line("corrupted", args.out.display().to_string());
    line(
        "corrupted_size",
        format!(
            "{} vertices, {} faces",
            corrupted.vertex_count(),
            corrupted.face_count()
        ),
    );

    let provenance_path = args
        .provenance
        .clone()
        .unwrap_or_else(|| sidecar(&args.out, "provenance.txt"));
    write(&args.ground_truth_out, save_obj(&ground_truth))?;
    write(&args.out, save_obj(&corrupted))?;
    write(&provenance_path, provenance)?;
    println!(
        "wrote {}, {} and {}",
        args.ground_truth_out.display(),
        args.out.display(),
        provenance_path.display()
    );
    Ok(())
}
