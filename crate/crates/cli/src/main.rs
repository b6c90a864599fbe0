mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "dmp",
    version,
    about = "Unsupervised mesh denoising and completion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Denoise a mesh.
    Denoise(DenoiseArgs),
    /// Fill holes and complete a mesh.
    Complete(CompleteArgs),
    /// Run one of the ablation studies.
    Ablate(AblateArgs),
    /// Generate a synthetic benchmark mesh.
    Synth(SynthArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ConvArg {
    Spectral,
    Chebyshev,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SelectArg {
    #[value(name = "best_mad")]
    BestMad,
    Final,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum PredictArg {
    Positions,
    Displacements,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum StudyArg {
    PositionsVsDisplacements,
    Smoothing,
    LaplacianLoss,
    Convergence,
}

/// Training flags shared by every command. Unset values fall back to the
/// command's own defaults.
#[derive(Args, Debug, Clone)]
struct TrainArgs {
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long = "lambda")]
    lambda: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, value_enum, default_value = "spectral")]
    conv: ConvArg,
    /// Polynomial order for the Chebyshev convolution.
    #[arg(long, default_value_t = 3)]
    cheb_order: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    smooth_iters: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    smooth_step: f64,
    #[arg(long, default_value_t = 10)]
    log_interval: usize,
    /// Stop early once no vertex moved more than this fraction of the mean
    /// edge length over 100 steps.
    #[arg(long)]
    converge_tol: Option<f64>,
}

#[derive(Args, Debug)]
struct DenoiseArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    ground_truth: Option<PathBuf>,
    #[arg(long, default_value = "denoised.obj")]
    out: PathBuf,
    #[arg(long, default_value = "report.csv")]
    report: PathBuf,
    /// Defaults to best_mad with a ground truth, final otherwise.
    #[arg(long, value_enum)]
    select: Option<SelectArg>,
    #[arg(long, value_enum, default_value = "displacements")]
    predict: PredictArg,
    #[command(flatten)]
    train: TrainArgs,
}

#[derive(Args, Debug)]
struct CompleteArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    ground_truth: Option<PathBuf>,
    #[arg(long, default_value = "completed.obj")]
    out: PathBuf,
    #[arg(long, default_value = "report.csv")]
    report: PathBuf,
    /// Listing of inserted vertices; defaults to `<out>.mask.txt`.
    #[arg(long)]
    mask_out: Option<PathBuf>,
    #[arg(long, value_enum)]
    select: Option<SelectArg>,
    /// Patch edges longer than this multiple of the mean boundary edge are split.
    #[arg(long, default_value_t = 1.5)]
    refine_factor: f64,
    #[command(flatten)]
    train: TrainArgs,
}

#[derive(Args, Debug)]
struct AblateArgs {
    #[arg(long, value_enum)]
    study: StudyArg,
    /// Noisy input; the synthetic benchmark is used when absent.
    #[arg(long, requires = "ground_truth")]
    input: Option<PathBuf>,
    #[arg(long)]
    ground_truth: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    seeds: Vec<u64>,
    #[arg(long, default_value = "ablation")]
    out_dir: PathBuf,
    #[command(flatten)]
    shape: ShapeArgs,
    #[command(flatten)]
    train: TrainArgs,
}

#[derive(Args, Debug, Clone)]
struct ShapeArgs {
    #[arg(long, default_value_t = 4)]
    subdivisions: u32,
    #[arg(long, default_value_t = 30)]
    bumps: usize,
    #[arg(long, default_value_t = 0.1)]
    bump_height: f64,
    /// Angular radius of each bump, radians.
    #[arg(long, default_value_t = 0.25)]
    bump_radius: f64,
    /// Noise standard deviation as a fraction of the mean edge length.
    #[arg(long, default_value_t = 0.2)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    shape_seed: u64,
    #[arg(long, default_value_t = 1)]
    noise_seed: u64,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, default_value_t = 4)]
    subdivisions: u32,
    #[arg(long, default_value_t = 30)]
    bumps: usize,
    #[arg(long, default_value_t = 0.1)]
    bump_height: f64,
    #[arg(long, default_value_t = 0.25)]
    bump_radius: f64,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// `none`, or an angular radius such as `0.3rad`.
    #[arg(long, default_value = "none")]
    hole: String,
    /// Hole direction as `x,y,z`; defaults to the first bump, else +z.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    hole_center: Option<Vec<f64>>,
    /// Seeds the noise; the shape uses `--shape-seed`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    shape_seed: u64,
    #[arg(long, default_value = "ground_truth.obj")]
    ground_truth_out: PathBuf,
    #[arg(long, default_value = "corrupted.obj")]
    out: PathBuf,
    /// Parameter listing; defaults to `<out>.provenance.txt`.
    #[arg(long)]
    provenance: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Denoise(args) => commands::denoise(args),
        Command::Complete(args) => commands::complete(args),
        Command::Ablate(args) => commands::ablate(args),
        Command::Synth(args) => commands::synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_denoise_flags() {
        let cli = Cli::try_parse_from([
            "dmp",
            "denoise",
            "--input",
            "a.obj",
            "--lr",
            "0.02",
            "--lambda",
            "0",
            "--conv",
            "chebyshev",
            "--select",
            "best_mad",
            "--predict",
            "positions",
        ])
        .unwrap();
        let Command::Denoise(args) = cli.command else {
            panic!("wrong subcommand")
        };
        assert_eq!(args.train.lr, Some(0.02));
        assert_eq!(args.train.lambda, Some(0.0));
        assert_eq!(args.train.conv, ConvArg::Chebyshev);
        assert_eq!(args.select, Some(SelectArg::BestMad));
        assert_eq!(args.predict, PredictArg::Positions);
    }

    #[test]
    fn parses_seed_lists() {
        let cli = Cli::try_parse_from(["dmp", "ablate", "--study", "smoothing", "--seeds", "4,5"])
            .unwrap();
        let Command::Ablate(args) = cli.command else {
            panic!("wrong subcommand")
        };
        assert_eq!(args.seeds, vec![4, 5]);
        assert_eq!(args.study, StudyArg::Smoothing);
    }
}
