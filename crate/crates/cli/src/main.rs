use std::path::PathBuf;
use std::process::ExitCode;

use achull::commands::{
    bench_csv, bounds_sweep_csv, cmd_bench, cmd_bounds, cmd_compress, cmd_error, cmd_sketch,
    BenchConfig, BoundsParams, CompressConfig, ErrorConfig, PointSource, SketchConfig,
};
use achull::compression::{ClusterOrder, HyperplaneParams, HyperplaneVariant};
use achull::datagen::{generate, ShapeKind, ShapeSpec};
use achull::{io, Error, PointCloud, ThresholdMode};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Approximate convex hulls by random-direction curvature sketching.
#[derive(Parser)]
#[command(name = "achull", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic point cloud as CSV.
    Gen {
        #[command(flatten)]
        shape: ShapeArgs,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sketch a cloud: inner hull, outer hull and summary.
    Sketch {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        sketch: SketchArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sketch, then compress vertices and optionally halfspaces.
    Compress {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        sketch: SketchArgs,
        /// Vertex clustering radius.
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        #[arg(long, value_enum, default_value_t = OrderArg::Decreasing)]
        order: OrderArg,
        /// Also compress the halfspace list.
        #[arg(long)]
        hyperplanes: bool,
        /// Angular radius in radians for merging directions.
        #[arg(long, default_value_t = std::f64::consts::PI / 36.0)]
        merge_angle: f64,
        #[arg(long, default_value_t = 0.05)]
        inner_alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        inner_beta: f64,
        #[arg(long, default_value_t = 1000)]
        inner_dirs: usize,
        /// Use the three-point gamma criterion instead of recursive sketching.
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Inner and outer error of one sketch against the exact or reference hull.
    Error {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        sketch: SketchArgs,
        #[arg(long, default_value_t = 2000)]
        probes: usize,
        #[arg(long, default_value_t = 100_000)]
        reference_dirs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the closed-form bounds.
    Bounds {
        #[arg(long, default_value_t = 3)]
        dims: u32,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 0.25)]
        omega: f64,
        #[arg(long, default_value_t = 0.05)]
        p: f64,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 10_000)]
        extremes: u64,
        #[arg(long, default_value_t = 1000)]
        dirs: u64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        theta: f64,
        /// Emit CSV curves over omega instead of a JSON report.
        #[arg(long)]
        sweep: bool,
        #[arg(long, default_value_t = 99)]
        steps: usize,
    },
    /// Errors and counts over a nested schedule of direction counts.
    Bench {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated increasing direction counts.
        #[arg(long, value_delimiter = ',', required = true)]
        schedule: Vec<usize>,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        probes: usize,
        #[arg(long, default_value_t = 100_000)]
        reference_dirs: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ShapeArgs {
    #[arg(long, value_enum, default_value_t = ShapeArg::Cube)]
    shape: ShapeArg,
    #[arg(long, default_value_t = 3)]
    dims: usize,
    #[arg(long, default_value_t = 10_000)]
    points: usize,
    #[arg(long = "data-seed", default_value_t = 0)]
    data_seed: u64,
}

#[derive(Args)]
struct InputArgs {
    /// Points CSV; a generated cloud is used when omitted.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[command(flatten)]
    shape: ShapeArgs,
}

#[derive(Args)]
struct SketchArgs {
    #[arg(long, default_value_t = 1000)]
    dirs: usize,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Hard)]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Simplex,
    Cube,
    Ball,
    Sphere,
    ConeCap,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Hard,
    Proportional,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Decreasing,
    Increasing,
}

impl ShapeArgs {
    fn spec(&self) -> ShapeSpec {
        let kind = match self.shape {
            ShapeArg::Simplex => ShapeKind::Simplex,
            ShapeArg::Cube => ShapeKind::Cube,
            ShapeArg::Ball => ShapeKind::Ball,
            ShapeArg::Sphere => ShapeKind::Sphere,
            ShapeArg::ConeCap => ShapeKind::ConeCap,
        };
        ShapeSpec::new(kind, self.dims, self.points, self.data_seed)
    }
}

impl InputArgs {
    fn load(&self) -> achull::Result<PointCloud> {
        match &self.input {
            Some(p) => PointSource::File(p.clone()).load(),
            None => PointSource::Generate(self.shape.spec()).load(),
        }
    }
}

impl SketchArgs {
    fn config(&self) -> SketchConfig {
        SketchConfig {
            n_dirs: self.dirs,
            alpha: self.alpha,
            mode: match self.mode {
                ModeArg::Hard => ThresholdMode::Hard,
                ModeArg::Proportional => ThresholdMode::Proportional,
            },
            seed: self.seed,
        }
    }
}

fn json<T: serde::Serialize>(v: &T) -> achull::Result<String> {
    Ok(serde_json::to_string_pretty(v)?)
}

fn run(cli: Cli) -> achull::Result<()> {
    match cli.command {
        Command::Gen { shape, out } => {
            let cloud = generate(&shape.spec())?;
            match out {
                Some(p) => io::write_points(&p, &cloud)?,
                None => print!("{}", io::format_points(&cloud, None)),
            }
        }
        Command::Sketch { input, sketch, out } => {
            let cloud = input.load()?;
            let run = cmd_sketch(&cloud, &sketch.config(), Some(&out))?;
            if let Some(w) = &run.summary.warning {
                eprintln!("warning: {w}");
            }
            println!("{}", json(&run.summary)?);
        }
        Command::Compress {
            input,
            sketch,
            beta,
            order,
            hyperplanes,
            merge_angle,
            inner_alpha,
            inner_beta,
            inner_dirs,
            gamma,
            out,
        } => {
            let cloud = input.load()?;
            let cfg = CompressConfig {
                sketch: sketch.config(),
                beta,
                order: match order {
                    OrderArg::Decreasing => ClusterOrder::Decreasing,
                    OrderArg::Increasing => ClusterOrder::Increasing,
                },
                hyperplane: hyperplanes.then_some(HyperplaneParams {
                    inner_alpha,
                    inner_beta,
                    inner_dirs,
                    merge_angle,
                    variant: match gamma {
                        Some(gamma) => HyperplaneVariant::GammaThreshold { gamma },
                        None => HyperplaneVariant::Recursive,
                    },
                    seed: sketch.seed,
                }),
            };
            let run = cmd_compress(&cloud, &cfg, Some(&out))?;
            println!("{}", json(&run.report)?);
        }
        Command::Error {
            input,
            sketch,
            probes,
            reference_dirs,
            out,
        } => {
            let cloud = input.load()?;
            let cfg = ErrorConfig {
                probe_seed: sketch.seed.wrapping_add(1),
                sketch: sketch.config(),
                probes,
                reference_dirs,
            };
            let report = cmd_error(&cloud, &cfg, out.as_deref())?;
            println!("{}", json(&report)?);
        }
        Command::Bounds {
            dims,
            radius,
            omega,
            p,
            eps,
            extremes,
            dirs,
            theta,
            sweep,
            steps,
        } => {
            if sweep {
                print!("{}", bounds_sweep_csv(radius, p, steps)?);
            } else {
                let report = cmd_bounds(&BoundsParams {
                    n: dims,
                    r: radius,
                    omega,
                    p,
                    eps,
                    x_count: extremes,
                    n_dirs: dirs,
                    theta,
                })?;
                println!("{}", json(&report)?);
            }
        }
        Command::Bench {
            input,
            schedule,
            alpha,
            seed,
            probes,
            reference_dirs,
            out,
        } => {
            let cloud = input.load()?;
            let cfg = BenchConfig {
                schedule,
                alpha,
                seed,
                probes,
                probe_seed: seed.wrapping_add(1),
                reference_dirs,
            };
            let rows = cmd_bench(&cloud, &cfg, out.as_deref())?;
            print!("{}", bench_csv(&rows));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_numerical(&e) { 2 } else { 1 })
        }
    }
}

fn is_numerical(e: &Error) -> bool {
    e.is_numerical()
}
