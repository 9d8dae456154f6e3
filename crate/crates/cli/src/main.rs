//! `mdm` command-line tool: generate, inspect, classify and smooth meshes.
//!
//! Exit codes: 0 on success, 1 on input or validation errors, 2 when a
//! smoothing run hits its iteration cap without converging (the result is
//! still written).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mdm::io::{self, DimMode, MeshFormat, ReportFormat, ReportRecord};
use mdm::meshgen::{self, GenKind, GenSpec, Lift};
use mdm::{
    classify, smooth_planar, smooth_surface, summarize, Mesh, Method, PlanarConfig, QualitySummary, SmoothResult,
    SurfaceConfig, Tolerance, WeightMode,
};

#[derive(Parser, Debug)]
#[command(name = "mdm", version, about = "Element-target mesh smoothing for tri/quad meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Smooth a planar or surface mesh.
    Smooth(SmoothArgs),
    /// Print MQ/MSE per element type.
    Quality(QualityArgs),
    /// Print the feature label of every node.
    Classify(ClassifyArgs),
    /// Generate a synthetic test mesh.
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Planar,
    Surface,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Mdm,
    Laplacian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TolScale {
    /// `--tol` is a distance in mesh units.
    Abs,
    /// `--tol` is a fraction of the bounding-box diagonal.
    Bbox,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum WeightArg {
    Identity,
    Area,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormatArg {
    Json,
    Csv,
}

impl From<ReportFormatArg> for ReportFormat {
    fn from(f: ReportFormatArg) -> Self {
        match f {
            ReportFormatArg::Json => ReportFormat::Json,
            ReportFormatArg::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Args, Debug)]
struct SmoothArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "mdm")]
    method: MethodArg,
    /// Planar displacement tolerance (default: 1e-6 of the bbox diagonal).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value = "abs")]
    tol_scale: TolScale,
    /// Iteration cap (default: 1000 planar, 200 surface).
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    eps_mq: Option<f64>,
    #[arg(long, alias = "eps-msE")]
    eps_mse: Option<f64>,
    #[arg(long)]
    chi_c: Option<f64>,
    #[arg(long)]
    chi_r: Option<f64>,
    #[arg(long, value_enum, default_value = "identity")]
    weight: WeightArg,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    fix_boundary: bool,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    report_format: ReportFormatArg,
    #[arg(long)]
    threads: Option<usize>,
    /// Smooth a mesh whose dimension does not match the mode (planar
    /// meshes are embedded at z = 0, surfaces are flattened by dropping z).
    #[arg(long)]
    force: bool,
}

#[derive(Args, Debug)]
struct QualityArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    report_format: ReportFormatArg,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    chi_c: Option<f64>,
    #[arg(long)]
    chi_r: Option<f64>,
    #[arg(long, value_enum, default_value = "identity")]
    weight: WeightArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    TriGrid,
    QuadGrid,
    TriDominant,
    QuadDominant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LiftArg {
    None,
    SinxCosy,
    Paraboloid,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    nx: usize,
    #[arg(long)]
    ny: usize,
    #[arg(long, default_value_t = 0.0)]
    perturb: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "none")]
    lift: LiftArg,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug)]
enum Failure {
    /// Bad input, flag or file.
    Input(String),
    /// Ran out of iterations.
    NotConverged,
}

impl From<mdm::Error> for Failure {
    fn from(e: mdm::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn mesh_format(path: &Path, flag: &str) -> Result<MeshFormat, Failure> {
    MeshFormat::from_path(path).ok_or_else(|| {
        Failure::Input(format!("{flag} {}: unknown mesh format (expected .obj or .off)", path.display()))
    })
}

fn read_input(path: &Path, mode: DimMode) -> Result<Mesh, Failure> {
    let fmt = mesh_format(path, "--input")?;
    Ok(io::read_mesh_with(path, fmt, mode)?)
}

fn write_output(mesh: &Mesh, path: &Path) -> Result<(), Failure> {
    let fmt = mesh_format(path, "--output")?;
    Ok(io::write_mesh(mesh, path, fmt)?)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.6}"))
}

fn print_quality(label: &str, q: &QualitySummary) {
    if q.n_tri > 0 {
        println!("{label} tri:  n={} MQ={} MSE={}", q.n_tri, fmt_opt(q.mq_tri), fmt_opt(q.mse_tri));
    }
    if q.n_quad > 0 {
        println!("{label} quad: n={} MQ={} MSE={}", q.n_quad, fmt_opt(q.mq_quad), fmt_opt(q.mse_quad));
    }
}

fn positive(name: &str, v: Option<f64>) -> Result<Option<f64>, Failure> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(Failure::Input(format!("--{name} must be positive, got {x}"))),
        _ => Ok(v),
    }
}

fn run_smooth(a: &SmoothArgs) -> Result<(), Failure> {
    if a.mode == ModeArg::Surface && a.method == MethodArg::Laplacian {
        return Err(Failure::Input("--method laplacian is only available with --mode planar".into()));
    }
    let mesh = read_input(&a.input, DimMode::Auto)?;
    let mesh = match (a.mode, mesh.dim()) {
        (ModeArg::Planar, 2) | (ModeArg::Surface, 3) => mesh,
        (ModeArg::Planar, _) if a.force => mesh.to_2d(),
        (ModeArg::Surface, _) if a.force => mesh.to_3d(),
        (mode, d) => {
            return Err(Failure::Input(format!(
                "--input {}: {d}D mesh cannot be smoothed with --mode {} (use --force)",
                a.input.display(),
                if mode == ModeArg::Planar { "planar" } else { "surface" }
            )))
        }
    };
    positive("tol", a.tol)?;

    let result: SmoothResult = match a.mode {
        ModeArg::Planar => {
            let mut cfg = PlanarConfig {
                method: match a.method {
                    MethodArg::Mdm => Method::Mdm,
                    MethodArg::Laplacian => Method::Laplacian,
                },
                fix_boundary: a.fix_boundary,
                ..PlanarConfig::default()
            };
            if let Some(t) = a.tol {
                cfg.tol = match a.tol_scale {
                    TolScale::Abs => Tolerance::Absolute(t),
                    TolScale::Bbox => Tolerance::BboxFraction(t),
                };
            }
            if let Some(n) = a.max_iter {
                cfg.max_iter = n;
            }
            smooth_planar(&mesh, &cfg)?
        }
        ModeArg::Surface => {
            if !a.fix_boundary {
                log::warn!("--fix-boundary false is ignored in surface mode; boundary nodes are always fixed");
            }
            let d = SurfaceConfig::default();
            let cfg = SurfaceConfig {
                eps_mq: positive("eps-mq", a.eps_mq)?.unwrap_or(d.eps_mq),
                eps_mse: positive("eps-mse", a.eps_mse)?.unwrap_or(d.eps_mse),
                chi_c: a.chi_c.unwrap_or(d.chi_c),
                chi_r: a.chi_r.unwrap_or(d.chi_r),
                max_iter: a.max_iter.unwrap_or(d.max_iter),
                weight_mode: weight(a.weight),
            };
            smooth_surface(&mesh, &cfg)?
        }
    };

    write_output(&result.mesh, &a.output)?;
    if let Some(path) = &a.report {
        let records: Vec<ReportRecord> = result.history.iter().map(ReportRecord::from).collect();
        io::write_report(&records, path, a.report_format.into())?;
    }

    print_quality("initial", &result.initial);
    print_quality("final  ", &result.final_quality());
    println!("iterations: {}", result.iterations);
    println!("converged: {}", result.converged);
    if !result.inverted_elements.is_empty() {
        println!("inverted elements: {:?}", result.inverted_elements);
    }
    if result.converged {
        Ok(())
    } else {
        Err(Failure::NotConverged)
    }
}

fn weight(w: WeightArg) -> WeightMode {
    match w {
        WeightArg::Identity => WeightMode::Identity,
        WeightArg::Area => WeightMode::FaceArea,
    }
}

fn run_quality(a: &QualityArgs) -> Result<(), Failure> {
    let mesh = read_input(&a.input, DimMode::Auto)?;
    let q = summarize(&mesh);
    print_quality("quality", &q);
    if let Some(path) = &a.report {
        let rec = ReportRecord {
            iter: 0,
            mq_tri: q.mq_tri,
            mse_tri: q.mse_tri,
            mq_quad: q.mq_quad,
            mse_quad: q.mse_quad,
            max_disp: 0.0,
            inversions_recovered: 0,
        };
        io::write_report(&[rec], path, a.report_format.into())?;
    }
    Ok(())
}

fn run_classify(a: &ClassifyArgs) -> Result<(), Failure> {
    let mesh = read_input(&a.input, DimMode::Surface)?;
    let d = SurfaceConfig::default();
    let cfg = SurfaceConfig {
        chi_c: a.chi_c.unwrap_or(d.chi_c),
        chi_r: a.chi_r.unwrap_or(d.chi_r),
        weight_mode: weight(a.weight),
        ..d
    };
    let labels = classify(&mesh, &cfg)?;
    let mut out = String::new();
    for (i, l) in labels.labels.iter().enumerate() {
        out.push_str(&format!("{i} {}\n", l.as_str()));
    }
    print!("{out}");
    Ok(())
}

fn run_gen(a: &GenArgs) -> Result<(), Failure> {
    let spec = GenSpec {
        kind: match a.kind {
            KindArg::TriGrid => GenKind::TriGrid,
            KindArg::QuadGrid => GenKind::QuadGrid,
            KindArg::TriDominant => GenKind::TriDominant,
            KindArg::QuadDominant => GenKind::QuadDominant,
        },
        nx: a.nx,
        ny: a.ny,
        perturb: a.perturb,
        seed: a.seed,
        lift: match a.lift {
            LiftArg::None => Lift::None,
            LiftArg::SinxCosy => Lift::SinxCosy,
            LiftArg::Paraboloid => Lift::Paraboloid,
        },
    };
    let mesh = meshgen::generate(&spec)?;
    write_output(&mesh, &a.output)?;
    println!(
        "wrote {} ({} nodes, {} elements)",
        a.output.display(),
        mesh.node_count(),
        mesh.elements().len()
    );
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Smooth(a) => match a.threads {
            Some(0) => Err(Failure::Input("--threads must be at least 1".into())),
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Failure::Input(format!("--threads {n}: {e}")))?
                .install(|| run_smooth(a)),
            None => run_smooth(a),
        },
        Command::Quality(a) => run_quality(a),
        Command::Classify(a) => run_classify(a),
        Command::Gen(a) => run_gen(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::NotConverged) => {
            eprintln!("warning: did not converge within the iteration limit");
            ExitCode::from(2)
        }
    }
}
