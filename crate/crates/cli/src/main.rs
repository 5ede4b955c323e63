use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, LevelFilter};
use ricci_core::curvature::{
    bonnet_myers_check, combinatorial_defect, format_value, menger_field, ricci_field, scalar_field, stone_field,
    CellCurvatures, CurvatureError, CurvatureField, DEFAULT_DIAMETER_TOLERANCE,
};
use ricci_core::dual::{build_dual, CellMode};
use ricci_core::lab::{convergence_experiment, gen_flat_torus, gen_icosphere, MeshFamilySpec};
use ricci_core::wald::{quadruple_curvature, MetricQuadruple, SolverError, SolverOptions};
use ricci_core::{parse_metric_json, parse_off, validate, MetricComplex};

#[derive(Parser, Debug)]
#[command(name = "metric-ricci", version, about = "Metric Ricci curvature of triangulated surfaces")]
struct Cli {
    /// Worker threads (defaults to available parallelism; 1 runs serially).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Log verbosity on stderr (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct SolverArgs {
    #[arg(long, global = true)]
    planarity_tolerance: Option<f64>,
    #[arg(long, global = true)]
    root_tolerance: Option<f64>,
    #[arg(long, global = true)]
    scan_resolution: Option<usize>,
    #[arg(long, global = true)]
    max_doublings: Option<u32>,
    #[arg(long, global = true)]
    degeneracy_tolerance: Option<f64>,
    #[arg(long, global = true)]
    minor_tolerance: Option<f64>,
}

#[derive(Args, Debug)]
struct Io {
    /// Input mesh (.off or .json; `-` reads stdin).
    #[arg(short, long)]
    input: PathBuf,
    /// Output file (stdout when absent).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validation report as JSON.
    Info(Io),
    /// Per-triangle thickness, or per-cell dual thickness, as CSV.
    Thickness {
        #[command(flatten)]
        io: Io,
        #[arg(long)]
        dual: bool,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Dual complex as JSON.
    Dual(Io),
    /// Curvature field as CSV.
    Curvature {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Menger exponent.
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
    /// Embedding curvature of quadruples, one `d01,d02,d03,d12,d13,d23` line each.
    Quadruple {
        /// CSV input (stdin when absent).
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Bonnet-Myers verdict as JSON.
    BonnetMyers {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long, default_value_t = DEFAULT_DIAMETER_TOLERANCE)]
        tolerance: f64,
    },
    /// Convergence table of a refinement family as CSV.
    Converge {
        #[arg(long, value_enum, default_value_t = Family::Icosphere)]
        family: Family,
        #[arg(long, default_value_t = 0)]
        min_level: u32,
        #[arg(long, default_value_t = 4)]
        max_level: u32,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Squares per side at level 0 (torus).
        #[arg(long, default_value_t = 4)]
        base: usize,
        #[arg(long, default_value_t = 1.0)]
        cell_size: f64,
        /// Defaults to extrinsic for spheres, intrinsic for tori.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Where to write the JSON summary (logged when absent).
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Generate a mesh.
    #[command(subcommand)]
    Gen(Gen),
}

#[derive(Subcommand, Debug)]
enum Gen {
    /// Subdivided icosahedron projected to a sphere (OFF, or JSON with a .json output).
    Icosphere {
        #[arg(long, default_value_t = 0)]
        level: u32,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Flat torus grid of unit squares (metric JSON).
    Torus {
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        ny: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Extrinsic,
    #[value(alias = "intrinsic-star")]
    Intrinsic,
}

impl From<ModeArg> for CellMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Extrinsic => CellMode::Extrinsic,
            ModeArg::Intrinsic => CellMode::IntrinsicStar,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Kind {
    Defect,
    WaldCell,
    Ricci,
    Scalar,
    Stone,
    Menger,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Family {
    Icosphere,
    Torus,
}

/// Exit status 1: bad input; 2: the solver could not produce a value.
#[derive(Debug)]
enum Failure {
    Input(String),
    Solver(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Solver(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Solver(m) => m,
        }
    }
}

impl From<CurvatureError> for Failure {
    fn from(e: CurvatureError) -> Self {
        match e {
            CurvatureError::Solver(s) => Failure::Solver(s.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn input_err<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => LevelFilter::Warn,
        1 => LevelFilter::Info,
        _ => LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message().replace('\n', " "));
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Input("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(input_err)?;
    }
    let opts = solver_options(&cli.solver)?;
    match cli.command {
        Command::Info(io) => {
            let c = load(&io.input)?;
            let report = validate(&c);
            emit(io.output.as_deref(), &pretty(&report)?)?;
            if report.closed_manifold {
                Ok(())
            } else {
                Err(Failure::Input(format!("not a closed surface: {}", report.failures().join("; "))))
            }
        }
        Command::Thickness { io, dual, mode } => {
            let c = load(&io.input)?;
            let mut out = String::from("entity_id,method,value\n");
            if dual {
                let mode = mode.map(CellMode::from).unwrap_or_else(|| CellMode::default_for(&c));
                let d = build_dual(&c).map_err(input_err)?;
                for v in 0..d.cells().len() {
                    let phi = d.cell_thickness(v, mode).map_err(input_err)?;
                    out.push_str(&format!("c{v},dual-thickness,{}\n", format_value(phi)));
                }
            } else {
                for t in 0..c.triangle_count() {
                    let phi = c.triangle_simplex(t).thickness();
                    out.push_str(&format!("t{t},thickness,{}\n", format_value(phi)));
                }
            }
            emit(io.output.as_deref(), &out)
        }
        Command::Dual(io) => {
            let c = load(&io.input)?;
            let d = build_dual(&c).map_err(input_err)?;
            emit(io.output.as_deref(), &pretty(&d.to_json())?)
        }
        Command::Curvature { io, kind, mode, p } => {
            let c = load(&io.input)?;
            let mode = mode.map(CellMode::from).unwrap_or_else(|| CellMode::default_for(&c));
            let field = curvature(&c, kind, mode, p, &opts)?;
            info!("{} values, sum {}", field.entries.len(), format_value(field.sum()));
            emit(io.output.as_deref(), &field.to_csv())
        }
        Command::Quadruple { input, output } => {
            let text = match input {
                Some(path) => read(&path)?,
                None => read(Path::new("-"))?,
            };
            let (out, failures) = quadruples(&text, &opts)?;
            emit(output.as_deref(), &out)?;
            if failures > 0 {
                Err(Failure::Solver(format!("{failures} quadruple(s) could not be solved")))
            } else {
                Ok(())
            }
        }
        Command::BonnetMyers { io, mode, tolerance } => {
            let c = load(&io.input)?;
            let mode = mode.map(CellMode::from).unwrap_or_else(|| CellMode::default_for(&c));
            let verdict = bonnet_myers_check(&c, mode, &opts, tolerance)?;
            emit(io.output.as_deref(), &pretty(&verdict)?)
        }
        Command::Converge { family, min_level, max_level, radius, base, cell_size, mode, output, summary } => {
            if min_level > max_level {
                return Err(Failure::Input(format!("empty level range {min_level}..={max_level}")));
            }
            let spec = match family {
                Family::Icosphere => MeshFamilySpec::Icosphere { radius },
                Family::Torus => MeshFamilySpec::FlatTorus { base, cell_size },
            };
            let mode = mode.map(CellMode::from).unwrap_or(match family {
                Family::Icosphere => CellMode::Extrinsic,
                Family::Torus => CellMode::IntrinsicStar,
            });
            let table = convergence_experiment(&spec, min_level..=max_level, mode, &opts).map_err(input_err)?;
            emit(output.as_deref(), &table.to_csv())?;
            let json = pretty(&table.summary())?;
            match summary {
                Some(path) => emit(Some(&path), &json)?,
                None => info!("summary: {json}"),
            }
            if table.rows.is_empty() {
                return Err(Failure::Solver("no level could be evaluated".into()));
            }
            Ok(())
        }
        Command::Gen(Gen::Icosphere { level, radius, output }) => {
            let c = gen_icosphere(level, radius).map_err(input_err)?;
            let text = if is_json(output.as_deref()) {
                pretty(&c.to_metric_json())?
            } else {
                c.to_off().expect("generated icospheres are embedded")
            };
            emit(output.as_deref(), &text)
        }
        Command::Gen(Gen::Torus { nx, ny, output }) => {
            if output.as_deref().is_some_and(|p| extension(p).as_deref() == Some("off")) {
                return Err(Failure::Input("flat tori have no embedding; write a .json file".into()));
            }
            let c = gen_flat_torus(nx, ny).map_err(input_err)?;
            emit(output.as_deref(), &pretty(&c.to_metric_json())?)
        }
    }
}

fn solver_options(args: &SolverArgs) -> Result<SolverOptions, Failure> {
    let mut o = SolverOptions::default();
    if let Some(v) = args.planarity_tolerance {
        o.planarity_tolerance = v;
    }
    if let Some(v) = args.root_tolerance {
        o.root_tolerance = v;
    }
    if let Some(v) = args.scan_resolution {
        o.scan_resolution = v;
    }
    if let Some(v) = args.max_doublings {
        o.max_doublings = v;
    }
    if let Some(v) = args.degeneracy_tolerance {
        o.degeneracy_tolerance = v;
    }
    if let Some(v) = args.minor_tolerance {
        o.minor_tolerance = v;
    }
    o.check().map_err(input_err)?;
    Ok(o)
}

fn curvature(c: &MetricComplex, kind: Kind, mode: CellMode, p: f64, opts: &SolverOptions) -> Result<CurvatureField, Failure> {
    let field = match kind {
        Kind::Defect => combinatorial_defect(c)?,
        Kind::Stone => stone_field(c)?,
        Kind::Menger => menger_field(c, p)?,
        Kind::WaldCell | Kind::Ricci | Kind::Scalar => {
            let d = build_dual(c).map_err(input_err)?;
            let cells = CellCurvatures::compute(&d, mode, opts)?;
            match kind {
                Kind::WaldCell => cells.field(&d)?,
                Kind::Ricci => ricci_field(&d, &cells)?,
                _ => scalar_field(&d, &cells)?,
            }
        }
    };
    Ok(field)
}

fn quadruples(text: &str, opts: &SolverOptions) -> Result<(String, usize), Failure> {
    let mut out = String::from("kappa,branch,residual\n");
    let mut failures = 0;
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (n == 0 && line.starts_with('d')) {
            continue;
        }
        let q = MetricQuadruple::from_csv_line(line).map_err(|e| Failure::Input(format!("line {}: {e}", n + 1)))?;
        match quadruple_curvature(&q, opts) {
            Ok(r) => out.push_str(&format!(
                "{},{},{}\n",
                format_value(r.kappa),
                r.branch,
                format_value(r.raw_residual)
            )),
            Err(e @ (SolverError::Invalid(_) | SolverError::DomainViolation { .. })) => {
                return Err(Failure::Input(format!("line {}: {e}", n + 1)));
            }
            Err(e) => {
                log::warn!("line {}: {e}", n + 1);
                failures += 1;
                out.push_str("NaN,failed,NaN\n");
            }
        }
    }
    Ok((out, failures))
}

fn extension(path: &Path) -> Option<String> {
    path.extension().map(|e| e.to_string_lossy().to_ascii_lowercase())
}

fn is_json(path: Option<&Path>) -> bool {
    path.and_then(extension).as_deref() == Some("json")
}

fn read(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(input_err)?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<MetricComplex, Failure> {
    let text = read(path)?;
    let json = match extension(path).as_deref() {
        Some("json") => true,
        Some("off") => false,
        _ => text.trim_start().starts_with('{'),
    };
    let parsed = if json { parse_metric_json(&text) } else { parse_off(&text) };
    parsed.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn pretty<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(input_err)
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => io::stdout().lock().write_all(text.as_bytes()).map_err(input_err),
    }
}
