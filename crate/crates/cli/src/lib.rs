//! Command-line front end. [`run_cli`] parses arguments, prints the resolved
//! configuration to stderr and returns the process exit code: 0 on success,
//! 1 on usage or input errors, 2 when a resource budget stops the run.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use geocomplex::census::{census_report, connected_components};
use geocomplex::complex::{cech_complex_on_graph, rips_complex, ComplexKind, SimplicialComplex, DEFAULT_FACE_BUDGET};
use geocomplex::experiments::{run_sweep, SweepConfig};
use geocomplex::geometry::{build_geometric_graph, sample_points, Density, DensityKind, PointCloud};
use geocomplex::homology::{betti_numbers, PrimeField};
use geocomplex::morse::{build_gradient_field, critical_cells, distance_order_with, validate_gradient_field, OriginRule};
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(
    name = "geocomplex",
    version,
    about = "Random geometric complexes and their topology",
    after_help = "Flags by subcommand:\n  sample  --density {cube,ball,gaussian} --dim --n --seed --out\n  build   --in --type {rips,cech} --r --max-dim --out\n  betti   --in --kmax --field --out\n  morse   --in --r --max-dim --out\n  census  --in --type --r --kmax --max-dim --out\n  sweep   --config --density --dim --n --seed --r --alpha --c --type --max-dim --kmax --field --trials --workers --out"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a point cloud and write it as CSV.
    Sample(SampleArgs),
    /// Build a Vietoris–Rips or Čech complex from a point CSV.
    Build(BuildArgs),
    /// Betti numbers of a complex file as JSON.
    Betti(BettiArgs),
    /// Critical-cell census of the distance-ordered Morse field on a Rips complex.
    Morse(MorseArgs),
    /// Component census of a point CSV.
    Census(CensusArgs),
    /// Monte Carlo sweep: CSV summary plus a JSON sidecar.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DensityArg {
    Cube,
    Ball,
    Gaussian,
}

impl From<DensityArg> for DensityKind {
    fn from(d: DensityArg) -> Self {
        match d {
            DensityArg::Cube => DensityKind::UniformCube,
            DensityArg::Ball => DensityKind::UniformBall,
            DensityArg::Gaussian => DensityKind::Gaussian,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TypeArg {
    Rips,
    Cech,
}

impl From<TypeArg> for ComplexKind {
    fn from(t: TypeArg) -> Self {
        match t {
            TypeArg::Rips => ComplexKind::Rips,
            TypeArg::Cech => ComplexKind::Cech,
        }
    }
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long, value_enum)]
    density: DensityArg,
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BuildArgs {
    /// Point CSV.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "type", value_name = "TYPE", value_enum, default_value = "rips")]
    kind: TypeArg,
    #[arg(long)]
    r: f64,
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BettiArgs {
    /// Complex file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Highest degree; defaults to one below the complex's dimension cap.
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long, default_value_t = 2)]
    field: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MorseArgs {
    /// Point CSV.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    r: f64,
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CensusArgs {
    /// Point CSV.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long = "type", value_name = "TYPE", value_enum, default_value = "rips")]
    kind: TypeArg,
    #[arg(long)]
    r: f64,
    #[arg(long, default_value_t = 2)]
    kmax: usize,
    /// Defaults to `kmax + 1`.
    #[arg(long)]
    max_dim: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Flags override the values of `--config`.
#[derive(Debug, Args)]
struct SweepArgs {
    /// JSON file with SweepConfig fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    density: Option<DensityArg>,
    #[arg(long)]
    dim: Option<usize>,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fixed radius.
    #[arg(long, conflicts_with_all = ["alpha", "c"])]
    r: Option<f64>,
    /// Power-law radius c * n^(-alpha).
    #[arg(long)]
    alpha: Option<f64>,
    /// Prefactor; alone it selects c * (ln n / n)^(1/d).
    #[arg(long)]
    c: Option<f64>,
    #[arg(long = "type", value_name = "TYPE", value_enum)]
    kind: Option<TypeArg>,
    #[arg(long)]
    max_dim: Option<usize>,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long)]
    field: Option<u32>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    /// CSV path; the JSON sidecar goes next to it. CSV on stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Budget(String),
}

impl From<geocomplex::Error> for Failure {
    fn from(e: geocomplex::Error) -> Self {
        if e.is_resource_exhausted() {
            Failure::Budget(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn lib_err<E: Into<geocomplex::Error>>(e: E) -> Failure {
    Failure::from(e.into())
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = match cli.command {
        Command::Sample(a) => sample(a),
        Command::Build(a) => build(a),
        Command::Betti(a) => betti(a),
        Command::Morse(a) => morse(a),
        Command::Census(a) => census(a),
        Command::Sweep(a) => sweep(a),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: resource budget exhausted: {msg}");
            2
        }
    }
}

fn announce(config: &Value) {
    eprintln!("config: {config}");
}

fn path_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path).map(BufReader::new).map_err(|e| path_err(path, e))
}

fn read_points(path: &Path) -> Result<PointCloud, Failure> {
    PointCloud::read_csv(open(path)?).map_err(|e| path_err(path, e))
}

fn emit(out: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), Failure> {
    match out {
        Some(path) => {
            let mut file = std::io::BufWriter::new(File::create(path).map_err(|e| path_err(path, e))?);
            write(&mut file).and_then(|_| file.flush()).map_err(|e| path_err(path, e))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock).map_err(|e| Failure::Usage(format!("stdout: {e}")))
        }
    }
}

fn emit_line(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    emit(out, |w| writeln!(w, "{text}"))
}

fn check_radius(r: f64) -> Result<(), Failure> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--r must be finite and positive, got {r}")))
    }
}

fn sample(a: SampleArgs) -> Result<(), Failure> {
    let kind = DensityKind::from(a.density);
    announce(&json!({"command": "sample", "density": kind.name(), "dim": a.dim, "n": a.n, "seed": a.seed, "out": a.out}));
    let density = Density::new(kind, a.dim).map_err(|e| Failure::Usage(format!("--dim: {e}")))?;
    let cloud = sample_points(density, a.n, a.seed).map_err(lib_err)?;
    emit(a.out.as_deref(), |w| cloud.write_csv(w))
}

fn build_complex(cloud: &PointCloud, kind: ComplexKind, r: f64, max_dim: usize) -> Result<SimplicialComplex, Failure> {
    let graph = build_geometric_graph(cloud, r).map_err(lib_err)?;
    let complex = match kind {
        ComplexKind::Cech => cech_complex_on_graph(cloud, &graph, max_dim, DEFAULT_FACE_BUDGET),
        _ => rips_complex(&graph, max_dim),
    };
    complex.map_err(lib_err)
}

fn build(a: BuildArgs) -> Result<(), Failure> {
    let kind = ComplexKind::from(a.kind);
    announce(&json!({"command": "build", "in": a.input, "type": kind.name(), "r": a.r, "max_dim": a.max_dim, "out": a.out}));
    check_radius(a.r)?;
    let cloud = read_points(&a.input)?;
    let complex = build_complex(&cloud, kind, a.r, a.max_dim)?;
    emit(a.out.as_deref(), |w| complex.write_text(w))
}

fn betti(a: BettiArgs) -> Result<(), Failure> {
    let complex = SimplicialComplex::read_text(open(&a.input)?).map_err(|e| path_err(&a.input, e))?;
    let kmax = a.kmax.unwrap_or(complex.max_dim().saturating_sub(1));
    announce(&json!({"command": "betti", "in": a.input, "kmax": kmax, "field": a.field, "out": a.out}));
    let field = PrimeField::new(a.field).map_err(|e| Failure::Usage(format!("--field: {e}")))?;
    let profile = betti_numbers(&complex, kmax, field).map_err(lib_err)?;
    emit_line(a.out.as_deref(), &profile.to_json())
}

fn morse(a: MorseArgs) -> Result<(), Failure> {
    announce(&json!({"command": "morse", "in": a.input, "r": a.r, "max_dim": a.max_dim, "origin": "domain_center", "out": a.out}));
    check_radius(a.r)?;
    let cloud = read_points(&a.input)?;
    let graph = build_geometric_graph(&cloud, a.r).map_err(lib_err)?;
    let complex = rips_complex(&graph, a.max_dim).map_err(lib_err)?;
    let order = distance_order_with(&cloud, &OriginRule::DomainCenter).map_err(lib_err)?;
    let field = build_gradient_field(&complex, &graph, &order).map_err(lib_err)?;
    let report = validate_gradient_field(&complex, &field);
    if !report.is_valid() {
        return Err(Failure::Usage(format!("gradient field failed validation: {:?}", report.violations.first())));
    }
    emit_line(a.out.as_deref(), &critical_cells(&complex, &field).to_json())
}

fn census(a: CensusArgs) -> Result<(), Failure> {
    let kind = ComplexKind::from(a.kind);
    let max_dim = a.max_dim.unwrap_or(a.kmax + 1);
    announce(&json!({"command": "census", "in": a.input, "type": kind.name(), "r": a.r, "kmax": a.kmax, "max_dim": max_dim, "out": a.out}));
    check_radius(a.r)?;
    let cloud = read_points(&a.input)?;
    let graph = build_geometric_graph(&cloud, a.r).map_err(lib_err)?;
    let complex = build_complex(&cloud, kind, a.r, max_dim)?;
    let partition = connected_components(&graph);
    let cech_cloud = (kind == ComplexKind::Cech).then_some(&cloud);
    let report = census_report(&graph, &complex, &partition, cech_cloud, a.kmax);
    emit_line(a.out.as_deref(), &report.to_json())
}

fn sweep_config(a: &SweepArgs) -> Result<SweepConfig, Failure> {
    let mut doc = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| path_err(path, e))?;
            serde_json::from_str::<Value>(&text).map_err(|e| path_err(path, e))?
        }
        None => json!({}),
    };
    let Value::Object(map) = &mut doc else {
        return Err(Failure::Usage("--config: expected a JSON object".into()));
    };
    let mut set = |key: &str, v: Value| {
        map.insert(key.to_string(), v);
    };
    if let Some(d) = a.density {
        set("density", json!(DensityKind::from(d)));
    }
    if let Some(v) = a.dim {
        set("dim", json!(v));
    }
    if let Some(v) = &a.n {
        set("n", json!(v));
    }
    if let Some(v) = a.seed {
        set("seed", json!(v));
    }
    match (a.r, a.alpha, a.c) {
        (Some(r), _, _) => set("radius", json!({"kind": "fixed", "r": r})),
        (None, Some(alpha), c) => set("radius", json!({"kind": "power_law", "c": c.unwrap_or(1.0), "alpha": alpha})),
        (None, None, Some(c)) => set("radius", json!({"kind": "connectivity_scale", "c": c})),
        (None, None, None) => {}
    }
    if let Some(t) = a.kind {
        set("type", json!(ComplexKind::from(t)));
    }
    if let Some(v) = a.max_dim {
        set("max_dim", json!(v));
    }
    if let Some(v) = a.kmax {
        set("k_max", json!(v));
    }
    if let Some(v) = a.field {
        set("field", json!(v));
    }
    if let Some(v) = a.trials {
        set("trials", json!(v));
    }
    if let Some(v) = a.workers {
        set("workers", json!(v));
    }
    if let Some(v) = &a.out {
        set("out", json!(v));
    }
    let config: SweepConfig = serde_json::from_value(doc).map_err(|e| Failure::Usage(format!("sweep config: {e}")))?;
    config.validate().map_err(lib_err)?;
    if let (Some(out), Some(input)) = (&config.out, &a.config) {
        let sidecar = out.with_extension("json");
        if out == input || sidecar == *input {
            return Err(Failure::Usage(format!("--out {} would overwrite --config {}", out.display(), input.display())));
        }
    }
    Ok(config)
}

fn sweep(a: SweepArgs) -> Result<(), Failure> {
    let config = sweep_config(&a)?;
    announce(&serde_json::to_value(&config).expect("config serializes"));
    let result = run_sweep(&config).map_err(lib_err)?;
    for cell in &result.cells {
        let betti: Vec<String> = cell.betti.iter().map(|m| format!("{:.4}", m.mean)).collect();
        eprintln!(
            "cell n={} r={:.6} W={:.4} trials={} failed={} mean_betti=[{}]",
            cell.n,
            cell.r,
            cell.w,
            cell.trials,
            cell.failed,
            betti.join(", ")
        );
    }
    if let Some(worst) = result.failures.iter().find(|f| f.resource_exhausted) {
        eprintln!("error: resource budget exhausted at n={} trial={}: {}", worst.n, worst.trial, worst.error);
        return Err(Failure::Budget(format!("{} trials failed", result.failures.len())));
    }
    if let Some(first) = result.failures.first() {
        return Err(Failure::Usage(format!("{} trials failed, first: {}", result.failures.len(), first.error)));
    }
    if config.out.is_none() {
        emit(None, |w| w.write_all(result.to_csv().as_bytes()))?;
    }
    Ok(())
}
