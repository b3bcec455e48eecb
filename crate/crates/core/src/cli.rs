//! Command-line front end: mesh generation, analysis, verification, sharpness
//! sweeps and refinement studies, with JSON and CSV reports.
//!
//! Every JSON document starts with `"schema": "umbilic/1"` and ends with a
//! `metadata` object holding the only run-dependent values (timestamp,
//! thread count). Everything before it is a deterministic function of the
//! command line and the input files.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::diffgeo::{convexity_status, estimate_geometry, ConvexityStatus, GeometryError, VertexGeometry};
use crate::fields::{normalize_mesh, FieldError, ScalarField};
use crate::mesh::{load_mesh, Mesh, MeshError, MeshFormat, MeshMeasures, ValidationReport};
use crate::pinching::{
    fit_line, sharpness_sweep, verify_theorem, GeometrySource, PinchingConstants, PinchingError, PinchingReport,
    SweepFamily, SweepGeometry, SweepOptions, SweepTable, VerifyOptions, ALPHA_FLOOR, SURFACE_DIM,
};
use crate::spectral::{build_laplace, lambda1, lambda1_upper_bound, SolverOptions, SpectralError, UpperBound};
use crate::surfgen::{AnalyticSurface, SurfGenError};

pub const SCHEMA: &str = "umbilic/1";
pub const THREADS_ENV: &str = "UMBILIC_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("mesh failed validation: {}", failures.join(", "))]
    InvalidMesh { failures: Vec<String> },
    #[error(transparent)]
    Pinching(#[from] PinchingError),
    #[error(transparent)]
    SurfGen(#[from] SurfGenError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("{0}")]
    Config(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Mesh(_) => "mesh",
            CliError::InvalidMesh { .. } => "invalid_mesh",
            CliError::Pinching(PinchingError::InvalidMesh { .. }) => "invalid_mesh",
            CliError::Pinching(PinchingError::InvalidConstants(_)) => "config",
            CliError::Pinching(_) => "pinching",
            CliError::SurfGen(_) => "surface",
            CliError::Geometry(_) => "geometry",
            CliError::Spectral(_) => "spectral",
            CliError::Field(_) => "field",
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Serialize(_) => "serialize",
        }
    }

    /// Names of failed mesh checks, when the error is a validation failure.
    pub fn failed_checks(&self) -> Vec<String> {
        match self {
            CliError::InvalidMesh { failures } | CliError::Pinching(PinchingError::InvalidMesh { failures }) => {
                failures.clone()
            }
            _ => Vec::new(),
        }
    }

    pub fn record(&self) -> ErrorRecord {
        ErrorRecord {
            schema: SCHEMA,
            error: ErrorBody {
                kind: self.kind(),
                message: self.to_string(),
                failed_checks: self.failed_checks(),
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub schema: &'static str,
    pub error: ErrorBody,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub kind: &'static str,
    pub message: String,
    pub failed_checks: Vec<String>,
}

#[derive(Debug, Parser)]
#[command(
    name = "umbilic",
    version,
    about = "Curvature pinching diagnostics for closed triangle surfaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a subdivided analytic surface to an OFF or OBJ file.
    Gen(GenArgs),
    /// Per-vertex curvature table and integral summary of a mesh.
    Analyze(AnalyzeArgs),
    /// Run the full hypothesis-to-containment pipeline on a mesh.
    Verify(VerifyArgs),
    /// Probe the ε exponent on a family of perturbed spheres.
    Sweep(SweepArgs),
    /// Curvature and λ₁ errors under refinement of an analytic surface.
    Converge(ConvergeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SurfaceKind {
    Sphere,
    Ellipsoid,
    Perturbed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepGeometryArg {
    Oracle,
    Estimated,
}

#[derive(Debug, Clone, Args)]
pub struct SurfaceArgs {
    #[arg(long, value_enum, default_value = "sphere")]
    pub kind: SurfaceKind,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Ellipsoid semi-axes a,b,c.
    #[arg(long, value_delimiter = ',')]
    pub axes: Option<Vec<f64>>,
    /// Perturbation amplitude δ.
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub order: i32,
}

impl SurfaceArgs {
    pub fn surface(&self) -> Result<AnalyticSurface, CliError> {
        let s = match self.kind {
            SurfaceKind::Sphere => AnalyticSurface::sphere(self.radius),
            SurfaceKind::Ellipsoid => match self.axes.as_deref() {
                Some(&[a, b, c]) => AnalyticSurface::ellipsoid(a, b, c),
                _ => return Err(CliError::Config("--axes a,b,c is required for an ellipsoid".into())),
            },
            SurfaceKind::Perturbed => {
                AnalyticSurface::perturbed_sphere(self.radius, self.delta, self.degree, self.order)?
            }
        };
        s.check()?;
        Ok(s)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ConstantsArgs {
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = SURFACE_DIM)]
    pub n: u32,
    /// L^{2p} exponent of the spectral condition (default n+1).
    #[arg(long = "p-roth")]
    pub p_roth: Option<f64>,
    #[arg(long = "L", default_value_t = 1.0)]
    pub l_const: f64,
    #[arg(long = "cn", default_value_t = 1.0)]
    pub c_n: f64,
    #[arg(long = "C-aubry", default_value_t = 1.0)]
    pub c_aubry: f64,
    /// The c of ε < c|M|^{1/n} (default: the convexity threshold).
    #[arg(long = "c")]
    pub c: Option<f64>,
}

impl ConstantsArgs {
    /// Constants with α floored at [`ALPHA_FLOOR`]; the note says so when
    /// the floor applied.
    pub fn constants(&self, epsilon: f64) -> (PinchingConstants, Option<String>) {
        let (alpha, note) = if self.alpha < ALPHA_FLOOR {
            (
                ALPHA_FLOOR,
                Some(format!("alpha {} raised to the floor {ALPHA_FLOOR}", self.alpha)),
            )
        } else {
            (self.alpha, None)
        };
        let c = PinchingConstants {
            alpha,
            epsilon,
            n: self.n,
            p_roth: self.p_roth.unwrap_or(self.n as f64 + 1.0),
            l_const: self.l_const,
            c_n: self.c_n,
            c_np_aubry: self.c_aubry,
            c_override: self.c,
        };
        (c, note)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Relative eigen-residual tolerance.
    #[arg(long, default_value_t = crate::spectral::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long = "max-iter", default_value_t = crate::spectral::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
}

impl SolverArgs {
    pub fn options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    #[arg(long, default_value_t = 3)]
    pub subdiv: u32,
    /// Output mesh; the extension selects OFF or OBJ.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long = "ring-depth", default_value_t = crate::diffgeo::DEFAULT_RING_DEPTH)]
    pub ring_depth: usize,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write PREFIX.stiffness.txt and PREFIX.mass.txt in coordinate format.
    #[arg(long = "dump-laplace")]
    pub dump_laplace: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub epsilon: f64,
    #[command(flatten)]
    pub constants: ConstantsArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long = "ring-depth", default_value_t = crate::diffgeo::DEFAULT_RING_DEPTH)]
    pub ring_depth: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Harmonic of the perturbation: `l<degree>` or `l<degree>m<order>`.
    #[arg(long, default_value = "l2")]
    pub family: String,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    pub subdiv: u32,
    #[arg(long, value_enum, default_value = "oracle")]
    pub geometry: SweepGeometryArg,
    #[arg(long = "ring-depth", default_value_t = crate::diffgeo::DEFAULT_RING_DEPTH)]
    pub ring_depth: usize,
    #[command(flatten)]
    pub constants: ConstantsArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    #[arg(long, value_delimiter = ',', default_value = "3,4,5,6")]
    pub levels: Vec<u32>,
    #[arg(long = "ring-depth", default_value_t = crate::diffgeo::DEFAULT_RING_DEPTH)]
    pub ring_depth: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub generated_unix_seconds: u64,
    pub threads: usize,
}

impl Metadata {
    pub fn now() -> Self {
        Metadata {
            tool: "umbilic",
            version: env!("CARGO_PKG_VERSION"),
            generated_unix_seconds: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            threads: rayon::current_num_threads(),
        }
    }
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    schema: &'static str,
    command: &'static str,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
    #[serde(flatten)]
    body: &'a T,
    metadata: Metadata,
}

fn json_document<T: Serialize>(command: &'static str, notes: Vec<String>, body: &T) -> Result<String, CliError> {
    let doc = Document {
        schema: SCHEMA,
        command,
        notes,
        body,
        metadata: Metadata::now(),
    };
    serde_json::to_string_pretty(&doc)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Serialize(e.to_string()))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes to `out` or returns the text for stdout.
fn emit(out: Option<&Path>, text: String) -> Result<Option<String>, CliError> {
    match out {
        Some(path) => {
            write_text(path, &text)?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}

fn csv_text<R: Serialize>(rows: &[R]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Serialize(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Serialize(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Serialize(e.to_string()))
}

fn load_valid_mesh(path: &Path) -> Result<Mesh, CliError> {
    let mesh = load_mesh(path, MeshFormat::from_path(path)?)?;
    let report = mesh.validate();
    if !report.is_valid() {
        return Err(CliError::InvalidMesh {
            failures: report.failures().into_iter().map(String::from).collect(),
        });
    }
    Ok(mesh)
}

/// Runs one command. Returns the text destined for stdout, if any.
pub fn run(cli: &Cli) -> Result<Option<String>, CliError> {
    match &cli.command {
        Command::Gen(a) => run_gen(a),
        Command::Analyze(a) => run_analyze(a),
        Command::Verify(a) => run_verify(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Converge(a) => run_converge(a),
    }
}

#[derive(Serialize)]
struct GenBody<'a> {
    surface: AnalyticSurface,
    subdivision: u32,
    output: String,
    vertices: usize,
    faces: usize,
    measures: &'a MeshMeasures,
}

fn run_gen(a: &GenArgs) -> Result<Option<String>, CliError> {
    let surface = a.surface.surface()?;
    let mesh = surface.generate(a.subdiv)?;
    mesh.save(&a.out)?;
    let measures = mesh.measures();
    let body = GenBody {
        surface,
        subdivision: a.subdiv,
        output: a.out.display().to_string(),
        vertices: mesh.vertex_count(),
        faces: mesh.face_count(),
        measures: &measures,
    };
    Ok(Some(json_document("gen", Vec::new(), &body)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct VertexRow {
    pub vertex: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub mean: f64,
    pub traceless_norm: f64,
    pub h2: f64,
    pub ricci_min: f64,
    pub scalar_curv: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormSummary {
    pub traceless_l2: f64,
    pub traceless_linf: f64,
    pub mean_l2: f64,
    pub mean_linf: f64,
    pub mean_average: f64,
    pub gauss_integral: f64,
    /// ‖Å‖₂ and ‖Å‖∞ of the unit-area rescaling.
    pub normalized_traceless_l2: f64,
    pub normalized_traceless_linf: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary {
    pub lambda1: f64,
    pub residual: f64,
    pub iterations: usize,
    pub near_degenerate: bool,
    pub upper_bound: UpperBound,
}

#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub vertices: usize,
    pub faces: usize,
    pub euler_characteristic: i64,
    pub validation: ValidationReport,
    pub measures: MeshMeasures,
    pub ring_depth: usize,
    pub convexity: ConvexityStatus,
    pub norms: NormSummary,
    pub spectrum: SpectrumSummary,
    pub per_vertex: Vec<VertexRow>,
}

pub fn analyze_mesh(mesh: &Mesh, ring_depth: usize, solver: SolverOptions) -> Result<Analysis, CliError> {
    let geometries = estimate_geometry(mesh, ring_depth)?;
    let weights = mesh.vertex_areas();
    let field =
        |f: &dyn Fn(&VertexGeometry) -> f64| ScalarField::new(geometries.iter().map(f).collect(), weights.clone());
    let traceless = field(&|g| g.traceless_norm)?;
    let mean = field(&|g| g.mean)?;
    let gauss = field(&|g| g.h2)?;
    let measures = mesh.measures();
    let (_, law) = normalize_mesh(mesh);
    let c = law.factor;
    // ‖Å‖ scales by 1/c and area by c², so the L² norm is invariant.
    let norms = NormSummary {
        traceless_l2: traceless.lp_norm(2.0, None)?,
        traceless_linf: traceless.lp_norm(f64::INFINITY, None)?,
        mean_l2: mean.lp_norm(2.0, None)?,
        mean_linf: mean.lp_norm(f64::INFINITY, None)?,
        mean_average: mean.integrate(None)? / measures.area,
        gauss_integral: gauss.integrate(None)?,
        normalized_traceless_l2: traceless.lp_norm(2.0, None)?,
        normalized_traceless_linf: traceless.lp_norm(f64::INFINITY, None)? / c,
    };
    let spectrum = lambda1(&build_laplace(mesh)?, solver)?;
    let per_vertex = geometries
        .iter()
        .zip(mesh.vertices())
        .enumerate()
        .map(|(vertex, (g, p))| VertexRow {
            vertex,
            x: p.x,
            y: p.y,
            z: p.z,
            kappa1: g.kappa.0,
            kappa2: g.kappa.1,
            mean: g.mean,
            traceless_norm: g.traceless_norm,
            h2: g.h2,
            ricci_min: g.ricci_min,
            scalar_curv: g.scalar_curv,
        })
        .collect();
    Ok(Analysis {
        vertices: mesh.vertex_count(),
        faces: mesh.face_count(),
        euler_characteristic: mesh.euler_characteristic(),
        validation: mesh.validate(),
        measures,
        ring_depth,
        convexity: convexity_status(&geometries),
        norms,
        spectrum: SpectrumSummary {
            lambda1: spectrum.lambda1,
            residual: spectrum.residual,
            iterations: spectrum.iterations,
            near_degenerate: spectrum.near_degenerate,
            upper_bound: lambda1_upper_bound(&geometries, SURFACE_DIM),
        },
        per_vertex,
    })
}

fn run_analyze(a: &AnalyzeArgs) -> Result<Option<String>, CliError> {
    let mesh = load_valid_mesh(&a.mesh)?;
    if let Some(prefix) = &a.dump_laplace {
        let (stiffness, mass) = build_laplace(&mesh)?.to_coordinate_text();
        let base = prefix.display().to_string();
        write_text(Path::new(&format!("{base}.stiffness.txt")), &stiffness)?;
        write_text(Path::new(&format!("{base}.mass.txt")), &mass)?;
    }
    let analysis = analyze_mesh(&mesh, a.ring_depth, a.solver.options())?;
    let text = match a.format {
        Format::Json => json_document("analyze", Vec::new(), &analysis)?,
        Format::Csv => csv_text(&analysis.per_vertex)?,
    };
    emit(a.out.as_deref(), text)
}

#[derive(Serialize)]
struct VerifyBody<'a> {
    mesh_path: String,
    report: &'a PinchingReport,
}

fn run_verify(a: &VerifyArgs) -> Result<Option<String>, CliError> {
    let (constants, note) = a.constants.constants(a.epsilon);
    constants.validate()?;
    let mesh = load_valid_mesh(&a.mesh)?;
    let options = VerifyOptions {
        geometry: GeometrySource::Estimated {
            ring_depth: a.ring_depth,
        },
        solver: a.solver.options(),
    };
    let report = verify_theorem(&mesh, &constants, &options)?;
    let body = VerifyBody {
        mesh_path: a.mesh.display().to_string(),
        report: &report,
    };
    emit(
        a.out.as_deref(),
        json_document("verify", note.into_iter().collect(), &body)?,
    )
}

/// Parses `l<degree>` or `l<degree>m<order>` (order may be negative).
pub fn parse_family(s: &str) -> Result<(u32, i32), CliError> {
    let bad = || CliError::Config(format!("family {s:?} is not of the form l<degree>[m<order>]"));
    let rest = s.strip_prefix('l').ok_or_else(bad)?;
    let (deg, ord) = match rest.split_once('m') {
        Some((d, o)) => (d, o),
        None => (rest, "0"),
    };
    Ok((deg.parse().map_err(|_| bad())?, ord.parse().map_err(|_| bad())?))
}

#[derive(Debug, Serialize)]
struct SweepCsvRow {
    kind: &'static str,
    epsilon: Option<f64>,
    delta: Option<f64>,
    max_ratio: Option<f64>,
    target_ratio: Option<f64>,
    oscillation: Option<f64>,
    contained: Option<bool>,
    hypothesis_holds: Option<bool>,
    lambda1: Option<f64>,
    slope: Option<f64>,
    intercept: Option<f64>,
}

pub fn sweep_csv(table: &SweepTable) -> Result<String, CliError> {
    let mut rows: Vec<SweepCsvRow> = table
        .rows
        .iter()
        .map(|r| SweepCsvRow {
            kind: "row",
            epsilon: Some(r.epsilon),
            delta: Some(r.delta),
            max_ratio: Some(r.max_ratio),
            target_ratio: Some(r.target_ratio),
            oscillation: Some(r.oscillation),
            contained: r.contained,
            hypothesis_holds: r.hypothesis_holds,
            lambda1: r.lambda1,
            slope: None,
            intercept: None,
        })
        .collect();
    rows.push(SweepCsvRow {
        kind: "fit",
        epsilon: None,
        delta: None,
        max_ratio: None,
        target_ratio: None,
        oscillation: None,
        contained: None,
        hypothesis_holds: None,
        lambda1: None,
        slope: table.fit.as_ref().map(|f| f.slope),
        intercept: table.fit.as_ref().map(|f| f.intercept),
    });
    csv_text(&rows)
}

#[derive(Serialize)]
struct SweepBody<'a> {
    table: &'a SweepTable,
}

fn run_sweep(a: &SweepArgs) -> Result<Option<String>, CliError> {
    let (degree, order) = parse_family(&a.family)?;
    if a.eps.iter().any(|e| !(*e > 0.0)) {
        return Err(CliError::Config("every --eps value must be positive".into()));
    }
    let (constants, note) = a.constants.constants(1.0);
    constants.validate()?;
    let options = SweepOptions {
        subdivision: a.subdiv,
        geometry: match a.geometry {
            SweepGeometryArg::Oracle => SweepGeometry::Oracle,
            SweepGeometryArg::Estimated => SweepGeometry::Estimated {
                ring_depth: a.ring_depth,
            },
        },
        solver: a.solver.options(),
        constants,
    };
    let family = SweepFamily {
        radius: a.radius,
        degree,
        order,
    };
    let table = sharpness_sweep(family, constants.alpha, &a.eps, &options)?;
    let text = match a.format {
        Format::Json => json_document("sweep", note.into_iter().collect(), &SweepBody { table: &table })?,
        Format::Csv => sweep_csv(&table)?,
    };
    emit(a.out.as_deref(), text)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub subdivision: u32,
    pub vertices: usize,
    pub mean_edge: f64,
    pub max_h_error: f64,
    pub mean_h_error: f64,
    pub lambda1: f64,
    /// Against the closed form, where one exists.
    pub lambda1_error: Option<f64>,
    /// Observed orders against the previous level.
    pub h_order: Option<f64>,
    pub lambda1_order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceSummary {
    /// Least-squares slope of ln(max H error) against ln(mean edge).
    pub h_order: Option<f64>,
    pub lambda1_order: Option<f64>,
    pub lambda1_error_decreasing: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub surface: AnalyticSurface,
    pub ring_depth: usize,
    pub rows: Vec<ConvergenceRow>,
    pub summary: ConvergenceSummary,
}

fn mean_edge_length(mesh: &Mesh) -> f64 {
    let mut total = 0.0;
    let mut count = 0usize;
    for f in mesh.faces() {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            if a < b {
                total += (mesh.vertices()[a] - mesh.vertices()[b]).norm();
                count += 1;
            }
        }
    }
    total / count.max(1) as f64
}

fn log_slope(h: &[f64], e: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = h
        .iter()
        .zip(e)
        .filter(|(h, e)| **h > 0.0 && **e > 0.0)
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    fit_line(&x, &y).map(|(s, _)| s)
}

/// Estimator and eigenvalue errors against the oracle across subdivision levels.
pub fn convergence_study(
    surface: &AnalyticSurface,
    levels: &[u32],
    ring_depth: usize,
    solver: SolverOptions,
) -> Result<ConvergenceTable, CliError> {
    if levels.is_empty() {
        return Err(CliError::Config("no subdivision levels given".into()));
    }
    let exact_lambda = surface.oracle_lambda1(SURFACE_DIM);
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(levels.len());
    for &s in levels {
        let mesh = surface.generate(s)?;
        let est = estimate_geometry(&mesh, ring_depth)?;
        let oracle = surface.oracle_geometry(&mesh);
        let errs: Vec<f64> = est.iter().zip(&oracle).map(|(e, o)| (e.mean - o.mean).abs()).collect();
        let max_h_error = errs.iter().copied().fold(0.0, f64::max);
        let mean_h_error = ScalarField::new(errs, mesh.vertex_areas())?.integrate(None)? / mesh.measures().area;
        let lam = lambda1(&build_laplace(&mesh)?, solver)?.lambda1;
        let lambda1_error = exact_lambda.map(|l| (lam - l).abs() / l);
        let mean_edge = mean_edge_length(&mesh);
        let (h_order, lambda1_order) = match rows.last() {
            Some(prev) => (
                log_slope(&[prev.mean_edge, mean_edge], &[prev.max_h_error, max_h_error]),
                match (prev.lambda1_error, lambda1_error) {
                    (Some(a), Some(b)) => log_slope(&[prev.mean_edge, mean_edge], &[a, b]),
                    _ => None,
                },
            ),
            None => (None, None),
        };
        rows.push(ConvergenceRow {
            subdivision: s,
            vertices: mesh.vertex_count(),
            mean_edge,
            max_h_error,
            mean_h_error,
            lambda1: lam,
            lambda1_error,
            h_order,
            lambda1_order,
        });
    }
    let h: Vec<f64> = rows.iter().map(|r| r.mean_edge).collect();
    let he: Vec<f64> = rows.iter().map(|r| r.max_h_error).collect();
    let le: Option<Vec<f64>> = rows.iter().map(|r| r.lambda1_error).collect();
    let summary = ConvergenceSummary {
        h_order: log_slope(&h, &he),
        lambda1_order: le.as_ref().and_then(|le| log_slope(&h, le)),
        lambda1_error_decreasing: le.as_ref().map(|le| le.windows(2).all(|w| w[1] < w[0])),
    };
    Ok(ConvergenceTable {
        surface: *surface,
        ring_depth,
        rows,
        summary,
    })
}

#[derive(Debug, Serialize)]
struct ConvergeCsvRow {
    kind: &'static str,
    subdivision: Option<u32>,
    vertices: Option<usize>,
    mean_edge: Option<f64>,
    max_h_error: Option<f64>,
    mean_h_error: Option<f64>,
    lambda1: Option<f64>,
    lambda1_error: Option<f64>,
    h_order: Option<f64>,
    lambda1_order: Option<f64>,
    lambda1_error_decreasing: Option<bool>,
}

pub fn convergence_csv(table: &ConvergenceTable) -> Result<String, CliError> {
    let mut rows: Vec<ConvergeCsvRow> = table
        .rows
        .iter()
        .map(|r| ConvergeCsvRow {
            kind: "level",
            subdivision: Some(r.subdivision),
            vertices: Some(r.vertices),
            mean_edge: Some(r.mean_edge),
            max_h_error: Some(r.max_h_error),
            mean_h_error: Some(r.mean_h_error),
            lambda1: Some(r.lambda1),
            lambda1_error: r.lambda1_error,
            h_order: r.h_order,
            lambda1_order: r.lambda1_order,
            lambda1_error_decreasing: None,
        })
        .collect();
    rows.push(ConvergeCsvRow {
        kind: "fit",
        subdivision: None,
        vertices: None,
        mean_edge: None,
        max_h_error: None,
        mean_h_error: None,
        lambda1: None,
        lambda1_error: None,
        h_order: table.summary.h_order,
        lambda1_order: table.summary.lambda1_order,
        lambda1_error_decreasing: table.summary.lambda1_error_decreasing,
    });
    csv_text(&rows)
}

#[derive(Serialize)]
struct ConvergeBody<'a> {
    table: &'a ConvergenceTable,
}

fn run_converge(a: &ConvergeArgs) -> Result<Option<String>, CliError> {
    let surface = a.surface.surface()?;
    let table = convergence_study(&surface, &a.levels, a.ring_depth, a.solver.options())?;
    let text = match a.format {
        Format::Json => json_document("converge", Vec::new(), &ConvergeBody { table: &table })?,
        Format::Csv => convergence_csv(&table)?,
    };
    emit(a.out.as_deref(), text)
}

/// Applies `UMBILIC_THREADS` to the global worker pool.
pub fn configure_threads(value: Option<&str>) -> Result<(), CliError> {
    let Some(v) = value else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} = {v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

/// Process entry: parses arguments, runs, prints, and returns the exit code.
pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    let threads = std::env::var(THREADS_ENV).ok();
    let result = configure_threads(threads.as_deref()).and_then(|_| run(&cli));
    match result {
        Ok(Some(text)) => {
            print!("{text}");
            0
        }
        Ok(None) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match serde_json::to_string(&e.record()) {
                Ok(json) => println!("{json}"),
                Err(_) => println!("{{\"schema\":\"{SCHEMA}\",\"error\":{{\"kind\":\"serialize\"}}}}"),
            }
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::fixtures::TETRA_OFF;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("umbilic").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn family_parsing() {
        assert_eq!(parse_family("l2").unwrap(), (2, 0));
        assert_eq!(parse_family("l3m-2").unwrap(), (3, -2));
        assert!(parse_family("2").is_err());
        assert!(parse_family("lxm1").is_err());
    }

    #[test]
    fn flags_and_defaults() {
        let cli = parse(&[
            "verify",
            "--mesh",
            "a.off",
            "--epsilon",
            "0.2",
            "--alpha",
            "0.05",
            "--L",
            "2",
            "--C-aubry",
            "3",
        ]);
        let Command::Verify(v) = cli.command else { panic!() };
        let (c, note) = v.constants.constants(v.epsilon);
        assert_eq!(c.alpha, ALPHA_FLOOR);
        assert!(note.is_some());
        assert_eq!((c.l_const, c.c_np_aubry, c.c_n, c.p_roth, c.n), (2.0, 3.0, 1.0, 3.0, 2));
        let cli = parse(&["sweep", "--family", "l2", "--eps", "0.4,0.2,0.1"]);
        let Command::Sweep(s) = cli.command else { panic!() };
        assert_eq!(s.eps, vec![0.4, 0.2, 0.1]);
        assert_eq!((s.subdiv, s.format), (5, Format::Csv));
        assert!(Cli::try_parse_from(["umbilic", "sweep"]).is_err());
    }

    #[test]
    fn invalid_mesh_names_failed_check() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("open.off");
        // Tetrahedron with its last face removed.
        let open = TETRA_OFF.replace("4 4 6", "4 3 6").replace("3 1 3 2\n", "");
        std::fs::write(&path, open).unwrap();
        let cli = parse(&["verify", "--mesh", path.to_str().unwrap(), "--epsilon", "0.1"]);
        let err = run(&cli).unwrap_err();
        assert_eq!(err.kind(), "invalid_mesh");
        assert!(err.failed_checks().contains(&"closed".to_string()));
        let record = serde_json::to_value(err.record()).unwrap();
        assert_eq!(record["schema"], SCHEMA);
    }

    #[test]
    fn gen_then_analyze() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.off");
        let p = path.to_str().unwrap();
        run(&parse(&["gen", "--kind", "sphere", "--subdiv", "3", "--out", p])).unwrap();
        let prefix = dir.path().join("lap");
        let text = run(&parse(&[
            "analyze",
            "--mesh",
            p,
            "--dump-laplace",
            prefix.to_str().unwrap(),
        ]))
        .unwrap()
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["vertices"], 642);
        let k = v["norms"]["gauss_integral"].as_f64().unwrap();
        assert!((k - 4.0 * std::f64::consts::PI).abs() < 0.05 * 4.0 * std::f64::consts::PI);
        assert!(dir.path().join("lap.stiffness.txt").exists());
        let csv = run(&parse(&["analyze", "--mesh", p, "--format", "csv"]))
            .unwrap()
            .unwrap();
        assert_eq!(csv.lines().count(), 643);
        assert!(csv.starts_with("vertex,x,y,z,kappa1"));
    }

    #[test]
    fn convergence_table_on_coarse_levels() {
        let t = convergence_study(&AnalyticSurface::sphere(1.0), &[2, 3, 4], 2, SolverOptions::default()).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert!(t.rows[0].h_order.is_none() && t.rows[1].h_order.is_some());
        assert_eq!(t.summary.lambda1_error_decreasing, Some(true));
        let csv = convergence_csv(&t).unwrap();
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.lines().last().unwrap().starts_with("fit,"));
    }

    #[test]
    fn thread_setting_validation() {
        assert!(configure_threads(None).is_ok());
        assert!(configure_threads(Some("zero")).is_err());
        assert!(configure_threads(Some("0")).is_err());
    }
}
