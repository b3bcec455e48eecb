//! C ABI over the `umbilic` crate.
//!
//! Meshes and reports are opaque heap handles released with their `_free`
//! functions. Every fallible call returns an [`UmbilicStatus`]; on failure the
//! message is available from [`umbilic_last_error`] on the same thread until
//! the next failing call. Panics are caught at the boundary and reported as
//! `UMBILIC_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use nalgebra::Point3;
use umbilic::cli::SCHEMA;
use umbilic::mesh::MeshError;
use umbilic::pinching::{GeometrySource, PinchingError, PinchingReport};
use umbilic::{load_mesh, AnalyticSurface, Mesh, MeshFormat, PinchingConstants, SolverOptions, VerifyOptions};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UmbilicStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    InvalidMesh = 5,
    Geometry = 6,
    Spectral = 7,
    Pinching = 8,
    Panic = 99,
}

/// Opaque triangle mesh.
pub struct UmbilicMesh(Mesh);

/// Opaque verification report.
pub struct UmbilicReport(PinchingReport);

/// Analytic constants of a verification run. A non-positive `c_override`
/// selects the convexity threshold.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct UmbilicConstants {
    pub alpha: f64,
    pub epsilon: f64,
    pub n: u32,
    pub p_roth: f64,
    pub l_const: f64,
    pub c_n: f64,
    pub c_np_aubry: f64,
    pub c_override: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct UmbilicValidation {
    pub closed: bool,
    pub oriented: bool,
    pub connected: bool,
    pub non_degenerate: bool,
    pub min_face_area: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct UmbilicMeasures {
    pub area: f64,
    pub barycenter: [f64; 3],
    pub enclosed_volume: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct UmbilicSpectrum {
    pub lambda1: f64,
    pub residual: f64,
    pub iterations: u32,
    pub near_degenerate: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let clean = message.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(clean).unwrap_or_default());
}

struct Failure(UmbilicStatus, String);

impl Failure {
    fn null(what: &str) -> Self {
        Failure(UmbilicStatus::NullPointer, format!("{what} is null"))
    }

    fn arg(message: impl Into<String>) -> Self {
        Failure(UmbilicStatus::InvalidArgument, message.into())
    }
}

impl From<MeshError> for Failure {
    fn from(e: MeshError) -> Self {
        let status = match e {
            MeshError::Io { .. } => UmbilicStatus::Io,
            MeshError::UnknownFormat(_) => UmbilicStatus::InvalidArgument,
            _ => UmbilicStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

impl From<PinchingError> for Failure {
    fn from(e: PinchingError) -> Self {
        let status = match e {
            PinchingError::InvalidMesh { .. } => UmbilicStatus::InvalidMesh,
            PinchingError::InvalidConstants(_) => UmbilicStatus::InvalidArgument,
            PinchingError::Geometry(_) => UmbilicStatus::Geometry,
            PinchingError::Spectral(_) => UmbilicStatus::Spectral,
            _ => UmbilicStatus::Pinching,
        };
        Failure(status, e.to_string())
    }
}

/// Runs `body` behind the panic boundary and records any failure.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> UmbilicStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => UmbilicStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            set_last_error(&format!("panic: {message}"));
            UmbilicStatus::Panic
        }
    }
}

unsafe fn mesh_ref<'a>(mesh: *const UmbilicMesh) -> Result<&'a Mesh, Failure> {
    mesh.as_ref().map(|m| &m.0).ok_or_else(|| Failure::null("mesh"))
}

unsafe fn store_mesh(out: *mut *mut UmbilicMesh, mesh: Mesh) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null("out"));
    }
    *out = Box::into_raw(Box::new(UmbilicMesh(mesh)));
    Ok(())
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn umbilic_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn umbilic_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads an OFF or OBJ file, chosen by extension.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn umbilic_mesh_load(path: *const c_char, out: *mut *mut UmbilicMesh) -> UmbilicStatus {
    guard(|| {
        if path.is_null() {
            return Err(Failure::null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| Failure::arg("path is not valid UTF-8"))?;
        let path = Path::new(path);
        let mesh = load_mesh(path, MeshFormat::from_path(path)?)?;
        store_mesh(out, mesh)
    })
}

/// Builds a mesh from `vertex_count` xyz triples and `face_count` index triples.
///
/// # Safety
/// `xyz` must hold `3·vertex_count` doubles and `triangles` `3·face_count`
/// indices; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn umbilic_mesh_from_buffers(
    xyz: *const f64,
    vertex_count: usize,
    triangles: *const u32,
    face_count: usize,
    out: *mut *mut UmbilicMesh,
) -> UmbilicStatus {
    guard(|| {
        if xyz.is_null() || triangles.is_null() {
            return Err(Failure::null("buffer"));
        }
        let coords = std::slice::from_raw_parts(xyz, 3 * vertex_count);
        let idx = std::slice::from_raw_parts(triangles, 3 * face_count);
        let vertices = coords.chunks_exact(3).map(|c| Point3::new(c[0], c[1], c[2])).collect();
        let faces = idx
            .chunks_exact(3)
            .map(|t| [t[0] as usize, t[1] as usize, t[2] as usize])
            .collect();
        store_mesh(out, Mesh::new(vertices, faces)?)
    })
}

unsafe fn generate(
    surface: Result<AnalyticSurface, String>,
    subdivision: u32,
    out: *mut *mut UmbilicMesh,
) -> UmbilicStatus {
    guard(|| {
        let surface = surface.map_err(Failure::arg)?;
        let mesh = surface.generate(subdivision).map_err(|e| Failure::arg(e.to_string()))?;
        store_mesh(out, mesh)
    })
}

/// Subdivided icosphere of the given radius.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn umbilic_mesh_sphere(
    radius: f64,
    subdivision: u32,
    out: *mut *mut UmbilicMesh,
) -> UmbilicStatus {
    generate(Ok(AnalyticSurface::sphere(radius)), subdivision, out)
}

/// Ellipsoid with semi-axes a, b, c.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn umbilic_mesh_ellipsoid(
    a: f64,
    b: f64,
    c: f64,
    subdivision: u32,
    out: *mut *mut UmbilicMesh,
) -> UmbilicStatus {
    generate(Ok(AnalyticSurface::ellipsoid(a, b, c)), subdivision, out)
}

/// Radial graph radius + delta·Y_{degree,order} over the unit sphere.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn umbilic_mesh_perturbed_sphere(
    radius: f64,
    delta: f64,
    degree: u32,
    order: i32,
    subdivision: u32,
    out: *mut *mut UmbilicMesh,
) -> UmbilicStatus {
    let surface = AnalyticSurface::perturbed_sphere(radius, delta, degree, order).map_err(|e| e.to_string());
    generate(surface, subdivision, out)
}

/// # Safety
/// `mesh` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn umbilic_mesh_free(mesh: *mut UmbilicMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// # Safety
/// `mesh` must be a live handle or null (yields 0).
#[no_mangle]
pub unsafe extern "C" fn umbilic_mesh_vertex_count(mesh: *const UmbilicMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.0.vertex_count())
}

/// # Safety
/// `mesh` must be a live handle or null (yields 0).
#[no_mangle]
pub unsafe extern "C" fn umbilic_mesh_face_count(mesh: *const UmbilicMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.0.face_count())
}

/// # Safety
/// `mesh` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn umbilic_mesh_validate(mesh: *const UmbilicMesh, out: *mut UmbilicValidation) -> UmbilicStatus {
    guard(|| {
        let mesh = mesh_ref(mesh)?;
        let out = out.as_mut().ok_or_else(|| Failure::null("out"))?;
        let r = mesh.validate();
        *out = UmbilicValidation {
            closed: r.closed,
            oriented: r.oriented,
            connected: r.connected,
            non_degenerate: r.non_degenerate,
            min_face_area: r.min_face_area,
        };
        Ok(())
    })
}

/// # Safety
/// `mesh` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn umbilic_mesh_measures(mesh: *const UmbilicMesh, out: *mut UmbilicMeasures) -> UmbilicStatus {
    guard(|| {
        let mesh = mesh_ref(mesh)?;
        let out = out.as_mut().ok_or_else(|| Failure::null("out"))?;
        let m = mesh.measures();
        *out = UmbilicMeasures {
            area: m.area,
            barycenter: [m.barycenter.x, m.barycenter.y, m.barycenter.z],
            enclosed_volume: m.enclosed_volume,
        };
        Ok(())
    })
}

/// First nonzero Laplace–Beltrami eigenvalue.
///
/// # Safety
/// `mesh` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn umbilic_mesh_lambda1(
    mesh: *const UmbilicMesh,
    tol: f64,
    max_iter: u32,
    out: *mut UmbilicSpectrum,
) -> UmbilicStatus {
    guard(|| {
        let mesh = mesh_ref(mesh)?;
        let out = out.as_mut().ok_or_else(|| Failure::null("out"))?;
        let opts = SolverOptions {
            tol,
            max_iter: max_iter as usize,
        };
        let r =
            umbilic::spectral::mesh_lambda1(mesh, opts).map_err(|e| Failure(UmbilicStatus::Spectral, e.to_string()))?;
        *out = UmbilicSpectrum {
            lambda1: r.lambda1,
            residual: r.residual,
            iterations: r.iterations as u32,
            near_degenerate: r.near_degenerate,
        };
        Ok(())
    })
}

/// Default constants: n = 2, p_roth = 3, L = c_n = C(n,p) = 1, threshold c.
#[no_mangle]
pub extern "C" fn umbilic_constants_default(alpha: f64, epsilon: f64) -> UmbilicConstants {
    let c = PinchingConstants::new(alpha, epsilon);
    UmbilicConstants {
        alpha: c.alpha,
        epsilon: c.epsilon,
        n: c.n,
        p_roth: c.p_roth,
        l_const: c.l_const,
        c_n: c.c_n,
        c_np_aubry: c.c_np_aubry,
        c_override: 0.0,
    }
}

/// Full verification with estimated curvature.
///
/// # Safety
/// `mesh` must be a live handle, `constants` readable, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn umbilic_verify(
    mesh: *const UmbilicMesh,
    constants: *const UmbilicConstants,
    ring_depth: u32,
    tol: f64,
    max_iter: u32,
    out: *mut *mut UmbilicReport,
) -> UmbilicStatus {
    guard(|| {
        let mesh = mesh_ref(mesh)?;
        let c = constants.as_ref().ok_or_else(|| Failure::null("constants"))?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let constants = PinchingConstants {
            alpha: c.alpha,
            epsilon: c.epsilon,
            n: c.n,
            p_roth: c.p_roth,
            l_const: c.l_const,
            c_n: c.c_n,
            c_np_aubry: c.c_np_aubry,
            c_override: (c.c_override > 0.0).then_some(c.c_override),
        };
        let options = VerifyOptions {
            geometry: GeometrySource::Estimated {
                ring_depth: ring_depth as usize,
            },
            solver: SolverOptions {
                tol,
                max_iter: max_iter as usize,
            },
        };
        let report = umbilic::verify_theorem(mesh, &constants, &options)?;
        *out = Box::into_raw(Box::new(UmbilicReport(report)));
        Ok(())
    })
}

fn tri_state(v: Option<bool>) -> i32 {
    match v {
        Some(true) => 1,
        Some(false) => 0,
        None => -1,
    }
}

/// 1 holds, 0 fails, −1 not evaluated or null handle.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn umbilic_report_hypothesis_holds(report: *const UmbilicReport) -> i32 {
    tri_state(report.as_ref().and_then(|r| r.0.hypothesis_holds))
}

/// 1 contained, 0 not, −1 not evaluated or null handle.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn umbilic_report_contained(report: *const UmbilicReport) -> i32 {
    tri_state(report.as_ref().and_then(|r| r.0.contained))
}

/// λ₁ at the input scale, NaN when not evaluated.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn umbilic_report_lambda1(report: *const UmbilicReport) -> f64 {
    report.as_ref().and_then(|r| r.0.lambda1).unwrap_or(f64::NAN)
}

/// max − min of the vertex distance to the barycenter, NaN for null.
///
/// # Safety
/// `report` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn umbilic_report_oscillation(report: *const UmbilicReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.0.oscillation)
}

/// The report as a JSON document; release it with [`umbilic_string_free`].
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn umbilic_report_json(report: *const UmbilicReport, out: *mut *mut c_char) -> UmbilicStatus {
    guard(|| {
        let report = report.as_ref().ok_or_else(|| Failure::null("report"))?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let doc = serde_json::json!({ "schema": SCHEMA, "report": &report.0 });
        let text = serde_json::to_string(&doc).map_err(|e| Failure(UmbilicStatus::Pinching, e.to_string()))?;
        *out = CString::new(text)
            .map_err(|e| Failure(UmbilicStatus::Pinching, e.to_string()))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `report` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn umbilic_report_free(report: *mut UmbilicReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn umbilic_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
