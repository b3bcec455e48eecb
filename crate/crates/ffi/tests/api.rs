use std::ffi::{CStr, CString};
use std::ptr;

use umbilic_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(umbilic_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn sphere(subdivision: u32) -> *mut UmbilicMesh {
    let mut mesh = ptr::null_mut();
    assert_eq!(
        unsafe { umbilic_mesh_sphere(1.0, subdivision, &mut mesh) },
        UmbilicStatus::Ok
    );
    assert!(!mesh.is_null());
    mesh
}

#[test]
fn sphere_counts_measures_and_validation() {
    let mesh = sphere(2);
    unsafe {
        assert_eq!(umbilic_mesh_vertex_count(mesh), 162);
        assert_eq!(umbilic_mesh_face_count(mesh), 320);
        let mut v = UmbilicValidation::default();
        assert_eq!(umbilic_mesh_validate(mesh, &mut v), UmbilicStatus::Ok);
        assert!(v.closed && v.oriented && v.connected && v.non_degenerate);
        let mut m = UmbilicMeasures::default();
        assert_eq!(umbilic_mesh_measures(mesh, &mut m), UmbilicStatus::Ok);
        assert!(
            m.area < 4.0 * std::f64::consts::PI && m.area > 0.95 * 4.0 * std::f64::consts::PI,
            "{}",
            m.area
        );
        assert!(m.enclosed_volume < 4.0 / 3.0 * std::f64::consts::PI && m.enclosed_volume > 3.9);
        assert!(m.barycenter.iter().all(|c| c.abs() < 1e-12));
        let mut s = UmbilicSpectrum::default();
        assert_eq!(umbilic_mesh_lambda1(mesh, 1e-8, 500, &mut s), UmbilicStatus::Ok);
        assert!((s.lambda1 - 2.0).abs() < 0.02);
        umbilic_mesh_free(mesh);
    }
}

#[test]
fn buffers_round_trip_and_bad_indices() {
    let xyz = [1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, 1.0, -1.0, -1.0, -1.0, 1.0];
    let tri: [u32; 12] = [0, 1, 2, 0, 3, 1, 0, 2, 3, 1, 3, 2];
    let mut mesh = ptr::null_mut();
    unsafe {
        assert_eq!(
            umbilic_mesh_from_buffers(xyz.as_ptr(), 4, tri.as_ptr(), 4, &mut mesh),
            UmbilicStatus::Ok
        );
        assert_eq!(umbilic_mesh_face_count(mesh), 4);
        umbilic_mesh_free(mesh);
        let bad: [u32; 3] = [0, 1, 9];
        let mut other = ptr::null_mut();
        let status = umbilic_mesh_from_buffers(xyz.as_ptr(), 4, bad.as_ptr(), 1, &mut other);
        assert_eq!(status, UmbilicStatus::Parse);
        assert!(other.is_null());
        assert!(last_error().contains("vertex 9"));
    }
}

#[test]
fn null_arguments_are_reported() {
    unsafe {
        assert_eq!(umbilic_mesh_sphere(1.0, 1, ptr::null_mut()), UmbilicStatus::NullPointer);
        assert!(last_error().contains("null"));
        let mut v = UmbilicValidation::default();
        assert_eq!(umbilic_mesh_validate(ptr::null(), &mut v), UmbilicStatus::NullPointer);
        assert_eq!(umbilic_mesh_vertex_count(ptr::null()), 0);
        assert_eq!(umbilic_report_contained(ptr::null()), -1);
        assert!(umbilic_report_lambda1(ptr::null()).is_nan());
        umbilic_mesh_free(ptr::null_mut());
        umbilic_report_free(ptr::null_mut());
        umbilic_string_free(ptr::null_mut());
    }
}

#[test]
fn load_reports_io_and_format_errors() {
    let missing = CString::new("/nonexistent/mesh.off").unwrap();
    let mut mesh = ptr::null_mut();
    unsafe {
        assert_eq!(umbilic_mesh_load(missing.as_ptr(), &mut mesh), UmbilicStatus::Io);
        let unknown = CString::new("mesh.stl").unwrap();
        assert_eq!(
            umbilic_mesh_load(unknown.as_ptr(), &mut mesh),
            UmbilicStatus::InvalidArgument
        );
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.off");
    std::fs::write(
        &path,
        "OFF\n4 4 6\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n3 0 1 2\n3 0 3 1\n3 0 2 3\n3 1 3 2\n",
    )
    .unwrap();
    let c = CString::new(path.to_str().unwrap()).unwrap();
    unsafe {
        assert_eq!(umbilic_mesh_load(c.as_ptr(), &mut mesh), UmbilicStatus::Ok);
        assert_eq!(umbilic_mesh_vertex_count(mesh), 4);
        umbilic_mesh_free(mesh);
    }
}

#[test]
fn verify_sphere_and_read_json() {
    let mesh = sphere(4);
    let constants = umbilic_constants_default(0.5, 0.3);
    assert_eq!((constants.n, constants.p_roth), (2, 3.0));
    let mut report = ptr::null_mut();
    unsafe {
        assert_eq!(
            umbilic_verify(mesh, &constants, 2, 1e-8, 500, &mut report),
            UmbilicStatus::Ok
        );
        assert_eq!(umbilic_report_contained(report), 1);
        assert!((umbilic_report_lambda1(report) - 2.0).abs() < 0.02);
        assert!(umbilic_report_oscillation(report) < 1e-12);
        let mut text = ptr::null_mut();
        assert_eq!(umbilic_report_json(report, &mut text), UmbilicStatus::Ok);
        let json: serde_json::Value = serde_json::from_str(CStr::from_ptr(text).to_str().unwrap()).unwrap();
        assert_eq!(json["schema"], "umbilic/1");
        assert_eq!(json["report"]["constants"]["L"], 1.0);
        umbilic_string_free(text);
        umbilic_report_free(report);
        umbilic_mesh_free(mesh);
    }
}

#[test]
fn verify_rejects_bad_constants_and_open_meshes() {
    let mesh = sphere(1);
    let mut report = ptr::null_mut();
    unsafe {
        let bad = umbilic_constants_default(1.5, 0.1);
        assert_eq!(
            umbilic_verify(mesh, &bad, 2, 1e-8, 500, &mut report),
            UmbilicStatus::InvalidArgument
        );
        assert!(last_error().contains("alpha"));
        umbilic_mesh_free(mesh);

        let xyz = [1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, 1.0, -1.0, -1.0, -1.0, 1.0];
        let tri: [u32; 9] = [0, 1, 2, 0, 3, 1, 0, 2, 3];
        let mut open = ptr::null_mut();
        assert_eq!(
            umbilic_mesh_from_buffers(xyz.as_ptr(), 4, tri.as_ptr(), 3, &mut open),
            UmbilicStatus::Ok
        );
        let ok = umbilic_constants_default(0.5, 0.1);
        assert_eq!(
            umbilic_verify(open, &ok, 2, 1e-8, 500, &mut report),
            UmbilicStatus::InvalidMesh
        );
        assert!(last_error().contains("closed"));
        assert!(report.is_null());
        umbilic_mesh_free(open);
    }
}

#[test]
fn perturbed_sphere_guards_positivity() {
    let mut mesh = ptr::null_mut();
    unsafe {
        assert_eq!(
            umbilic_mesh_perturbed_sphere(1.0, 5.0, 2, 0, 2, &mut mesh),
            UmbilicStatus::InvalidArgument
        );
        assert_eq!(
            umbilic_mesh_perturbed_sphere(1.0, 0.05, 2, 0, 2, &mut mesh),
            UmbilicStatus::Ok
        );
        umbilic_mesh_free(mesh);
        assert_eq!(
            umbilic_mesh_ellipsoid(1.0, 2.0, 3.0, 9, &mut mesh),
            UmbilicStatus::InvalidArgument
        );
    }
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(umbilic_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
