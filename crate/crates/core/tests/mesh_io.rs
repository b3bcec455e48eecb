use approx::assert_relative_eq;
use umbilic::mesh::{load_mesh, parse_obj, parse_off, MeshFormat};
use umbilic::surfgen::AnalyticSurface;

#[test]
fn off_and_obj_round_trip() {
    let mesh = AnalyticSurface::ellipsoid(1.0, 1.3, 0.7).generate(2).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for (name, format) in [("m.off", MeshFormat::Off), ("m.obj", MeshFormat::Obj)] {
        let path = dir.path().join(name);
        mesh.save(&path).unwrap();
        let back = load_mesh(&path, format).unwrap();
        assert_eq!(back.faces(), mesh.faces());
        for (a, b) in back.vertices().iter().zip(mesh.vertices()) {
            assert_relative_eq!((a - b).norm(), 0.0, epsilon = 1e-15);
        }
        assert!(back.validate().is_valid());
    }
}

#[test]
fn polygons_are_fan_triangulated() {
    let cube = "OFF\n8 6 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n0 0 1\n1 0 1\n1 1 1\n0 1 1\n\
                4 0 3 2 1\n4 4 5 6 7\n4 0 1 5 4\n4 1 2 6 5\n4 2 3 7 6\n4 3 0 4 7\n";
    let mesh = parse_off(cube).unwrap();
    assert_eq!(mesh.face_count(), 12);
    assert!(mesh.validate().is_valid());
    assert_eq!(mesh.euler_characteristic(), 2);
    assert_relative_eq!(mesh.measures().area, 6.0, max_relative = 1e-14);
    assert_relative_eq!(mesh.measures().enclosed_volume, 1.0, max_relative = 1e-14);
}

#[test]
fn obj_accepts_slash_indices_and_negative_references() {
    let text = "v 1 1 1\nv 1 -1 -1\nv -1 1 -1\nv -1 -1 1\nvn 0 0 1\n\
                f 1//1 2//1 3//1\nf 1/1/1 4/1/1 2/1/1\nf -4 -2 -1\nf 2 4 3\n";
    let mesh = parse_obj(text).unwrap();
    assert_eq!(mesh.face_count(), 4);
    assert!(mesh.validate().is_valid());
}

#[test]
fn malformed_input_is_rejected() {
    assert!(parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n").is_err());
    assert!(parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n").is_err());
    assert!(parse_obj("v 0 0 0\nf 1 2 3\n").is_err());
}
