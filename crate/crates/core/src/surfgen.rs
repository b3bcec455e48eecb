//! Analytic test surfaces (round sphere, ellipsoid, harmonically perturbed
//! sphere), their icosphere meshes, and closed-form or finite-difference
//! curvature oracles.

use std::collections::HashMap;
use std::f64::consts::PI;

use nalgebra::{Matrix2, Point3, Vector3};
use serde::Serialize;
use thiserror::Error;

use crate::diffgeo::VertexGeometry;
use crate::mesh::Mesh;

pub const MAX_SUBDIVISION: u32 = 8;
pub const MAX_HARMONIC_DEGREE: u32 = 64;

/// Step of the centered finite differences used by the curvature oracle.
pub const FD_STEP: f64 = 1e-5;

#[derive(Debug, Error, PartialEq)]
pub enum SurfGenError {
    #[error("subdivision {0} exceeds the limit of {MAX_SUBDIVISION}")]
    SubdivisionOutOfRange(u32),
    #[error("surface parameters must be finite and positive: {0}")]
    InvalidParameter(String),
    #[error("perturbation amplitude {delta} breaks positivity: need |delta|*max|Y| = {bound} < radius {radius}")]
    PositivityViolated { delta: f64, bound: f64, radius: f64 },
    #[error("harmonic order {order} is not within [-{degree}, {degree}] (or degree too large)")]
    InvalidHarmonic { degree: u32, order: i32 },
    #[error("point parameters outside the chart: theta={theta}, phi={phi}")]
    OutsideChart { theta: f64, phi: f64 },
}

/// Real spherical harmonic, orthonormal on the unit sphere.
///
/// `order > 0` selects the cos(mφ) branch, `order < 0` the sin(|m|φ) branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphericalHarmonic {
    pub degree: u32,
    pub order: i32,
}

impl SphericalHarmonic {
    pub fn new(degree: u32, order: i32) -> Result<Self, SurfGenError> {
        if degree > MAX_HARMONIC_DEGREE || order.unsigned_abs() > degree {
            return Err(SurfGenError::InvalidHarmonic { degree, order });
        }
        Ok(SphericalHarmonic { degree, order })
    }

    fn normalization(&self) -> f64 {
        let l = self.degree as f64;
        let m = self.order.unsigned_abs();
        // (l-m)!/(l+m)!
        let mut ratio = 1.0;
        for k in (self.degree - m + 1)..=(self.degree + m) {
            ratio /= k as f64;
        }
        let k = ((2.0 * l + 1.0) / (4.0 * PI) * ratio).sqrt();
        if m == 0 {
            k
        } else {
            std::f64::consts::SQRT_2 * k
        }
    }

    /// Associated Legendre P_l^m(z) with the (1−z²)^{m/2} factor removed,
    /// so that the harmonic stays polynomial in Cartesian coordinates.
    fn legendre_reduced(&self, z: f64) -> f64 {
        let l = self.degree;
        let m = self.order.unsigned_abs();
        let mut pmm = 1.0;
        for k in 1..=m {
            pmm *= (2 * k - 1) as f64;
        }
        if l == m {
            return pmm;
        }
        let mut pm1 = z * (2 * m + 1) as f64 * pmm;
        if l == m + 1 {
            return pm1;
        }
        let mut pm2 = pmm;
        for ll in (m + 2)..=l {
            let next = ((2 * ll - 1) as f64 * z * pm1 - (ll + m - 1) as f64 * pm2) / (ll - m) as f64;
            pm2 = pm1;
            pm1 = next;
        }
        pm1
    }

    /// Evaluates at a unit direction.
    pub fn eval(&self, u: &Vector3<f64>) -> f64 {
        let m = self.order.unsigned_abs();
        // (x + iy)^m gives sin^m θ · (cos mφ, sin mφ).
        let (mut re, mut im) = (1.0, 0.0);
        for _ in 0..m {
            let r = re * u.x - im * u.y;
            im = re * u.y + im * u.x;
            re = r;
        }
        let azimuthal = match self.order.signum() {
            1 => re,
            -1 => im,
            _ => 1.0,
        };
        self.normalization() * self.legendre_reduced(u.z) * azimuthal
    }

    pub fn eval_angles(&self, theta: f64, phi: f64) -> f64 {
        self.eval(&direction(theta, phi))
    }

    /// max over the sphere of |Y|.
    pub fn max_abs(&self) -> f64 {
        let m = self.order.unsigned_abs() as i32;
        if m == 0 {
            // |P_l| ≤ 1 with equality at the poles.
            return self.normalization();
        }
        // The azimuthal factor reaches ±1, so only the polar profile matters.
        let profile = |theta: f64| {
            let (s, c) = theta.sin_cos();
            (self.normalization() * self.legendre_reduced(c) * s.powi(m)).abs()
        };
        let samples = 20_000;
        let step = PI / samples as f64;
        let (mut best_t, mut best) = (0.0, 0.0);
        for i in 0..=samples {
            let t = i as f64 * step;
            let v = profile(t);
            if v > best {
                best = v;
                best_t = t;
            }
        }
        // golden-section polish around the best grid sample
        let (mut lo, mut hi) = ((best_t - step).max(0.0), (best_t + step).min(PI));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..60 {
            let a = hi - g * (hi - lo);
            let b = lo + g * (hi - lo);
            if profile(a) > profile(b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        best.max(profile(0.5 * (lo + hi)))
    }
}

pub fn direction(theta: f64, phi: f64) -> Vector3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vector3::new(st * cp, st * sp, ct)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalyticSurface {
    Sphere {
        radius: f64,
    },
    Ellipsoid {
        a: f64,
        b: f64,
        c: f64,
    },
    /// Radial graph ρ = radius + amplitude·Y over the unit sphere.
    PerturbedSphere {
        radius: f64,
        amplitude: f64,
        harmonic: SphericalHarmonic,
    },
}

/// Closed-form or finite-difference curvature values at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleCurvatures {
    pub kappa1: f64,
    pub kappa2: f64,
    pub mean: f64,
    pub traceless_norm: f64,
    pub gauss: f64,
}

impl OracleCurvatures {
    fn from_mean_gauss(mean: f64, gauss: f64) -> Self {
        let disc = (mean * mean - gauss).max(0.0).sqrt();
        Self::from_principal(mean - disc, mean + disc)
    }

    fn from_principal(k1: f64, k2: f64) -> Self {
        let (k1, k2) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
        OracleCurvatures {
            kappa1: k1,
            kappa2: k2,
            mean: 0.5 * (k1 + k2),
            traceless_norm: (k2 - k1) / std::f64::consts::SQRT_2,
            gauss: k1 * k2,
        }
    }
}

impl AnalyticSurface {
    pub fn sphere(radius: f64) -> Self {
        AnalyticSurface::Sphere { radius }
    }

    pub fn ellipsoid(a: f64, b: f64, c: f64) -> Self {
        AnalyticSurface::Ellipsoid { a, b, c }
    }

    pub fn perturbed_sphere(radius: f64, amplitude: f64, degree: u32, order: i32) -> Result<Self, SurfGenError> {
        let s = AnalyticSurface::PerturbedSphere {
            radius,
            amplitude,
            harmonic: SphericalHarmonic::new(degree, order)?,
        };
        s.check()?;
        Ok(s)
    }

    pub fn check(&self) -> Result<(), SurfGenError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(SurfGenError::InvalidParameter(format!("{name} = {v}")))
            }
        };
        match *self {
            AnalyticSurface::Sphere { radius } => positive("radius", radius),
            AnalyticSurface::Ellipsoid { a, b, c } => {
                positive("a", a)?;
                positive("b", b)?;
                positive("c", c)
            }
            AnalyticSurface::PerturbedSphere {
                radius,
                amplitude,
                harmonic,
            } => {
                positive("radius", radius)?;
                if !amplitude.is_finite() {
                    return Err(SurfGenError::InvalidParameter(format!("amplitude = {amplitude}")));
                }
                SphericalHarmonic::new(harmonic.degree, harmonic.order)?;
                let bound = amplitude.abs() * harmonic.max_abs();
                if bound >= radius {
                    return Err(SurfGenError::PositivityViolated {
                        delta: amplitude,
                        bound,
                        radius,
                    });
                }
                Ok(())
            }
        }
    }

    /// The same surface under X → cX.
    pub fn scaled(&self, c: f64) -> Self {
        match *self {
            AnalyticSurface::Sphere { radius } => AnalyticSurface::Sphere { radius: c * radius },
            AnalyticSurface::Ellipsoid { a, b, c: cc } => AnalyticSurface::Ellipsoid {
                a: c * a,
                b: c * b,
                c: c * cc,
            },
            AnalyticSurface::PerturbedSphere {
                radius,
                amplitude,
                harmonic,
            } => AnalyticSurface::PerturbedSphere {
                radius: c * radius,
                amplitude: c * amplitude,
                harmonic,
            },
        }
    }

    /// Embedding of the unit sphere onto the surface.
    pub fn map(&self, u: &Vector3<f64>) -> Vector3<f64> {
        match *self {
            AnalyticSurface::Sphere { radius } => u * radius,
            AnalyticSurface::Ellipsoid { a, b, c } => Vector3::new(a * u.x, b * u.y, c * u.z),
            AnalyticSurface::PerturbedSphere {
                radius,
                amplitude,
                harmonic,
            } => u * (radius + amplitude * harmonic.eval(u)),
        }
    }

    /// Inverse of [`AnalyticSurface::map`] for points on the surface.
    pub fn direction_of(&self, p: &Point3<f64>) -> Vector3<f64> {
        match *self {
            AnalyticSurface::Ellipsoid { a, b, c } => Vector3::new(p.x / a, p.y / b, p.z / c).normalize(),
            _ => p.coords.normalize(),
        }
    }

    /// Icosphere with `20·4^subdivision` faces pushed onto the surface.
    pub fn generate(&self, subdivision: u32) -> Result<Mesh, SurfGenError> {
        if subdivision > MAX_SUBDIVISION {
            return Err(SurfGenError::SubdivisionOutOfRange(subdivision));
        }
        self.check()?;
        let (dirs, faces) = icosphere(subdivision);
        let vertices = dirs.iter().map(|u| Point3::from(self.map(u))).collect();
        Ok(Mesh::new(vertices, faces).expect("icosphere indices are valid"))
    }

    /// Curvatures at the point with polar angle `theta` and azimuth `phi`
    /// of the underlying unit-sphere parametrization.
    pub fn oracle_curvatures(&self, theta: f64, phi: f64) -> Result<OracleCurvatures, SurfGenError> {
        if !(0.0..=PI).contains(&theta) || !phi.is_finite() {
            return Err(SurfGenError::OutsideChart { theta, phi });
        }
        Ok(self.oracle_at_direction(&direction(theta, phi)).0)
    }

    /// Oracle curvatures and the outward unit normal at `map(u)`.
    pub fn oracle_at_direction(&self, u: &Vector3<f64>) -> (OracleCurvatures, Vector3<f64>) {
        match *self {
            AnalyticSurface::Sphere { radius } => (
                OracleCurvatures::from_principal(1.0 / radius, 1.0 / radius),
                u.normalize(),
            ),
            AnalyticSurface::Ellipsoid { a, b, c } => {
                let p = self.map(u);
                ellipsoid_curvatures(a, b, c, &p)
            }
            AnalyticSurface::PerturbedSphere { .. } => fd_curvatures(|v| self.map(v), u),
        }
    }

    /// Per-vertex oracle geometry for a mesh produced by [`AnalyticSurface::generate`].
    pub fn oracle_geometry(&self, mesh: &Mesh) -> Vec<VertexGeometry> {
        mesh.vertices()
            .iter()
            .map(|p| {
                let (oc, normal) = self.oracle_at_direction(&self.direction_of(p));
                VertexGeometry::from_shape_operator(normal, Matrix2::new(oc.kappa1, 0.0, 0.0, oc.kappa2))
            })
            .collect()
    }

    /// Closed-form λ₁ where one exists: n/r² for the round sphere.
    pub fn oracle_lambda1(&self, n: u32) -> Option<f64> {
        match *self {
            AnalyticSurface::Sphere { radius } => Some(n as f64 / (radius * radius)),
            _ => None,
        }
    }
}

/// Closed-form curvatures of x²/a² + y²/b² + z²/c² = 1 at a point on it.
pub fn ellipsoid_curvatures(a: f64, b: f64, c: f64, p: &Vector3<f64>) -> (OracleCurvatures, Vector3<f64>) {
    let (a2, b2, c2) = (a * a, b * b, c * c);
    let q = p.x * p.x / (a2 * a2) + p.y * p.y / (b2 * b2) + p.z * p.z / (c2 * c2);
    let abc2 = a2 * b2 * c2;
    let gauss = 1.0 / (abc2 * q * q);
    let mean = (a2 + b2 + c2 - p.norm_squared()) / (2.0 * abc2 * q.powf(1.5));
    let normal = Vector3::new(p.x / a2, p.y / b2, p.z / c2).normalize();
    (OracleCurvatures::from_mean_gauss(mean, gauss), normal)
}

/// Orthonormal tangent pair (e1, e2) with e1 × e2 = d.
pub fn tangent_frame(d: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let helper = if d.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e1 = (helper - d * d.dot(&helper)).normalize();
    let e2 = d.cross(&e1);
    (e1, e2)
}

/// Finite-difference curvature oracle for a star-shaped surface given as a
/// map from unit directions. Uses the local chart
/// (s, t) ↦ map(normalize(d + s·e1 + t·e2)) with centered differences.
pub fn fd_curvatures(
    map: impl Fn(&Vector3<f64>) -> Vector3<f64>,
    d: &Vector3<f64>,
) -> (OracleCurvatures, Vector3<f64>) {
    let d = d.normalize();
    let (e1, e2) = tangent_frame(&d);
    let x = |s: f64, t: f64| map(&(d + e1 * s + e2 * t).normalize());
    let h = FD_STEP;
    let x00 = x(0.0, 0.0);
    let (xp0, xm0, x0p, x0m) = (x(h, 0.0), x(-h, 0.0), x(0.0, h), x(0.0, -h));
    let xs = (xp0 - xm0) / (2.0 * h);
    let xt = (x0p - x0m) / (2.0 * h);
    let xss = (xp0 - x00 * 2.0 + xm0) / (h * h);
    let xtt = (x0p - x00 * 2.0 + x0m) / (h * h);
    let xst = (x(h, h) - x(h, -h) - x(-h, h) + x(-h, -h)) / (4.0 * h * h);
    let normal = xs.cross(&xt).normalize();
    let (e, f, g) = (xs.dot(&xs), xs.dot(&xt), xt.dot(&xt));
    // Second fundamental form with respect to the outward normal; the
    // sign flip makes convex surfaces positively curved.
    let (l, m, n) = (-xss.dot(&normal), -xst.dot(&normal), -xtt.dot(&normal));
    let det_i = e * g - f * f;
    let gauss = (l * n - m * m) / det_i;
    let mean = (e * n - 2.0 * f * m + g * l) / (2.0 * det_i);
    (OracleCurvatures::from_mean_gauss(mean, gauss), normal)
}

const ICOSAHEDRON_FACES: [[usize; 3]; 20] = [
    [0, 11, 5],
    [0, 5, 1],
    [0, 1, 7],
    [0, 7, 10],
    [0, 10, 11],
    [1, 5, 9],
    [5, 11, 4],
    [11, 10, 2],
    [10, 7, 6],
    [7, 1, 8],
    [3, 9, 4],
    [3, 4, 2],
    [3, 2, 6],
    [3, 6, 8],
    [3, 8, 9],
    [4, 9, 5],
    [2, 4, 11],
    [6, 2, 10],
    [8, 6, 7],
    [9, 8, 1],
];

/// Unit icosphere: subdivided icosahedron with midpoints reprojected.
/// Faces are counterclockwise seen from outside.
pub fn icosphere(subdivision: u32) -> (Vec<Vector3<f64>>, Vec<[usize; 3]>) {
    let t = 0.5 * (1.0 + 5f64.sqrt());
    let mut verts: Vec<Vector3<f64>> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vector3::new(x, y, z).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = ICOSAHEDRON_FACES.to_vec();

    for _ in 0..subdivision {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut mid = |a: usize, b: usize, verts: &mut Vec<Vector3<f64>>| -> usize {
            *midpoint.entry((a.min(b), a.max(b))).or_insert_with(|| {
                verts.push(((verts[a] + verts[b]) * 0.5).normalize());
                verts.len() - 1
            })
        };
        for &[a, b, c] in &faces {
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    (verts, faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn icosahedron_counts_and_orientation() {
        let m = AnalyticSurface::sphere(1.0).generate(0).unwrap();
        assert_eq!((m.vertex_count(), m.face_count()), (12, 20));
        assert!(m.validate().is_valid());
        assert!(m.measures().enclosed_volume > 0.0);
    }

    #[test]
    fn sphere_subdivision_three() {
        let m = AnalyticSurface::sphere(1.0).generate(3).unwrap();
        assert_eq!(m.face_count(), 1280);
        assert_eq!(m.euler_characteristic(), 2);
        for v in m.vertices() {
            assert!((v.coords.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_amplitude_and_round_ellipsoid_match_sphere() {
        let sphere = AnalyticSurface::sphere(1.0).generate(2).unwrap();
        let flat = AnalyticSurface::perturbed_sphere(1.0, 0.0, 2, 0)
            .unwrap()
            .generate(2)
            .unwrap();
        let round = AnalyticSurface::ellipsoid(1.0, 1.0, 1.0).generate(2).unwrap();
        assert_eq!(sphere.vertices(), flat.vertices());
        assert_eq!(sphere.vertices(), round.vertices());
        assert_eq!(sphere.faces(), flat.faces());
    }

    #[test]
    fn generation_guards() {
        assert_eq!(
            AnalyticSurface::sphere(1.0).generate(9).unwrap_err(),
            SurfGenError::SubdivisionOutOfRange(9)
        );
        assert!(matches!(
            AnalyticSurface::perturbed_sphere(1.0, 5.0, 2, 0),
            Err(SurfGenError::PositivityViolated { .. })
        ));
        assert!(AnalyticSurface::perturbed_sphere(1.0, 0.1, 2, 3).is_err());
        assert!(AnalyticSurface::sphere(-1.0).generate(0).is_err());
    }

    #[test]
    fn sphere_oracle() {
        let oc = AnalyticSurface::sphere(2.0).oracle_curvatures(0.3, 1.2).unwrap();
        assert_eq!(
            (oc.kappa1, oc.kappa2, oc.mean, oc.traceless_norm, oc.gauss),
            (0.5, 0.5, 0.5, 0.0, 0.25)
        );
        assert!(AnalyticSurface::sphere(1.0).oracle_curvatures(4.0, 0.0).is_err());
        assert!(AnalyticSurface::sphere(1.0).oracle_curvatures(1.0, f64::NAN).is_err());
    }

    #[test]
    fn ellipsoid_closed_form_matches_fd_oracle() {
        // Long-axis pole of (2,1,1) is umbilic with κ = a/b² = 2.
        let s = AnalyticSurface::ellipsoid(2.0, 1.0, 1.0);
        let pole = s.oracle_curvatures(PI / 2.0, 0.0).unwrap();
        assert_relative_eq!(pole.kappa1, 2.0, max_relative = 1e-12);
        assert_relative_eq!(pole.kappa2, 2.0, max_relative = 1e-12);
        let (fd, _) = fd_curvatures(|u| s.map(u), &Vector3::x());
        assert_relative_eq!(fd.kappa1, 2.0, max_relative = 1e-4);
        assert_relative_eq!(fd.kappa2, 2.0, max_relative = 1e-4);

        let s = AnalyticSurface::ellipsoid(2.0, 1.5, 0.8);
        for &(theta, phi) in &[(0.0, 0.0), (0.4, 0.3), (1.3, 2.9), (2.2, -1.0), (PI, 0.5)] {
            let closed = s.oracle_curvatures(theta, phi).unwrap();
            let (fd, _) = fd_curvatures(|u| s.map(u), &direction(theta, phi));
            assert_relative_eq!(closed.kappa1, fd.kappa1, max_relative = 1e-4);
            assert_relative_eq!(closed.kappa2, fd.kappa2, max_relative = 1e-4);
        }
    }

    #[test]
    fn fd_oracle_on_sphere() {
        let s = AnalyticSurface::sphere(3.0);
        let (fd, normal) = fd_curvatures(|u| s.map(u), &direction(1.0, 2.0));
        assert_relative_eq!(fd.mean, 1.0 / 3.0, max_relative = 1e-5);
        assert!(fd.traceless_norm < 1e-5);
        assert_relative_eq!(normal, direction(1.0, 2.0), epsilon = 1e-9);
    }

    #[test]
    fn perturbed_equator_mean_curvature_near_one() {
        let s = AnalyticSurface::perturbed_sphere(1.0, 0.01, 2, 0).unwrap();
        let oc = s.oracle_curvatures(PI / 2.0, 0.0).unwrap();
        assert!((oc.mean - 1.0).abs() < 0.05, "{oc:?}");
        assert!(oc.kappa1 > 0.0);
    }

    #[test]
    fn harmonic_orthonormality() {
        let ys = [
            SphericalHarmonic::new(0, 0).unwrap(),
            SphericalHarmonic::new(2, 0).unwrap(),
            SphericalHarmonic::new(2, 1).unwrap(),
            SphericalHarmonic::new(3, -2).unwrap(),
            SphericalHarmonic::new(4, 4).unwrap(),
        ];
        let (nt, np) = (400, 400);
        let mut gram = [[0.0; 5]; 5];
        for i in 0..nt {
            let theta = (i as f64 + 0.5) * PI / nt as f64;
            let w = theta.sin() * (PI / nt as f64) * (2.0 * PI / np as f64);
            for j in 0..np {
                let phi = j as f64 * 2.0 * PI / np as f64;
                let vals: Vec<f64> = ys.iter().map(|y| y.eval_angles(theta, phi)).collect();
                for (row, va) in gram.iter_mut().zip(&vals) {
                    for (g, vb) in row.iter_mut().zip(&vals) {
                        *g += w * va * vb;
                    }
                }
            }
        }
        for (a, row) in gram.iter().enumerate() {
            for (b, g) in row.iter().enumerate() {
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((g - expected).abs() < 1e-4, "gram[{a}][{b}] = {g}");
            }
        }
    }

    #[test]
    fn harmonic_closed_forms() {
        let y20 = SphericalHarmonic::new(2, 0).unwrap();
        let c = (5.0 / (16.0 * PI)).sqrt();
        assert_relative_eq!(
            y20.eval_angles(0.7, 0.0),
            c * (3.0 * 0.7f64.cos().powi(2) - 1.0),
            max_relative = 1e-13
        );
        assert_relative_eq!(y20.max_abs(), 2.0 * c, max_relative = 1e-13);
        // Y_11 ∝ x with max √(3/4π).
        let y11 = SphericalHarmonic::new(1, 1).unwrap();
        assert_relative_eq!(y11.max_abs(), (3.0 / (4.0 * PI)).sqrt(), max_relative = 1e-10);
    }

    #[test]
    fn oracle_lambda1_cases() {
        assert_eq!(AnalyticSurface::sphere(1.0).oracle_lambda1(2), Some(2.0));
        assert_relative_eq!(AnalyticSurface::sphere(3.0).oracle_lambda1(2).unwrap(), 2.0 / 9.0);
        assert_eq!(AnalyticSurface::ellipsoid(2.0, 1.0, 1.0).oracle_lambda1(2), None);
    }

    #[test]
    fn face_diameter_halves_under_subdivision() {
        let diam = |s: u32| {
            let m = AnalyticSurface::sphere(1.0).generate(s).unwrap();
            (0..m.face_count())
                .map(|f| {
                    let [a, b, c] = m.face_points(f);
                    (a - b).norm().max((b - c).norm()).max((c - a).norm())
                })
                .fold(0.0, f64::max)
        };
        for s in 1..5 {
            let ratio = diam(s) / diam(s + 1);
            assert!((ratio - 2.0).abs() < 0.1, "s={s} ratio={ratio}");
        }
    }
}
