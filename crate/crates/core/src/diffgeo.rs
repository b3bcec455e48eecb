//! Per-vertex shape operator estimation and the curvature quantities derived
//! from it: principal curvatures, normalized mean curvature, the norm of the
//! traceless second fundamental form, H₂ and the Gauss-formula Ricci tensor.
//!
//! The estimator fits a height-function jet over a k-ring neighbourhood in
//! the tangent frame of the area-weighted vertex normal. With at least twelve
//! neighbours the jet is cubic (second-order accurate curvatures on smooth
//! samples), otherwise quadratic.

use nalgebra::{DMatrix, DVector, Matrix2, Vector3};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::mesh::Mesh;
use crate::surfgen::tangent_frame;

pub const DEFAULT_RING_DEPTH: usize = 2;
const MIN_NEIGHBOURS: usize = 6;
const CUBIC_NEIGHBOURS: usize = 12;
const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("vertex {vertex}: neighbourhood has {found} vertices, need at least {MIN_NEIGHBOURS}")]
    Underdetermined { vertex: usize, found: usize },
    #[error("vertex {vertex}: degenerate geometry ({reason})")]
    RankDeficient { vertex: usize, reason: &'static str },
    #[error("ring depth must be at least 1")]
    InvalidRingDepth,
}

/// Curvature record of one vertex. Only frame-invariant quantities are
/// meaningful; the shape operator is expressed in an arbitrary orthonormal
/// tangent frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexGeometry {
    pub normal: Vector3<f64>,
    pub shape_operator: Matrix2<f64>,
    /// κ₁ ≤ κ₂.
    pub kappa: (f64, f64),
    /// (κ₁ + κ₂)/2.
    pub mean: f64,
    /// ‖Å‖ = |κ₁ − κ₂|/√2.
    pub traceless_norm: f64,
    /// κ₁κ₂.
    pub h2: f64,
    pub ricci_min: f64,
    pub scalar_curv: f64,
}

impl VertexGeometry {
    /// `shape` must be symmetric.
    pub fn from_shape_operator(normal: Vector3<f64>, shape: Matrix2<f64>) -> Self {
        let (k1, k2) = symmetric_eigenvalues(&shape);
        let ricci = ricci_from_gauss(&[k1, k2]);
        VertexGeometry {
            normal,
            shape_operator: shape,
            kappa: (k1, k2),
            mean: 0.5 * (k1 + k2),
            traceless_norm: (k2 - k1) / std::f64::consts::SQRT_2,
            h2: k1 * k2,
            ricci_min: ricci.ricci_min,
            scalar_curv: ricci.scalar_curv,
        }
    }

    /// The record of the same point on the surface scaled by `c`.
    pub fn rescaled(&self, c: f64) -> Self {
        let c2 = c * c;
        VertexGeometry {
            normal: self.normal,
            shape_operator: self.shape_operator / c,
            kappa: (self.kappa.0 / c, self.kappa.1 / c),
            mean: self.mean / c,
            traceless_norm: self.traceless_norm / c,
            h2: self.h2 / c2,
            ricci_min: self.ricci_min / c2,
            scalar_curv: self.scalar_curv / c2,
        }
    }

    /// Gaussian curvature K; equals H₂ for surfaces.
    pub fn gauss(&self) -> f64 {
        self.h2
    }

    /// ‖A − μg‖ in the principal frame.
    pub fn deviation_from(&self, mu: f64) -> f64 {
        let (a, b) = (self.kappa.0 - mu, self.kappa.1 - mu);
        (a * a + b * b).sqrt()
    }
}

/// Eigenvalues of a symmetric 2×2 matrix, ascending.
fn symmetric_eigenvalues(s: &Matrix2<f64>) -> (f64, f64) {
    let mean = 0.5 * (s[(0, 0)] + s[(1, 1)]);
    let half_diff = 0.5 * (s[(0, 0)] - s[(1, 1)]);
    let off = 0.5 * (s[(0, 1)] + s[(1, 0)]);
    let r = half_diff.hypot(off);
    (mean - r, mean + r)
}

/// Ricci eigenvalues from the Gauss equation R_ij = nH h_ij − h_ik h^k_j,
/// evaluated in the principal frame of an n-dimensional hypersurface whose
/// principal curvatures are `kappas` (n = kappas.len()).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussRicci {
    pub eigenvalues: Vec<f64>,
    pub ricci_min: f64,
    pub scalar_curv: f64,
}

pub fn ricci_from_gauss(kappas: &[f64]) -> GaussRicci {
    let trace: f64 = kappas.iter().sum(); // nH
    let eigenvalues: Vec<f64> = kappas.iter().map(|&k| trace * k - k * k).collect();
    let ricci_min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let sq: f64 = kappas.iter().map(|k| k * k).sum();
    GaussRicci {
        eigenvalues,
        ricci_min,
        scalar_curv: trace * trace - sq,
    }
}

/// (Ric_min/μ² − (n−1))₋ : the Ricci deficit on the surface rescaled by μ.
pub fn ricci_deficit(ricci_min: f64, mu: f64, n: u32) -> f64 {
    ((n as f64 - 1.0) - ricci_min / (mu * mu)).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvexityStatus {
    pub mean_convex: bool,
    pub strictly_convex: bool,
    pub min_kappa1: f64,
    pub min_h: f64,
}

pub fn convexity_status(geometries: &[VertexGeometry]) -> ConvexityStatus {
    let min_kappa1 = geometries.iter().map(|g| g.kappa.0).fold(f64::INFINITY, f64::min);
    let min_h = geometries.iter().map(|g| g.mean).fold(f64::INFINITY, f64::min);
    ConvexityStatus {
        mean_convex: min_h > 0.0,
        strictly_convex: min_kappa1 > 0.0 && min_h > 0.0,
        min_kappa1,
        min_h,
    }
}

/// Area-weighted average of incident face normals (unnormalized sum of
/// face cross products, then normalized).
pub fn vertex_normal(mesh: &Mesh, v: usize) -> Option<Vector3<f64>> {
    let sum = mesh
        .vertex_faces(v)
        .iter()
        .fold(Vector3::zeros(), |acc, &f| acc + mesh.face_cross(f));
    let len = sum.norm();
    (len > 0.0 && len.is_finite()).then(|| sum / len)
}

/// Estimates the shape operator at every vertex. Results are independent of
/// the thread schedule: each vertex is fit on its own.
pub fn estimate_geometry(mesh: &Mesh, ring_depth: usize) -> Result<Vec<VertexGeometry>, GeometryError> {
    if ring_depth == 0 {
        return Err(GeometryError::InvalidRingDepth);
    }
    (0..mesh.vertex_count())
        .into_par_iter()
        .map(|v| estimate_vertex(mesh, v, ring_depth))
        .collect()
}

pub fn estimate_vertex(mesh: &Mesh, v: usize, ring_depth: usize) -> Result<VertexGeometry, GeometryError> {
    let neighbours = mesh.k_ring(v, ring_depth);
    if neighbours.len() < MIN_NEIGHBOURS {
        return Err(GeometryError::Underdetermined {
            vertex: v,
            found: neighbours.len(),
        });
    }
    let normal = vertex_normal(mesh, v).ok_or(GeometryError::RankDeficient {
        vertex: v,
        reason: "vanishing vertex normal",
    })?;
    let (e1, e2) = tangent_frame(&normal);
    let origin = mesh.vertices()[v];

    let local: Vec<Vector3<f64>> = neighbours
        .iter()
        .map(|&w| {
            let d = mesh.vertices()[w] - origin;
            Vector3::new(d.dot(&e1), d.dot(&e2), d.dot(&normal))
        })
        .collect();
    let scale = local.iter().map(|p| p.norm()).sum::<f64>() / local.len() as f64;
    if !(scale > 0.0) {
        return Err(GeometryError::RankDeficient {
            vertex: v,
            reason: "coincident neighbours",
        });
    }

    let cubic = neighbours.len() >= CUBIC_NEIGHBOURS;
    let cols = if cubic { 9 } else { 5 };
    let mut design = DMatrix::<f64>::zeros(local.len(), cols);
    let mut rhs = DVector::<f64>::zeros(local.len());
    for (row, p) in local.iter().enumerate() {
        let (x, y) = (p.x / scale, p.y / scale);
        let basis = [
            x,
            y,
            0.5 * x * x,
            x * y,
            0.5 * y * y,
            x * x * x,
            x * x * y,
            x * y * y,
            y * y * y,
        ];
        for c in 0..cols {
            design[(row, c)] = basis[c];
        }
        rhs[row] = p.z / scale;
    }
    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > RANK_TOLERANCE * smax) {
        return Err(GeometryError::RankDeficient {
            vertex: v,
            reason: "ill-conditioned jet fit",
        });
    }
    let coef = svd.solve(&rhs, 0.0).map_err(|_| GeometryError::RankDeficient {
        vertex: v,
        reason: "jet fit failed",
    })?;

    // Height function z(x, y) in physical units: gradient is scale free,
    // the Hessian picks up 1/scale.
    let grad = nalgebra::Vector2::new(coef[0], coef[1]);
    let hess = Matrix2::new(coef[2], coef[3], coef[3], coef[4]) / scale;
    let w = (1.0 + grad.norm_squared()).sqrt();
    // First fundamental form I = Id + ∇z∇zᵀ, second II = ∇²z / w.
    // The shape operator I⁻¹(−II) is similar to I^{-1/2}(−II)I^{-1/2}.
    let first = Matrix2::identity() + grad * grad.transpose();
    let inv_sqrt = inverse_sqrt_spd(&first);
    let mut shape = inv_sqrt * (-hess / w) * inv_sqrt;
    shape = 0.5 * (shape + shape.transpose());
    Ok(VertexGeometry::from_shape_operator(normal, shape))
}

fn inverse_sqrt_spd(m: &Matrix2<f64>) -> Matrix2<f64> {
    let eig = m.symmetric_eigen();
    let d = Matrix2::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    eig.eigenvectors * d * eig.eigenvectors.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::fixtures::torus;
    use crate::surfgen::AnalyticSurface;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_ricci_examples() {
        let r = ricci_from_gauss(&[1.0, 1.0]);
        assert_eq!(
            (r.eigenvalues.clone(), r.ricci_min, r.scalar_curv),
            (vec![1.0, 1.0], 1.0, 2.0)
        );
        let r = ricci_from_gauss(&[0.5, 0.5]);
        assert_eq!((r.ricci_min, r.scalar_curv), (0.25, 0.5));
        let r = ricci_from_gauss(&[1.0, 3.0]);
        assert_eq!(r.eigenvalues, vec![3.0, 3.0]);
        assert_eq!((r.ricci_min, r.scalar_curv), (3.0, 6.0));
        assert_eq!(r.scalar_curv, 2.0 * 1.0 * 3.0);
    }

    #[test]
    fn gauss_ricci_on_round_n_spheres() {
        // S^n_r: Ric = (n−1)/r² g, R = n(n−1)/r².
        for n in 2..7 {
            let r = 1.7;
            let g = ricci_from_gauss(&vec![1.0 / r; n]);
            let expected = (n as f64 - 1.0) / (r * r);
            for e in &g.eigenvalues {
                assert_relative_eq!(*e, expected, max_relative = 1e-14);
            }
            assert_relative_eq!(
                g.scalar_curv,
                n as f64 * (n as f64 - 1.0) / (r * r),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn ricci_deficit_examples() {
        assert_eq!(ricci_deficit(1.0, 1.0, 2), 0.0);
        assert_eq!(ricci_deficit(0.5, 1.0, 2), 0.5);
        assert_eq!(ricci_deficit(3.0, 1.0, 2), 0.0);
        assert_eq!(ricci_deficit(0.25, 0.5, 2), 0.0);
    }

    #[test]
    fn record_invariants() {
        let g = VertexGeometry::from_shape_operator(Vector3::z(), Matrix2::new(2.0, 0.5, 0.5, -1.0));
        let (k1, k2) = g.kappa;
        assert!(k1 <= k2);
        assert_relative_eq!(g.mean, 0.5, max_relative = 1e-15);
        assert_relative_eq!(
            g.traceless_norm.powi(2),
            (k1 - g.mean).powi(2) + (k2 - g.mean).powi(2),
            max_relative = 1e-13
        );
        assert_relative_eq!(g.scalar_curv, 2.0 * g.h2, epsilon = 1e-14);
        assert!(g.h2 <= g.mean * g.mean);
    }

    #[test]
    fn sphere_estimates() {
        let m = AnalyticSurface::sphere(1.0).generate(5).unwrap();
        let geo = estimate_geometry(&m, 2).unwrap();
        for g in &geo {
            assert!((g.mean - 1.0).abs() < 0.01, "H = {}", g.mean);
            assert!(g.traceless_norm <= 0.02);
        }
        let m2 = AnalyticSurface::sphere(2.0).generate(4).unwrap();
        let geo2 = estimate_geometry(&m2, 2).unwrap();
        let mean_h = geo2.iter().map(|g| g.mean).sum::<f64>() / geo2.len() as f64;
        let mean_k = geo2.iter().map(|g| g.gauss()).sum::<f64>() / geo2.len() as f64;
        assert_relative_eq!(mean_h, 0.5, max_relative = 1e-2);
        assert_relative_eq!(mean_k, 0.25, max_relative = 2e-2);
    }

    #[test]
    fn inward_orientation_flips_sign() {
        let m = AnalyticSurface::sphere(1.0).generate(3).unwrap();
        let faces: Vec<[usize; 3]> = m.faces().iter().map(|&[a, b, c]| [a, c, b]).collect();
        let flipped = Mesh::new(m.vertices().to_vec(), faces).unwrap();
        let geo = estimate_geometry(&flipped, 2).unwrap();
        assert!(geo.iter().all(|g| g.mean < 0.0));
        let c = convexity_status(&geo);
        assert!(!c.mean_convex && !c.strictly_convex);
    }

    #[test]
    fn ellipsoid_matches_oracle() {
        let s = AnalyticSurface::ellipsoid(2.0, 1.0, 1.0);
        let m = s.generate(5).unwrap();
        let geo = estimate_geometry(&m, 2).unwrap();
        let oracle = s.oracle_geometry(&m);
        for v in (0..m.vertex_count()).step_by(97) {
            assert_relative_eq!(geo[v].kappa.0, oracle[v].kappa.0, max_relative = 0.05);
            assert_relative_eq!(geo[v].kappa.1, oracle[v].kappa.1, max_relative = 0.05);
        }
    }

    #[test]
    fn too_small_neighbourhood() {
        let m = AnalyticSurface::sphere(1.0).generate(0).unwrap();
        // Depth-1 ring on an icosahedron has 5 vertices.
        assert!(matches!(
            estimate_geometry(&m, 1),
            Err(GeometryError::Underdetermined { found: 5, .. })
        ));
        assert_eq!(estimate_geometry(&m, 0), Err(GeometryError::InvalidRingDepth));
        assert!(estimate_geometry(&m, 2).is_ok());
    }

    #[test]
    fn convexity_of_perturbed_sphere() {
        let s = AnalyticSurface::perturbed_sphere(1.0, 0.01, 2, 0).unwrap();
        let m = s.generate(4).unwrap();
        let c = convexity_status(&estimate_geometry(&m, 2).unwrap());
        assert!(c.strictly_convex && c.mean_convex);
        let oracle = convexity_status(&s.oracle_geometry(&m));
        assert!(oracle.min_kappa1 > 0.9);
    }

    #[test]
    fn saddle_torus_is_not_convex() {
        let m = torus(2.0, 0.7, 48, 24);
        assert!(m.validate().is_valid());
        let c = convexity_status(&estimate_geometry(&m, 2).unwrap());
        assert!(!c.strictly_convex);
        assert!(c.min_kappa1 < 0.0);
    }
}
