//! Discrete Laplace–Beltrami operator (cotangent stiffness, lumped mass), the
//! first nonzero eigenvalue λ₁ with a residual certificate, and the analytic
//! bounds on λ₁ used by the pinching pipeline.
//!
//! λ₁ is computed by block inverse iteration (shift-invert at zero) on the
//! mass-orthogonal complement of the constants, with a Rayleigh–Ritz step
//! per sweep. The singular solves S y = M x are done by Jacobi-preconditioned
//! conjugate gradients; the right-hand sides are orthogonal to the kernel.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::diffgeo::VertexGeometry;
use crate::mesh::Mesh;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 500;
const BLOCK_SIZE: usize = 8;
const SEED: u64 = 0x5eed_1a3b_da01;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("non-finite cotangent weight in face {face}")]
    NonFiniteWeight { face: usize },
    #[error("mesh too small for an eigenvalue problem ({0} vertices)")]
    TooSmall(usize),
    #[error("invalid solver parameter: {0}")]
    InvalidParameter(String),
    #[error("eigensolver did not converge in {iterations} iterations (best residual {best_residual:e}, best estimate {best_lambda})")]
    NotConverged {
        iterations: usize,
        best_residual: f64,
        best_lambda: f64,
    },
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Assembles from triplets; duplicates are summed in input order.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c)); // stable: keeps input order per entry
        let mut indptr = vec![0; n + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            indptr[i + 1] += indptr[i];
        }
        CsrMatrix {
            n,
            indptr,
            indices,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let row = self.indptr[r]..self.indptr[r + 1];
        match self.indices[row.clone()].binary_search(&c) {
            Ok(k) => self.values[row.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.indptr[r]..self.indptr[r + 1]).map(move |k| (self.indices[k], self.values[k]))
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            *yr = acc;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|r| self.row(r).all(|(c, v)| self.get(c, r) == v))
    }
}

/// Stiffness (positive semidefinite cotangent Laplacian) and lumped mass.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceSystem {
    pub stiffness: CsrMatrix,
    pub mass: Vec<f64>,
}

fn cot(a: &nalgebra::Vector3<f64>, b: &nalgebra::Vector3<f64>) -> f64 {
    a.dot(b) / a.cross(b).norm()
}

type FaceWeights = [(usize, usize, f64); 3];

pub fn build_laplace(mesh: &Mesh) -> Result<LaplaceSystem, SpectralError> {
    let per_face: Vec<Result<FaceWeights, SpectralError>> = (0..mesh.face_count())
        .into_par_iter()
        .map(|f| {
            let ids = mesh.faces()[f];
            let p = mesh.face_points(f);
            let mut out = [(0, 0, 0.0); 3];
            for k in 0..3 {
                // Angle at corner k is opposite edge (k+1, k+2).
                let (i, j) = ((k + 1) % 3, (k + 2) % 3);
                let w = 0.5 * cot(&(p[i] - p[k]), &(p[j] - p[k]));
                if !w.is_finite() {
                    return Err(SpectralError::NonFiniteWeight { face: f });
                }
                out[k] = (ids[i], ids[j], w);
            }
            Ok(out)
        })
        .collect();

    let n = mesh.vertex_count();
    let mut triplets = Vec::with_capacity(12 * mesh.face_count());
    for face in per_face {
        for (i, j, w) in face? {
            triplets.push((i, j, -w));
            triplets.push((j, i, -w));
        }
    }
    let offdiag = CsrMatrix::from_triplets(n, triplets);
    // Diagonal is minus the merged off-diagonal row sum.
    let mut all: Vec<(usize, usize, f64)> = Vec::with_capacity(offdiag.nnz() + n);
    for r in 0..n {
        let mut s = 0.0;
        for (c, v) in offdiag.row(r) {
            all.push((r, c, v));
            s += v;
        }
        all.push((r, r, -s));
    }
    Ok(LaplaceSystem {
        stiffness: CsrMatrix::from_triplets(n, all),
        mass: mesh.vertex_areas(),
    })
}

impl LaplaceSystem {
    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    pub fn mass_dot(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..a.len() {
            s += self.mass[i] * a[i] * b[i];
        }
        s
    }

    pub fn rayleigh_quotient(&self, u: &[f64]) -> f64 {
        dot(u, &self.stiffness.mul_vec(u)) / self.mass_dot(u, u)
    }

    /// Removes the mass-weighted mean.
    pub fn deflate_constants(&self, x: &mut [f64]) {
        let total: f64 = self.mass.iter().sum();
        let mean = self.mass.iter().zip(x.iter()).map(|(m, v)| m * v).sum::<f64>() / total;
        for v in x.iter_mut() {
            *v -= mean;
        }
    }

    /// Coordinate text dump: one `row col value` line per stiffness entry
    /// (0-based), then the mass diagonal in the same format.
    pub fn to_coordinate_text(&self) -> (String, String) {
        let mut s = String::new();
        for r in 0..self.dim() {
            for (c, v) in self.stiffness.row(r) {
                writeln!(s, "{r} {c} {v:e}").unwrap();
            }
        }
        let mut m = String::new();
        for (i, v) in self.mass.iter().enumerate() {
            writeln!(m, "{i} {i} {v:e}").unwrap();
        }
        (s, m)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralResult {
    pub lambda1: f64,
    /// Mass-normalized, mass-orthogonal to constants.
    #[serde(skip)]
    pub eigenfunction: Vec<f64>,
    /// ‖S u − λ₁ M u‖ / (λ₁ ‖M u‖); scale free.
    pub residual: f64,
    pub iterations: usize,
    pub inner_iterations: usize,
    /// Lowest Ritz values of the final block (λ₁ first).
    pub ritz_values: Vec<f64>,
    /// λ₁ and the next eigenvalue agree to √tol (relative); expected on
    /// spheres, where λ₁ has multiplicity three.
    pub near_degenerate: bool,
}

struct Pcg<'a> {
    s: &'a CsrMatrix,
    inv_diag: Vec<f64>,
    tol: f64,
    max_iter: usize,
}

impl Pcg<'_> {
    fn solve(&self, b: &[f64], x: &mut [f64]) -> usize {
        let n = b.len();
        let bnorm = norm(b);
        if bnorm == 0.0 {
            x.iter_mut().for_each(|v| *v = 0.0);
            return 0;
        }
        let mut r = self.s.mul_vec(x);
        for i in 0..n {
            r[i] = b[i] - r[i];
        }
        let mut z: Vec<f64> = (0..n).map(|i| self.inv_diag[i] * r[i]).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        let mut ap = vec![0.0; n];
        for it in 0..self.max_iter {
            if norm(&r) <= self.tol * bnorm {
                return it;
            }
            self.s.mul_vec_into(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                return it;
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
                z[i] = self.inv_diag[i] * r[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        self.max_iter
    }
}

/// First nonzero eigenvalue of the generalized problem S u = λ M u.
pub fn lambda1(system: &LaplaceSystem, opts: SolverOptions) -> Result<SpectralResult, SpectralError> {
    let n = system.dim();
    if n < 3 {
        return Err(SpectralError::TooSmall(n));
    }
    if !(opts.tol > 0.0) || opts.max_iter == 0 {
        return Err(SpectralError::InvalidParameter(format!(
            "tol = {}, max_iter = {}",
            opts.tol, opts.max_iter
        )));
    }
    let block = BLOCK_SIZE.min(n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut random_vector = |sys: &LaplaceSystem| {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        sys.deflate_constants(&mut v);
        v
    };
    let pcg = Pcg {
        s: &system.stiffness,
        inv_diag: system
            .stiffness
            .diagonal()
            .iter()
            .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
            .collect(),
        tol: (opts.tol * 1e-2).min(1e-10),
        max_iter: 20 * n + 1000,
    };

    let mut x: Vec<Vec<f64>> = (0..block).map(|_| random_vector(system)).collect();
    let mut theta: Vec<f64> = vec![0.0; block];
    let mut inner_iterations = 0;
    let mut best = (f64::INFINITY, f64::NAN);

    for iter in 1..=opts.max_iter {
        // y_j = S⁺ M x_j, warm-started from x_j/θ_j once Ritz values exist.
        let solved: Vec<(Vec<f64>, usize)> = (0..block)
            .into_par_iter()
            .map(|j| {
                let rhs: Vec<f64> = (0..n).map(|i| system.mass[i] * x[j][i]).collect();
                let mut sol: Vec<f64> = if theta[j] > 0.0 {
                    x[j].iter().map(|v| v / theta[j]).collect()
                } else {
                    vec![0.0; n]
                };
                let its = pcg.solve(&rhs, &mut sol);
                system.deflate_constants(&mut sol);
                (sol, its)
            })
            .collect();
        let mut y: Vec<Vec<f64>> = Vec::with_capacity(block);
        for (sol, its) in solved {
            inner_iterations += its;
            y.push(sol);
        }
        mass_orthonormalize(system, &mut y, &mut random_vector);

        let sy: Vec<Vec<f64>> = y.iter().map(|v| system.stiffness.mul_vec(v)).collect();
        let mut t = DMatrix::<f64>::zeros(block, block);
        for a in 0..block {
            for b in a..block {
                let v = 0.5 * (dot(&y[a], &sy[b]) + dot(&y[b], &sy[a]));
                t[(a, b)] = v;
                t[(b, a)] = v;
            }
        }
        let eig = t.symmetric_eigen();
        let mut order: Vec<usize> = (0..block).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let mut new_x = vec![vec![0.0; n]; block];
        let mut sx1 = vec![0.0; n];
        for (slot, &k) in order.iter().enumerate() {
            theta[slot] = eig.eigenvalues[k];
            for a in 0..block {
                let c = eig.eigenvectors[(a, k)];
                if c != 0.0 {
                    for i in 0..n {
                        new_x[slot][i] += c * y[a][i];
                    }
                    if slot == 0 {
                        for i in 0..n {
                            sx1[i] += c * sy[a][i];
                        }
                    }
                }
            }
        }
        x = new_x;

        let lam = theta[0];
        let mx: Vec<f64> = (0..n).map(|i| system.mass[i] * x[0][i]).collect();
        let r: Vec<f64> = (0..n).map(|i| sx1[i] - lam * mx[i]).collect();
        let residual = norm(&r) / (lam.abs() * norm(&mx));
        if residual < best.0 {
            best = (residual, lam);
        }
        if residual <= opts.tol {
            let mut u = x[0].clone();
            system.deflate_constants(&mut u);
            let scale = system.mass_dot(&u, &u).sqrt();
            u.iter_mut().for_each(|v| *v /= scale);
            let near_degenerate = block > 1 && (theta[1] - theta[0]) <= opts.tol.sqrt() * theta[0];
            return Ok(SpectralResult {
                lambda1: lam,
                eigenfunction: u,
                residual,
                iterations: iter,
                inner_iterations,
                ritz_values: theta.clone(),
                near_degenerate,
            });
        }
    }
    Err(SpectralError::NotConverged {
        iterations: opts.max_iter,
        best_residual: best.0,
        best_lambda: best.1,
    })
}

/// Modified Gram–Schmidt in the mass inner product, two passes. Columns that
/// collapse are replaced by fresh random vectors.
fn mass_orthonormalize(system: &LaplaceSystem, y: &mut [Vec<f64>], fresh: &mut impl FnMut(&LaplaceSystem) -> Vec<f64>) {
    for j in 0..y.len() {
        for _attempt in 0..3 {
            let before = system.mass_dot(&y[j], &y[j]).sqrt();
            for _pass in 0..2 {
                for k in 0..j {
                    let c = system.mass_dot(&y[k], &y[j]);
                    let (head, tail) = y.split_at_mut(j);
                    for (t, h) in tail[0].iter_mut().zip(&head[k]) {
                        *t -= c * h;
                    }
                }
            }
            let after = system.mass_dot(&y[j], &y[j]).sqrt();
            if after > 1e-10 * before && after > 0.0 {
                y[j].iter_mut().for_each(|v| *v /= after);
                break;
            }
            y[j] = fresh(system);
        }
    }
}

/// Convenience: assemble and solve.
pub fn mesh_lambda1(mesh: &Mesh, opts: SolverOptions) -> Result<SpectralResult, SpectralError> {
    lambda1(&build_laplace(mesh)?, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpperBound {
    /// n‖H‖²_∞.
    pub mean_curvature_bound: f64,
    /// ‖R‖_∞/(n−1).
    pub scalar_curvature_bound: f64,
}

pub fn lambda1_upper_bound(geometries: &[VertexGeometry], n: u32) -> UpperBound {
    let h_inf = geometries.iter().map(|g| g.mean.abs()).fold(0.0, f64::max);
    let r_inf = geometries.iter().map(|g| g.scalar_curv.abs()).fold(0.0, f64::max);
    UpperBound {
        mean_curvature_bound: n as f64 * h_inf * h_inf,
        scalar_curvature_bound: r_inf / (n as f64 - 1.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "value")]
pub enum AubryBound {
    Bound(f64),
    HypothesisViolated,
}

impl AubryBound {
    pub fn value(&self) -> Option<f64> {
        match self {
            AubryBound::Bound(v) => Some(*v),
            AubryBound::HypothesisViolated => None,
        }
    }
}

/// λ₁ ≥ n(1 − C (∫(Ric − (n−1))₋^p / |M|)^{1/p}), valid while the deficit
/// integral stays below |M|/C.
pub fn aubry_lower_bound(
    deficit_integral: f64,
    volume: f64,
    p: f64,
    c_np: f64,
    n: u32,
) -> Result<AubryBound, SpectralError> {
    if !(p > n as f64 / 2.0) {
        return Err(SpectralError::InvalidParameter(format!(
            "need p > n/2, got p = {p}, n = {n}"
        )));
    }
    if !(c_np > 0.0) || !(volume > 0.0) || !(deficit_integral >= 0.0) {
        return Err(SpectralError::InvalidParameter(format!(
            "need C > 0, |M| > 0, deficit >= 0 (C = {c_np}, |M| = {volume}, deficit = {deficit_integral})"
        )));
    }
    if deficit_integral >= volume / c_np {
        return Ok(AubryBound::HypothesisViolated);
    }
    Ok(AubryBound::Bound(
        n as f64 * (1.0 - c_np * (deficit_integral / volume).powf(1.0 / p)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::fixtures::tetrahedron;
    use crate::surfgen::AnalyticSurface;
    use approx::assert_relative_eq;

    #[test]
    fn tetrahedron_row_sums_vanish() {
        let sys = build_laplace(&tetrahedron()).unwrap();
        for r in 0..4 {
            let s: f64 = sys.stiffness.row(r).map(|(_, v)| v).sum();
            assert!(s.abs() < 1e-14, "row {r} sums to {s}");
        }
        assert!(sys.stiffness.is_symmetric());
        let total: f64 = sys.mass.iter().sum();
        assert_relative_eq!(total, tetrahedron().measures().area, max_relative = 1e-12);
    }

    #[test]
    fn tetrahedron_spectrum() {
        // Regular tetrahedron: all cot weights are cot(60°)/2 per face pair,
        // so S = w(4I − J) and M = (A/4)I; λ = 4w/(A/4) with multiplicity 3.
        let m = tetrahedron();
        let sys = build_laplace(&m).unwrap();
        let w = -sys.stiffness.get(0, 1);
        let a = m.measures().area;
        let res = lambda1(&sys, SolverOptions::default()).unwrap();
        assert_relative_eq!(res.lambda1, 4.0 * w / (a / 4.0), max_relative = 1e-10);
    }

    #[test]
    fn obtuse_mesh_stays_psd() {
        // Squashed ellipsoid has obtuse triangles near the rim.
        let m = AnalyticSurface::ellipsoid(3.0, 3.0, 0.3).generate(2).unwrap();
        let sys = build_laplace(&m).unwrap();
        let has_negative_weight = (0..sys.dim()).any(|r| sys.stiffness.row(r).any(|(c, v)| c != r && v > 0.0));
        assert!(has_negative_weight);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let u: Vec<f64> = (0..sys.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let q = dot(&u, &sys.stiffness.mul_vec(&u)) / dot(&u, &u);
            assert!(q >= -1e-10);
        }
    }

    #[test]
    fn unit_sphere_lambda1() {
        let m = AnalyticSurface::sphere(1.0).generate(4).unwrap();
        let sys = build_laplace(&m).unwrap();
        let res = lambda1(&sys, SolverOptions::default()).unwrap();
        assert!((res.lambda1 - 2.0).abs() < 0.02, "{}", res.lambda1);
        assert!(res.residual <= 1e-8);
        assert!(res.near_degenerate);
        // certificate
        let rq = sys.rayleigh_quotient(&res.eigenfunction);
        assert!((rq - res.lambda1).abs() <= 2.0 * 1e-8 * res.lambda1);
        assert_relative_eq!(
            sys.mass_dot(&res.eigenfunction, &res.eigenfunction),
            1.0,
            max_relative = 1e-12
        );
        let ones = vec![1.0; sys.dim()];
        assert!(sys.mass_dot(&res.eigenfunction, &ones).abs() <= 1e-8);
    }

    #[test]
    fn scaling_is_exact() {
        let m = AnalyticSurface::ellipsoid(1.3, 1.0, 0.9).generate(3).unwrap();
        let a = mesh_lambda1(&m, SolverOptions::default()).unwrap().lambda1;
        let b = mesh_lambda1(&m.scaled(2.0), SolverOptions::default()).unwrap().lambda1;
        assert_relative_eq!(b, a / 4.0, max_relative = 1e-9);
    }

    #[test]
    fn not_converged_reports_best() {
        let m = AnalyticSurface::ellipsoid(1.3, 1.0, 0.9).generate(3).unwrap();
        let err = mesh_lambda1(
            &m,
            SolverOptions {
                tol: 1e-14,
                max_iter: 2,
            },
        )
        .unwrap_err();
        assert!(matches!(err, SpectralError::NotConverged { iterations: 2, .. }));
    }

    #[test]
    fn aubry_bound_cases() {
        assert_eq!(
            aubry_lower_bound(0.0, 1.0, 3.0, 1.0, 2).unwrap(),
            AubryBound::Bound(2.0)
        );
        assert_eq!(
            aubry_lower_bound(0.1, 1.0, 3.0, 10.0, 2).unwrap(),
            AubryBound::HypothesisViolated
        );
        let v = aubry_lower_bound(1e-6, 1.0, 3.0, 10.0, 2).unwrap().value().unwrap();
        assert_relative_eq!(v, 1.8, max_relative = 1e-12);
        assert!(aubry_lower_bound(0.0, 1.0, 0.5, 1.0, 2).is_err());
        assert!(aubry_lower_bound(0.0, 1.0, 3.0, 0.0, 2).is_err());
    }

    #[test]
    fn upper_bound_on_spheres() {
        let g1 = AnalyticSurface::sphere(1.0);
        let m = g1.generate(2).unwrap();
        let ub = lambda1_upper_bound(&g1.oracle_geometry(&m), 2);
        assert_relative_eq!(ub.mean_curvature_bound, 2.0, max_relative = 1e-14);
        assert_relative_eq!(ub.scalar_curvature_bound, 2.0, max_relative = 1e-14);
        let g2 = AnalyticSurface::sphere(2.0);
        let ub2 = lambda1_upper_bound(&g2.oracle_geometry(&g2.generate(2).unwrap()), 2);
        assert_relative_eq!(ub2.mean_curvature_bound, 0.5, max_relative = 1e-14);
    }

    #[test]
    fn csr_assembly_sums_duplicates() {
        let m = CsrMatrix::from_triplets(2, vec![(0, 1, 1.0), (1, 0, 2.0), (0, 1, 0.5), (1, 1, 3.0)]);
        assert_eq!(m.get(0, 1), 1.5);
        assert_eq!(m.get(0, 0), 0.0);
        assert_eq!(m.mul_vec(&[1.0, 1.0]), vec![1.5, 5.0]);
        assert_eq!(m.nnz(), 3);
    }

    #[test]
    fn coordinate_dump_has_one_line_per_entry() {
        let sys = build_laplace(&tetrahedron()).unwrap();
        let (s, m) = sys.to_coordinate_text();
        assert_eq!(s.lines().count(), sys.stiffness.nnz());
        assert_eq!(m.lines().count(), 4);
        assert!(s.starts_with("0 0 "));
    }
}
