//! The almost-umbilical pinching pipeline on closed surfaces.
//!
//! Given a mesh with per-vertex curvatures, this module evaluates the
//! pointwise hypothesis ‖Å‖ ≤ H|M|^{−(2+α)/n}ε^{2+α}, the spectral pinching
//! condition λ₁(∫H)² − n‖H₂‖²_{2p} > −C_ε on the unit-area surface, the
//! quantities of the μ₀-rescaled argument (bad sets, Ricci deficit, the λ₁
//! lower bound), and the conclusion that the surface lies in the annulus of
//! radii √(n/λ₁) ± ε about its barycenter.
//!
//! Constants that are only known to exist (L, c_n, C(n,p)) are inputs with
//! default 1. Every check is conditional on the values supplied, and every
//! report carries them.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::diffgeo::{
    convexity_status, estimate_geometry, ricci_deficit, ConvexityStatus, GeometryError, VertexGeometry,
};
use crate::fields::{normalize_mesh, FieldError, Quantity, ScalarField};
use crate::mesh::{Mesh, MeshMeasures};
use crate::spectral::{
    aubry_lower_bound, build_laplace, lambda1, lambda1_upper_bound, AubryBound, SolverOptions, SpectralError,
    UpperBound,
};
use crate::sum::pairwise_sum;
use crate::surfgen::{AnalyticSurface, SphericalHarmonic, SurfGenError};

/// Dimension of the discrete pipeline (surfaces in ℝ³).
pub const SURFACE_DIM: u32 = 2;
/// Smallest α the command line accepts; keeps kp = 18/α ≤ 180.
pub const ALPHA_FLOOR: f64 = 0.1;
pub const SWEEP_BISECTION_STEPS: usize = 40;
/// Fraction of ε^{2+α} targeted by the sweep (1% slack).
pub const SWEEP_TARGET_FRACTION: f64 = 0.99;
const MU_FIT_MAX_ITER: usize = 200;
const NORMALIZED_AREA_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum PinchingError {
    #[error("invalid constants: {0}")]
    InvalidConstants(String),
    #[error("mesh failed validation: {}", failures.join(", "))]
    InvalidMesh { failures: Vec<String> },
    #[error("not mean-convex: H = {mean} at vertex {vertex}")]
    NotMeanConvex { vertex: usize, mean: f64 },
    #[error("not strictly convex: min κ₁ = {min_kappa1}")]
    NotStrictlyConvex { min_kappa1: f64 },
    #[error("H₂ = {h2} ≤ 0 at vertex {vertex}")]
    NonPositiveH2 { vertex: usize, h2: f64 },
    #[error("ε̃ = {eps_tilde} is not below 2/(3‖H‖∞) = {limit}")]
    EpsilonTooLarge { eps_tilde: f64, limit: f64 },
    #[error("mesh area is {area}, expected 1")]
    NotNormalized { area: f64 },
    #[error("inner radius √(n/λ₁) − ε = {inner} is not positive")]
    InnerRadiusNonPositive { inner: f64 },
    #[error("λ₁ must be positive, got {0}")]
    NonPositiveLambda(f64),
    #[error("p must be at least 2, got {0}")]
    InvalidExponent(f64),
    #[error("geometry and weights differ in length ({geometries} vs {weights})")]
    LengthMismatch { geometries: usize, weights: usize },
    #[error("empty input")]
    Empty,
    #[error("amplitude search failed at ε = {epsilon}: {reason}")]
    AmplitudeSearch { epsilon: f64, reason: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    SurfGen(#[from] SurfGenError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinchingConstants {
    pub alpha: f64,
    /// In length units of the input mesh.
    pub epsilon: f64,
    pub n: u32,
    /// Exponent p of the L^{2p} norm of H₂ in the spectral condition.
    pub p_roth: f64,
    pub l_const: f64,
    pub c_n: f64,
    pub c_np_aubry: f64,
    /// Replaces the convexity threshold as the c of ε < c|M|^{1/n}.
    pub c_override: Option<f64>,
}

impl PinchingConstants {
    pub fn new(alpha: f64, epsilon: f64) -> Self {
        PinchingConstants {
            alpha,
            epsilon,
            n: SURFACE_DIM,
            p_roth: SURFACE_DIM as f64 + 1.0,
            l_const: 1.0,
            c_n: 1.0,
            c_np_aubry: 1.0,
            c_override: None,
        }
    }

    pub fn with_epsilon(self, epsilon: f64) -> Self {
        PinchingConstants { epsilon, ..self }
    }

    pub fn validate(&self) -> Result<(), PinchingError> {
        let bad = |what: String| Err(PinchingError::InvalidConstants(what));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha = {} is not in (0, 1)", self.alpha));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon = {} is not positive", self.epsilon));
        }
        if self.n < 2 {
            return bad(format!("n = {} is below 2", self.n));
        }
        if !(self.p_roth >= 2.0 && self.p_roth.is_finite()) {
            return bad(format!("p_roth = {} is below 2", self.p_roth));
        }
        for (name, v) in [("L", self.l_const), ("c_n", self.c_n), ("C_np_aubry", self.c_np_aubry)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} = {v} is not positive"));
            }
        }
        if let Some(c) = self.c_override {
            if !(c > 0.0 && c.is_finite()) {
                return bad(format!("c = {c} is not positive"));
            }
        }
        Ok(())
    }

    /// (1/√(n(n−1)))^{1/(2+α)}: below it the rescaled surface is convex.
    pub fn c_threshold(&self) -> f64 {
        let n = self.n as f64;
        (1.0 / (n * (n - 1.0)).sqrt()).powf(1.0 / (2.0 + self.alpha))
    }

    pub fn c(&self) -> f64 {
        self.c_override.unwrap_or_else(|| self.c_threshold())
    }

    pub fn k(&self) -> f64 {
        6.0 / self.alpha
    }

    pub fn p_proof(&self) -> f64 {
        self.n as f64 + 1.0
    }

    pub fn kp(&self) -> f64 {
        self.k() * self.p_proof()
    }

    pub fn block(&self, solver: SolverOptions) -> ConstantsBlock {
        ConstantsBlock {
            alpha: self.alpha,
            epsilon: self.epsilon,
            n: self.n,
            p_roth: self.p_roth,
            l_const: self.l_const,
            c_n: self.c_n,
            c_np_aubry: self.c_np_aubry,
            c: self.c(),
            c_source: if self.c_override.is_some() {
                "configured"
            } else {
                "convexity_threshold"
            },
            c_threshold: self.c_threshold(),
            k: self.k(),
            p: self.p_proof(),
            kp: self.kp(),
            solver_tol: solver.tol,
            solver_max_iter: solver.max_iter,
            note: "checks are conditional on the constants listed here",
        }
    }
}

/// The constants a report was computed with, derived values included.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsBlock {
    pub alpha: f64,
    pub epsilon: f64,
    pub n: u32,
    pub p_roth: f64,
    #[serde(rename = "L")]
    pub l_const: f64,
    pub c_n: f64,
    #[serde(rename = "C_np_aubry")]
    pub c_np_aubry: f64,
    pub c: f64,
    pub c_source: &'static str,
    pub c_threshold: f64,
    pub k: f64,
    pub p: f64,
    pub kp: f64,
    pub solver_tol: f64,
    pub solver_max_iter: usize,
    pub note: &'static str,
}

fn ensure_len(geometries: &[VertexGeometry], weights: usize) -> Result<(), PinchingError> {
    if geometries.len() != weights {
        return Err(PinchingError::LengthMismatch {
            geometries: geometries.len(),
            weights,
        });
    }
    if geometries.is_empty() {
        return Err(PinchingError::Empty);
    }
    Ok(())
}

fn first_min(values: impl Iterator<Item = f64>) -> Option<(usize, f64)> {
    values.enumerate().fold(None, |best, (i, v)| match best {
        Some((_, b)) if b <= v => best,
        _ => Some((i, v)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub holds: bool,
    pub worst_vertex: usize,
    pub worst_margin: f64,
    /// max ‖Å‖/(H|M|^{−(2+α)/n}); the hypothesis holds iff this is ≤ ε^{2+α}.
    pub max_pinch_ratio: f64,
    /// |M|^{−(2+α)/n} ε^{2+α}.
    pub rhs_factor: f64,
    pub epsilon_admissible: bool,
    /// c|M|^{1/n}.
    pub epsilon_limit: f64,
    /// H_i|M|^{−(2+α)/n}ε^{2+α} − ‖Å‖_i.
    #[serde(skip)]
    pub margins: Vec<f64>,
}

/// Pointwise hypothesis at the vertices.
pub fn check_hypothesis(
    mesh: &Mesh,
    geometries: &[VertexGeometry],
    constants: &PinchingConstants,
) -> Result<HypothesisCheck, PinchingError> {
    constants.validate()?;
    ensure_len(geometries, mesh.vertex_count())?;
    hypothesis_with_area(mesh.measures().area, geometries, constants)
}

fn hypothesis_with_area(
    area: f64,
    geometries: &[VertexGeometry],
    constants: &PinchingConstants,
) -> Result<HypothesisCheck, PinchingError> {
    if let Some((vertex, g)) = geometries.iter().enumerate().find(|(_, g)| !(g.mean > 0.0)) {
        return Err(PinchingError::NotMeanConvex { vertex, mean: g.mean });
    }
    let n = constants.n as f64;
    let e = 2.0 + constants.alpha;
    let area_factor = (-e / n * area.ln()).exp();
    let rhs_factor = (e * (constants.epsilon.ln() - area.ln() / n)).exp();
    let margins: Vec<f64> = geometries
        .iter()
        .map(|g| g.mean * rhs_factor - g.traceless_norm)
        .collect();
    let (worst_vertex, worst_margin) = first_min(margins.iter().copied()).ok_or(PinchingError::Empty)?;
    let max_pinch_ratio = geometries
        .iter()
        .map(|g| g.traceless_norm / (g.mean * area_factor))
        .fold(0.0, f64::max);
    let epsilon_limit = constants.c() * area.powf(1.0 / n);
    Ok(HypothesisCheck {
        holds: worst_margin >= 0.0,
        worst_vertex,
        worst_margin,
        max_pinch_ratio,
        rhs_factor,
        epsilon_admissible: constants.epsilon < epsilon_limit,
        epsilon_limit,
        margins,
    })
}

/// max ‖Å‖/(H|M|^{−(2+α)/n}); infinite when H ≤ 0 somewhere.
pub fn pinch_ratio(geometries: &[VertexGeometry], area: f64, alpha: f64, n: u32) -> f64 {
    let area_factor = (-(2.0 + alpha) / n as f64 * area.ln()).exp();
    geometries.iter().fold(0.0, |acc, g| {
        if g.mean > 0.0 {
            acc.max(g.traceless_norm / (g.mean * area_factor))
        } else {
            f64::INFINITY
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RothTerms {
    /// ½L√(n/λ₁)ε².
    pub spectral: f64,
    /// ½L.
    pub l_cap: f64,
    /// ½c_n.
    pub c_n_cap: f64,
    /// ½(n/2)‖H₂‖²_{2p}.
    pub h2_cap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RothCondition {
    pub integral_h: f64,
    pub h2_norm: f64,
    pub lhs: f64,
    pub c_eps: f64,
    pub threshold: f64,
    pub holds: bool,
    pub terms: RothTerms,
}

/// Spectral pinching condition on a unit-area mesh. `constants.epsilon` is
/// taken in the units of `mesh`, i.e. it is ε̃.
pub fn roth_condition(
    mesh: &Mesh,
    geometries: &[VertexGeometry],
    lambda1: f64,
    constants: &PinchingConstants,
) -> Result<RothCondition, PinchingError> {
    constants.validate()?;
    ensure_len(geometries, mesh.vertex_count())?;
    let area = mesh.measures().area;
    if (area - 1.0).abs() > NORMALIZED_AREA_TOL {
        return Err(PinchingError::NotNormalized { area });
    }
    if !(lambda1 > 0.0) {
        return Err(PinchingError::NonPositiveLambda(lambda1));
    }
    if let Some((vertex, g)) = geometries.iter().enumerate().find(|(_, g)| !(g.h2 > 0.0)) {
        return Err(PinchingError::NonPositiveH2 { vertex, h2: g.h2 });
    }
    let h_inf = geometries.iter().map(|g| g.mean.abs()).fold(0.0, f64::max);
    let limit = 2.0 / (3.0 * h_inf);
    if !(constants.epsilon < limit) {
        return Err(PinchingError::EpsilonTooLarge {
            eps_tilde: constants.epsilon,
            limit,
        });
    }

    let weights = mesh.vertex_areas();
    let n = constants.n as f64;
    let h = ScalarField::new(geometries.iter().map(|g| g.mean).collect(), weights.clone())?;
    let h2 = ScalarField::new(geometries.iter().map(|g| g.h2).collect(), weights)?;
    let integral_h = h.integrate(None)?;
    let h2_norm = h2.lp_norm(2.0 * constants.p_roth, None)?;
    let lhs = lambda1 * integral_h * integral_h - n * h2_norm * h2_norm;

    let eps = constants.epsilon;
    let terms = RothTerms {
        spectral: 0.5 * constants.l_const * (n / lambda1).sqrt() * eps * eps,
        l_cap: 0.5 * constants.l_const,
        c_n_cap: 0.5 * constants.c_n,
        h2_cap: 0.5 * (n / 2.0) * h2_norm * h2_norm,
    };
    let c_eps = terms.spectral.min(terms.l_cap).min(terms.c_n_cap).min(terms.h2_cap);
    Ok(RothCondition {
        integral_h,
        h2_norm,
        lhs,
        c_eps,
        threshold: -c_eps,
        holds: lhs > -c_eps,
        terms,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Annulus {
    pub center: [f64; 3],
    /// √(n/λ₁).
    pub radius: f64,
    pub inner: f64,
    pub outer: f64,
    pub min_distance: f64,
    pub max_distance: f64,
    pub contained: bool,
    pub oscillation: f64,
}

/// Min and max vertex distance to the surface barycenter.
pub fn distance_range(mesh: &Mesh, measures: &MeshMeasures) -> (f64, f64) {
    mesh.vertices()
        .iter()
        .map(|p| (p - measures.barycenter).norm())
        .fold((f64::INFINITY, 0.0), |(lo, hi), d| (lo.min(d), hi.max(d)))
}

pub fn annulus_check(mesh: &Mesh, lambda1: f64, epsilon: f64) -> Result<Annulus, PinchingError> {
    if !(lambda1 > 0.0) {
        return Err(PinchingError::NonPositiveLambda(lambda1));
    }
    if mesh.vertex_count() == 0 {
        return Err(PinchingError::Empty);
    }
    let radius = (SURFACE_DIM as f64 / lambda1).sqrt();
    let inner = radius - epsilon;
    if !(inner > 0.0) {
        return Err(PinchingError::InnerRadiusNonPositive { inner });
    }
    let outer = radius + epsilon;
    let measures = mesh.measures();
    let (min_distance, max_distance) = distance_range(mesh, &measures);
    let b = measures.barycenter;
    Ok(Annulus {
        center: [b.x, b.y, b.z],
        radius,
        inner,
        outer,
        min_distance,
        max_distance,
        contained: inner <= min_distance && max_distance <= outer,
        oscillation: max_distance - min_distance,
    })
}

/// sup over vertices of |X−x₀|(|X−x₀| − √(n/λ₁))².
pub fn phi_sup(mesh: &Mesh, lambda1: f64) -> Result<f64, PinchingError> {
    if !(lambda1 > 0.0) {
        return Err(PinchingError::NonPositiveLambda(lambda1));
    }
    let radius = (SURFACE_DIM as f64 / lambda1).sqrt();
    let x0 = mesh.measures().barycenter;
    Ok(mesh
        .vertices()
        .iter()
        .map(|p| {
            let r = (p - x0).norm();
            r * (r - radius) * (r - radius)
        })
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuFit {
    pub mu_star: f64,
    /// ‖A − μ*g‖_p.
    pub attained: f64,
    /// Weighted mean of H.
    pub mean_h: f64,
    /// |μ* − mean H|.
    pub gap: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Minimizer of μ ↦ ‖A − μg‖_p over the vertex field.
pub fn fit_umbilical_mu(geometries: &[VertexGeometry], weights: &[f64], p: f64) -> Result<MuFit, PinchingError> {
    ensure_len(geometries, weights.len())?;
    let kappas: Vec<(f64, f64)> = geometries.iter().map(|g| g.kappa).collect();
    fit_umbilical_mu_kappas(&kappas, weights, p)
}

/// As [`fit_umbilical_mu`] on raw principal curvature pairs (κ₁ ≤ κ₂).
pub fn fit_umbilical_mu_kappas(kappas: &[(f64, f64)], weights: &[f64], p: f64) -> Result<MuFit, PinchingError> {
    if kappas.len() != weights.len() {
        return Err(PinchingError::LengthMismatch {
            geometries: kappas.len(),
            weights: weights.len(),
        });
    }
    if kappas.is_empty() {
        return Err(PinchingError::Empty);
    }
    if !(p >= 2.0 && p.is_finite()) {
        return Err(PinchingError::InvalidExponent(p));
    }
    if let Some((index, &weight)) = weights.iter().enumerate().find(|(_, w)| !(**w > 0.0)) {
        return Err(FieldError::NonPositiveWeight { index, weight }.into());
    }
    let lo0 = kappas.iter().map(|k| k.0.min(k.1)).fold(f64::INFINITY, f64::min);
    let hi0 = kappas.iter().map(|k| k.0.max(k.1)).fold(f64::NEG_INFINITY, f64::max);

    // g(μ) = Σ w q^{p/2}, q = (κ₁−μ)² + (κ₂−μ)², is convex with
    // g'(μ) = −p Σ w q^{p/2−1} s, s = (κ₁−μ) + (κ₂−μ). Bisect on the sign
    // of the sum, evaluated with its largest term factored out.
    let e = 0.5 * p - 1.0;
    let slope = |mu: f64| -> f64 {
        let logs: Vec<(f64, f64)> = kappas
            .iter()
            .zip(weights)
            .map(|(&(a, b), &w)| {
                let (da, db) = (a - mu, b - mu);
                let q = da * da + db * db;
                let l = if e == 0.0 {
                    w.ln()
                } else if q == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    w.ln() + e * q.ln()
                };
                (l, da + db)
            })
            .collect();
        let top = logs.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return 0.0;
        }
        let terms: Vec<f64> = logs.iter().map(|&(l, s)| (l - top).exp() * s).collect();
        pairwise_sum(&terms)
    };

    let (mut lo, mut hi) = (lo0, hi0);
    let mut iterations = 0;
    while iterations < MU_FIT_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        iterations += 1;
        let s = slope(mid);
        if s > 0.0 {
            lo = mid;
        } else if s < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            hi = mid;
        }
    }
    let mu_star = 0.5 * (lo + hi);

    let deviation: Vec<f64> = kappas
        .iter()
        .map(|&(a, b)| ((a - mu_star).powi(2) + (b - mu_star).powi(2)).sqrt())
        .collect();
    let attained = ScalarField::new(deviation, weights.to_vec())?.lp_norm(p, None)?;
    let wh: Vec<f64> = kappas.iter().zip(weights).map(|(k, w)| w * 0.5 * (k.0 + k.1)).collect();
    let mean_h = pairwise_sum(&wh) / pairwise_sum(weights);
    Ok(MuFit {
        mu_star,
        attained,
        mean_h,
        gap: (mu_star - mean_h).abs(),
        bracket: (lo0, hi0),
        iterations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eta {
    pub epsilon: f64,
    /// min((√(n/λ₁) − ε)ε², 1/(27‖H‖³∞)).
    pub value: f64,
    /// min(⅓√(n/λ₁)ε², 1/(27‖H‖³∞)).
    pub lower_bound: f64,
    /// ε < 2/(3‖H‖∞).
    pub applicable: bool,
    pub holds: bool,
}

pub fn eta(epsilon: f64, lambda1: f64, h_inf: f64, n: u32) -> Eta {
    let r = (n as f64 / lambda1).sqrt();
    let cap = 1.0 / (27.0 * h_inf.powi(3));
    let value = ((r - epsilon) * epsilon * epsilon).min(cap);
    let lower_bound = (r * epsilon * epsilon / 3.0).min(cap);
    Eta {
        epsilon,
        value,
        lower_bound,
        applicable: epsilon < 2.0 / (3.0 * h_inf),
        holds: value >= lower_bound,
    }
}

/// Quantities of the argument on the unit-area surface M̃ and on M̂ = μ₀M̃.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProofTrace {
    pub k: f64,
    pub p: f64,
    pub kp: f64,
    /// |M|^{−1/n}.
    pub scale: f64,
    pub eps_tilde: f64,
    pub mu0: f64,
    pub mu0_bracket: (f64, f64),
    pub mu0_in_bracket: bool,
    pub mean_h_tilde: f64,
    pub mu0_mean_h_gap: f64,
    /// ‖Ã − μ₀g̃‖_{kp} on M̃.
    pub deviation_norm_kp: f64,
    pub gamma: f64,
    /// |P̂ᶜ| = |{‖Â − ĝ‖ ≥ 1}| on M̂.
    pub bad_set_p_measure: f64,
    /// ∫_{M̂} ‖Â − ĝ‖^{kp}.
    pub bad_set_p_chebyshev_bound: f64,
    /// |P̃_γᶜ| = |{‖Ã − μ₀g̃‖ ≥ γ}| on M̃.
    pub bad_set_pgamma_measure: f64,
    /// (‖Ã − μ₀g̃‖_{kp}/γ)^{kp}.
    pub chebyshev_bound_pgamma: f64,
    /// (ε̃^{2+α}/γ)^{kp}.
    pub structural_bound_pgamma: f64,
    /// |M̂| = μ₀^n.
    pub hat_volume: f64,
    /// ∫_{M̂} (Ric − (n−1))₋^{kp}.
    pub ricci_deficit_integral: f64,
    pub aubry_bound: AubryBound,
    pub lambda1_tilde: f64,
    pub lambda1_hat: f64,
    /// C̃₅ with |Ric − (n−1)μ₀²g| ≤ C̃₅‖Ã − μ₀g̃‖ where ‖Ã − μ₀g̃‖ < 1.
    pub c5: f64,
    pub ricci_estimate_holds: bool,
    pub eta: Eta,
    pub warnings: Vec<String>,
}

/// √n((√(n−1) + (n−1))μ₀ + √(n−1)), from expanding the Gauss formula
/// around μ₀g with a perturbation of norm below one.
pub fn c5_constant(mu0: f64, n: u32) -> f64 {
    let n = n as f64;
    let s = (n - 1.0).sqrt();
    n.sqrt() * ((s + (n - 1.0)) * mu0 + s)
}

/// e^{p·ln‖f‖_p} = ∫|f|^p, zero when f vanishes.
fn power_integral(field: &ScalarField, p: f64) -> Result<f64, FieldError> {
    let norm = field.lp_norm(p, None)?;
    Ok(if norm == 0.0 { 0.0 } else { (p * norm.ln()).exp() })
}

/// `geometries` and `lambda1` belong to `mesh` at its own scale.
pub fn proof_trace(
    mesh: &Mesh,
    geometries: &[VertexGeometry],
    lambda1: f64,
    constants: &PinchingConstants,
) -> Result<ProofTrace, PinchingError> {
    constants.validate()?;
    ensure_len(geometries, mesh.vertex_count())?;
    let status = convexity_status(geometries);
    if !status.strictly_convex {
        return Err(PinchingError::NotStrictlyConvex {
            min_kappa1: status.min_kappa1,
        });
    }
    if !(lambda1 > 0.0) {
        return Err(PinchingError::NonPositiveLambda(lambda1));
    }
    let n = constants.n;
    let nf = n as f64;
    let area = mesh.measures().area;
    let scale = area.powf(-1.0 / nf);
    let tilde: Vec<VertexGeometry> = geometries.iter().map(|g| g.rescaled(scale)).collect();
    let area_weights = mesh.vertex_areas();
    let total: f64 = pairwise_sum(&area_weights);
    let weights: Vec<f64> = area_weights.iter().map(|w| w / total).collect();
    let eps_tilde = scale * constants.epsilon;
    let (k, p, kp) = (constants.k(), constants.p_proof(), constants.kp());
    let law = crate::fields::RescalingLaw::new(scale, n);
    let lambda1_tilde = law.apply(Quantity::Lambda1, lambda1);

    let fit = fit_umbilical_mu(&tilde, &weights, kp)?;
    let mu0 = fit.mu_star;
    let in_bracket = fit.bracket.0 <= mu0 && mu0 <= fit.bracket.1;

    let deviation = ScalarField::new(tilde.iter().map(|g| g.deviation_from(mu0)).collect(), weights.clone())?;
    let deviation_norm_kp = deviation.lp_norm(kp, None)?;
    let gamma = eps_tilde.powf(2.0 + 0.5 * constants.alpha);
    let (_, bad_pgamma) = deviation.sublevel_measure(gamma);
    let chebyshev_pgamma = if deviation_norm_kp == 0.0 {
        0.0
    } else {
        (kp * (deviation_norm_kp.ln() - gamma.ln())).exp()
    };
    let structural_pgamma = (kp * 0.5 * constants.alpha * eps_tilde.ln()).exp();

    let hat_weights: Vec<f64> = weights.iter().map(|w| w * mu0.powi(n as i32)).collect();
    let hat_volume = pairwise_sum(&hat_weights);
    let hat_dev = ScalarField::new(
        deviation.values().iter().map(|d| d / mu0).collect(),
        hat_weights.clone(),
    )?;
    let (_, bad_p) = hat_dev.sublevel_measure(1.0);
    let bad_p_bound = power_integral(&hat_dev, kp)?;

    let deficit = ScalarField::new(
        tilde.iter().map(|g| ricci_deficit(g.ricci_min, mu0, n)).collect(),
        hat_weights,
    )?;
    let deficit_integral = power_integral(&deficit, kp)?;
    let aubry = aubry_lower_bound(deficit_integral, hat_volume, kp, constants.c_np_aubry, n)?;

    let c5 = c5_constant(mu0, n);
    let target = (nf - 1.0) * mu0 * mu0;
    let ricci_estimate_holds = tilde
        .iter()
        .zip(deviation.values())
        .filter(|(_, &d)| d < 1.0)
        .all(|(g, &d)| (g.ricci_min - target).abs() <= c5 * d * (1.0 + 1e-12) + 1e-12 * target);

    let h_inf = tilde.iter().map(|g| g.mean.abs()).fold(0.0, f64::max);
    let eta_eps = eta(eps_tilde, lambda1_tilde, h_inf, n);

    let mut warnings = Vec::new();
    if !in_bracket {
        warnings.push(format!("mu0 = {mu0} outside [{}, {}]", fit.bracket.0, fit.bracket.1));
    }
    if gamma >= 1.0 {
        warnings.push(format!("gamma = {gamma} is not below 1"));
    }
    if gamma >= mu0 * mu0 / c5 {
        warnings.push(format!("gamma = {gamma} is not below mu0^2/C5 = {}", mu0 * mu0 / c5));
    }
    if !eta_eps.applicable {
        warnings.push(format!(
            "eps_tilde = {eps_tilde} is not below 2/(3 sup H) = {}",
            2.0 / (3.0 * h_inf)
        ));
    }
    if aubry == AubryBound::HypothesisViolated {
        warnings.push("Ricci deficit too large for the lambda1 lower bound".to_string());
    }

    Ok(ProofTrace {
        k,
        p,
        kp,
        scale,
        eps_tilde,
        mu0,
        mu0_bracket: fit.bracket,
        mu0_in_bracket: in_bracket,
        mean_h_tilde: fit.mean_h,
        mu0_mean_h_gap: fit.gap,
        deviation_norm_kp,
        gamma,
        bad_set_p_measure: bad_p,
        bad_set_p_chebyshev_bound: bad_p_bound,
        bad_set_pgamma_measure: bad_pgamma,
        chebyshev_bound_pgamma: chebyshev_pgamma,
        structural_bound_pgamma: structural_pgamma,
        hat_volume,
        ricci_deficit_integral: deficit_integral,
        aubry_bound: aubry,
        lambda1_tilde,
        lambda1_hat: lambda1_tilde / (mu0 * mu0),
        c5,
        ricci_estimate_holds,
        eta: eta_eps,
        warnings,
    })
}

/// Where per-vertex curvatures come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeometrySource {
    Estimated {
        ring_depth: usize,
    },
    /// Closed-form or finite-difference values of the surface the mesh
    /// was generated from.
    Analytic(AnalyticSurface),
}

impl GeometrySource {
    pub fn label(&self) -> String {
        match self {
            GeometrySource::Estimated { ring_depth } => format!("estimated(ring_depth={ring_depth})"),
            GeometrySource::Analytic(_) => "analytic".to_string(),
        }
    }

    pub fn geometry(&self, mesh: &Mesh) -> Result<Vec<VertexGeometry>, GeometryError> {
        match self {
            GeometrySource::Estimated { ring_depth } => estimate_geometry(mesh, *ring_depth),
            GeometrySource::Analytic(s) => Ok(s.oracle_geometry(mesh)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub geometry: GeometrySource,
    pub solver: SolverOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            geometry: GeometrySource::Estimated {
                ring_depth: crate::diffgeo::DEFAULT_RING_DEPTH,
            },
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeshSummary {
    pub vertices: usize,
    pub faces: usize,
    pub area: f64,
    pub barycenter: [f64; 3],
    pub enclosed_volume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralSummary {
    pub lambda1_normalized: f64,
    pub residual: f64,
    pub iterations: usize,
    pub near_degenerate: bool,
    pub upper_bound: UpperBound,
}

/// The containment check redone on M̃ with λ̃₁ and ε̃, radii mapped back.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteCheck {
    pub inner: f64,
    pub outer: f64,
    pub contained: bool,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NotEvaluated {
    pub field: &'static str,
    pub reason: String,
}

/// End-to-end result. `None` marks a stage that was not evaluated; the
/// reason is listed in `not_evaluated`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PinchingReport {
    pub constants: ConstantsBlock,
    pub geometry_source: String,
    pub mesh: MeshSummary,
    pub convexity: ConvexityStatus,
    pub strictly_convex: bool,
    pub hypothesis_holds: Option<bool>,
    pub hypothesis: Option<HypothesisCheck>,
    pub epsilon_admissible: Option<bool>,
    pub lambda1: Option<f64>,
    pub spectral: Option<SpectralSummary>,
    pub roth: Option<RothCondition>,
    pub annulus: Option<Annulus>,
    pub contained: Option<bool>,
    pub oscillation: f64,
    pub phi_sup: Option<f64>,
    pub normalized_route: Option<RouteCheck>,
    pub proof_trace: Option<ProofTrace>,
    pub not_evaluated: Vec<NotEvaluated>,
}

impl PinchingReport {
    fn skip(&mut self, field: &'static str, reason: impl ToString) {
        self.not_evaluated.push(NotEvaluated {
            field,
            reason: reason.to_string(),
        });
    }
}

fn check_mesh(mesh: &Mesh) -> Result<(), PinchingError> {
    let validation = mesh.validate();
    if !validation.is_valid() {
        return Err(PinchingError::InvalidMesh {
            failures: validation.failures().into_iter().map(String::from).collect(),
        });
    }
    Ok(())
}

fn check_dimension(constants: &PinchingConstants) -> Result<(), PinchingError> {
    constants.validate()?;
    if constants.n != SURFACE_DIM {
        return Err(PinchingError::InvalidConstants(format!(
            "n = {} but meshes are surfaces (n = {SURFACE_DIM})",
            constants.n
        )));
    }
    Ok(())
}

pub fn verify_theorem(
    mesh: &Mesh,
    constants: &PinchingConstants,
    options: &VerifyOptions,
) -> Result<PinchingReport, PinchingError> {
    check_dimension(constants)?;
    check_mesh(mesh)?;
    let geometries = options.geometry.geometry(mesh)?;
    Ok(pipeline(
        mesh,
        &geometries,
        constants,
        options.solver,
        options.geometry.label(),
    ))
}

/// As [`verify_theorem`] with caller-supplied curvatures.
pub fn verify_theorem_with_geometry(
    mesh: &Mesh,
    geometries: &[VertexGeometry],
    constants: &PinchingConstants,
    solver: SolverOptions,
) -> Result<PinchingReport, PinchingError> {
    check_dimension(constants)?;
    check_mesh(mesh)?;
    ensure_len(geometries, mesh.vertex_count())?;
    Ok(pipeline(mesh, geometries, constants, solver, "supplied".to_string()))
}

fn pipeline(
    mesh: &Mesh,
    geometries: &[VertexGeometry],
    constants: &PinchingConstants,
    solver: SolverOptions,
    source: String,
) -> PinchingReport {
    let measures = mesh.measures();
    let b = measures.barycenter;
    let (dmin, dmax) = distance_range(mesh, &measures);
    let convexity = convexity_status(geometries);
    let mut report = PinchingReport {
        constants: constants.block(solver),
        geometry_source: source,
        mesh: MeshSummary {
            vertices: mesh.vertex_count(),
            faces: mesh.face_count(),
            area: measures.area,
            barycenter: [b.x, b.y, b.z],
            enclosed_volume: measures.enclosed_volume,
        },
        convexity,
        strictly_convex: convexity.strictly_convex,
        hypothesis_holds: None,
        hypothesis: None,
        epsilon_admissible: None,
        lambda1: None,
        spectral: None,
        roth: None,
        annulus: None,
        contained: None,
        oscillation: dmax - dmin,
        phi_sup: None,
        normalized_route: None,
        proof_trace: None,
        not_evaluated: Vec::new(),
    };

    match hypothesis_with_area(measures.area, geometries, constants) {
        Ok(h) => {
            report.hypothesis_holds = Some(h.holds);
            report.epsilon_admissible = Some(h.epsilon_admissible);
            report.hypothesis = Some(h);
        }
        Err(e) => {
            let reason = e.to_string();
            for field in ["hypothesis", "lambda1", "roth", "annulus", "phi_sup", "proof_trace"] {
                report.skip(field, &reason);
            }
            return report;
        }
    }

    let (mesh_t, law) = normalize_mesh(mesh);
    let scale = law.factor;
    let spectrum = build_laplace(&mesh_t)
        .map_err(PinchingError::from)
        .and_then(|sys| lambda1(&sys, solver).map_err(PinchingError::from));
    let spectrum = match spectrum {
        Ok(s) => s,
        Err(e) => {
            let reason = e.to_string();
            for field in ["lambda1", "roth", "annulus", "phi_sup", "proof_trace"] {
                report.skip(field, &reason);
            }
            return report;
        }
    };
    let lambda_t = spectrum.lambda1;
    let lambda = law.inverse().apply(Quantity::Lambda1, lambda_t);
    report.lambda1 = Some(lambda);
    report.spectral = Some(SpectralSummary {
        lambda1_normalized: lambda_t,
        residual: spectrum.residual,
        iterations: spectrum.iterations,
        near_degenerate: spectrum.near_degenerate,
        upper_bound: lambda1_upper_bound(geometries, constants.n),
    });

    if convexity.strictly_convex {
        let tilde: Vec<VertexGeometry> = geometries.iter().map(|g| g.rescaled(scale)).collect();
        match roth_condition(
            &mesh_t,
            &tilde,
            lambda_t,
            &constants.with_epsilon(scale * constants.epsilon),
        ) {
            Ok(r) => report.roth = Some(r),
            Err(e) => report.skip("roth", e),
        }
    } else {
        report.skip(
            "roth",
            format!("not strictly convex (min κ₁ = {})", convexity.min_kappa1),
        );
    }

    match annulus_check(mesh, lambda, constants.epsilon) {
        Ok(a) => {
            report.contained = Some(a.contained);
            if let Ok(t) = annulus_check(&mesh_t, lambda_t, scale * constants.epsilon) {
                let (inner, outer) = (t.inner / scale, t.outer / scale);
                report.normalized_route = Some(RouteCheck {
                    inner,
                    outer,
                    contained: t.contained,
                    agrees: t.contained == a.contained,
                });
            }
            report.annulus = Some(a);
        }
        Err(e) => report.skip("annulus", e),
    }
    match phi_sup(mesh, lambda) {
        Ok(v) => report.phi_sup = Some(v),
        Err(e) => report.skip("phi_sup", e),
    }
    match proof_trace(mesh, geometries, lambda, constants) {
        Ok(t) => report.proof_trace = Some(t),
        Err(e) => report.skip("proof_trace", e),
    }
    report
}

/// Radially perturbed spheres ρ = radius + δ·Y_{degree,order}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepFamily {
    pub radius: f64,
    pub degree: u32,
    pub order: i32,
}

impl SweepFamily {
    pub fn surface(&self, amplitude: f64) -> Result<AnalyticSurface, SurfGenError> {
        AnalyticSurface::perturbed_sphere(self.radius, amplitude, self.degree, self.order)
    }

    /// 0.9·radius/max|Y|.
    pub fn max_amplitude(&self) -> Result<f64, SurfGenError> {
        Ok(0.9 * self.radius / SphericalHarmonic::new(self.degree, self.order)?.max_abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepGeometry {
    Oracle,
    Estimated { ring_depth: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub subdivision: u32,
    pub geometry: SweepGeometry,
    pub solver: SolverOptions,
    /// α and ε are overwritten per row.
    pub constants: PinchingConstants,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub delta: f64,
    pub max_ratio: f64,
    /// 0.99·ε^{2+α}.
    pub target_ratio: f64,
    pub oscillation: f64,
    pub contained: Option<bool>,
    pub hypothesis_holds: Option<bool>,
    pub lambda1: Option<f64>,
}

/// Least-squares line through (ln ε, ln oscillation).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub family: SweepFamily,
    pub alpha: f64,
    pub subdivision: u32,
    pub geometry: String,
    /// Oscillation of the unperturbed mesh.
    pub baseline_oscillation: f64,
    pub rows: Vec<SweepRow>,
    pub fit: Option<ExponentFit>,
    pub reports: Vec<PinchingReport>,
}

/// Least-squares slope and intercept of y against x.
pub fn fit_line(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = pairwise_sum(x) / n;
    let my = pairwise_sum(y) / n;
    let sxy: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
    let sxx: Vec<f64> = x.iter().map(|a| (a - mx) * (a - mx)).collect();
    let (sxy, sxx) = (pairwise_sum(&sxy), pairwise_sum(&sxx));
    if !(sxx > 0.0) {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// For each ε, finds the largest amplitude whose pinch ratio stays within
/// 0.99·ε^{2+α} and runs the full verification on it.
pub fn sharpness_sweep(
    family: SweepFamily,
    alpha: f64,
    eps_grid: &[f64],
    options: &SweepOptions,
) -> Result<SweepTable, PinchingError> {
    if eps_grid.is_empty() {
        return Err(PinchingError::Empty);
    }
    let base = PinchingConstants {
        alpha,
        ..options.constants
    };
    for &eps in eps_grid {
        check_dimension(&base.with_epsilon(eps))?;
    }
    let hi0 = family.max_amplitude()?;

    let evaluate = |delta: f64| -> Result<(Mesh, Vec<VertexGeometry>), PinchingError> {
        let surface = family.surface(delta)?;
        let mesh = surface.generate(options.subdivision)?;
        let geometry = match options.geometry {
            SweepGeometry::Oracle => surface.oracle_geometry(&mesh),
            SweepGeometry::Estimated { ring_depth } => estimate_geometry(&mesh, ring_depth)?,
        };
        Ok((mesh, geometry))
    };
    let ratio = |delta: f64| -> Result<f64, PinchingError> {
        let (mesh, geometry) = evaluate(delta)?;
        Ok(pinch_ratio(&geometry, mesh.measures().area, alpha, SURFACE_DIM))
    };

    let (baseline_mesh, _) = evaluate(0.0)?;
    let (bmin, bmax) = distance_range(&baseline_mesh, &baseline_mesh.measures());

    let runs: Vec<Result<(SweepRow, PinchingReport), PinchingError>> = eps_grid
        .par_iter()
        .map(|&eps| {
            let target = SWEEP_TARGET_FRACTION * eps.powf(2.0 + alpha);
            let fail = |reason: String| PinchingError::AmplitudeSearch { epsilon: eps, reason };
            let floor = ratio(0.0)?;
            if floor > target {
                return Err(fail(format!("unperturbed ratio {floor} already exceeds {target}")));
            }
            let top = ratio(hi0)?;
            if top <= target {
                return Err(fail(format!(
                    "ratio {top} at the positivity limit δ = {hi0} stays below {target}"
                )));
            }
            let (mut lo, mut hi) = (0.0, hi0);
            for _ in 0..SWEEP_BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                if ratio(mid)? <= target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let (mesh, geometry) = evaluate(lo)?;
            let max_ratio = pinch_ratio(&geometry, mesh.measures().area, alpha, SURFACE_DIM);
            let constants = base.with_epsilon(eps);
            let report = verify_theorem_with_geometry(&mesh, &geometry, &constants, options.solver)?;
            let row = SweepRow {
                epsilon: eps,
                delta: lo,
                max_ratio,
                target_ratio: target,
                oscillation: report.oscillation,
                contained: report.contained,
                hypothesis_holds: report.hypothesis_holds,
                lambda1: report.lambda1,
            };
            Ok((row, report))
        })
        .collect();

    let mut pairs = runs.into_iter().collect::<Result<Vec<_>, _>>()?;
    pairs.sort_by(|a, b| a.0.epsilon.total_cmp(&b.0.epsilon));
    let (rows, reports): (Vec<SweepRow>, Vec<PinchingReport>) = pairs.into_iter().unzip();

    let (lx, ly): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.oscillation > 0.0)
        .map(|r| (r.epsilon.ln(), r.oscillation.ln()))
        .unzip();
    let fit = fit_line(&lx, &ly).map(|(slope, intercept)| ExponentFit {
        slope,
        intercept,
        points: lx.len(),
    });
    Ok(SweepTable {
        family,
        alpha,
        subdivision: options.subdivision,
        geometry: match options.geometry {
            SweepGeometry::Oracle => "analytic".to_string(),
            SweepGeometry::Estimated { ring_depth } => format!("estimated(ring_depth={ring_depth})"),
        },
        baseline_oscillation: bmax - bmin,
        rows,
        fit,
        reports,
    })
}
