//! Discrete curvature pinching diagnostics for closed surfaces in R³.
//!
//! Given a closed triangle surface, this crate estimates the shape operator,
//! the traceless second fundamental form, Ricci curvature and the first
//! nonzero Laplace–Beltrami eigenvalue, and evaluates the almost-umbilical
//! pinching hypothesis `‖Å‖ ≤ H |M|^{-(2+α)/n} ε^{2+α}` together with the
//! annulus containment `M ⊂ B_{r+ε}(x₀) \ B_{r−ε}(x₀)`, `r = √(n/λ₁)`,
//! and the intermediate spectral and integral estimates that connect them.

pub mod cli;
pub mod diffgeo;
pub mod fields;
pub mod mesh;
pub mod pinching;
pub mod spectral;
mod sum;
pub mod surfgen;

pub use diffgeo::{estimate_geometry, ConvexityStatus, VertexGeometry};
pub use fields::{normalize_mesh, Exponent, RescalingLaw, ScalarField};
pub use mesh::{load_mesh, Mesh, MeshFormat, MeshMeasures, ValidationReport};
pub use pinching::{verify_theorem, PinchingConstants, PinchingReport, ProofTrace, VerifyOptions};
pub use spectral::{build_laplace, lambda1, LaplaceSystem, SolverOptions, SpectralResult};
pub use surfgen::AnalyticSurface;
