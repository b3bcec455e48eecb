//! Area-weighted vertex fields, their integrals and L^p norms, the unit-area
//! rescaling, and sublevel-set measures.

use serde::Serialize;
use thiserror::Error;

use crate::mesh::Mesh;
use crate::sum::pairwise_sum;

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("field has {values} values but {weights} weights")]
    LengthMismatch { values: usize, weights: usize },
    #[error("weight {index} is not positive ({weight})")]
    NonPositiveWeight { index: usize, weight: f64 },
    #[error("empty integration region")]
    EmptyRegion,
    #[error("region index {0} out of range")]
    RegionOutOfRange(usize),
    #[error("L^p exponent must satisfy p >= 1, got {0}")]
    InvalidExponent(f64),
}

/// Exponent of an L^p norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl From<f64> for Exponent {
    fn from(p: f64) -> Self {
        if p.is_infinite() {
            Exponent::Infinity
        } else {
            Exponent::Finite(p)
        }
    }
}

/// Per-vertex scalar values with positive quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self, FieldError> {
        if values.len() != weights.len() {
            return Err(FieldError::LengthMismatch {
                values: values.len(),
                weights: weights.len(),
            });
        }
        if let Some((index, &weight)) = weights.iter().enumerate().find(|(_, w)| !(**w > 0.0)) {
            return Err(FieldError::NonPositiveWeight { index, weight });
        }
        Ok(ScalarField { values, weights })
    }

    /// Field on a mesh with barycentric vertex areas as weights.
    pub fn on_mesh(mesh: &Mesh, values: Vec<f64>) -> Result<Self, FieldError> {
        Self::new(values, mesh.vertex_areas())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            values: self.values.iter().map(|&v| f(v)).collect(),
            weights: self.weights.clone(),
        }
    }

    /// Same values, weights multiplied by `factor` (measure rescaling).
    pub fn reweighted(&self, factor: f64) -> ScalarField {
        ScalarField {
            values: self.values.clone(),
            weights: self.weights.iter().map(|w| w * factor).collect(),
        }
    }

    pub fn total_measure(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    fn region_indices(&self, region: Option<&[usize]>) -> Result<Vec<usize>, FieldError> {
        let idx: Vec<usize> = match region {
            Some(r) => {
                if let Some(&bad) = r.iter().find(|&&i| i >= self.values.len()) {
                    return Err(FieldError::RegionOutOfRange(bad));
                }
                r.to_vec()
            }
            None => (0..self.values.len()).collect(),
        };
        if idx.is_empty() {
            return Err(FieldError::EmptyRegion);
        }
        Ok(idx)
    }

    /// Σ w_i v_i over the region.
    pub fn integrate(&self, region: Option<&[usize]>) -> Result<f64, FieldError> {
        let idx = self.region_indices(region)?;
        let terms: Vec<f64> = idx.iter().map(|&i| self.weights[i] * self.values[i]).collect();
        Ok(pairwise_sum(&terms))
    }

    /// (Σ w_i |v_i|^p)^{1/p}, or max |v_i| for p = ∞.
    pub fn lp_norm(&self, p: impl Into<Exponent>, region: Option<&[usize]>) -> Result<f64, FieldError> {
        let idx = self.region_indices(region)?;
        let max = idx.iter().map(|&i| self.values[i].abs()).fold(0.0, f64::max);
        match p.into() {
            Exponent::Infinity => Ok(max),
            Exponent::Finite(p) => {
                if !(p >= 1.0) || !p.is_finite() {
                    return Err(FieldError::InvalidExponent(p));
                }
                if max == 0.0 {
                    return Ok(0.0);
                }
                // Factor out the maximum so large exponents neither overflow
                // nor underflow: ‖v‖_p = max · (Σ w (|v|/max)^p)^{1/p}.
                let terms: Vec<f64> = idx
                    .iter()
                    .map(|&i| self.weights[i] * (self.values[i].abs() / max).powf(p))
                    .collect();
                Ok(max * pairwise_sum(&terms).powf(1.0 / p))
            }
        }
    }

    /// ln(Σ w_i |v_i|^p), the p-th power of the norm, in log space.
    pub fn ln_lp_power(&self, p: f64, region: Option<&[usize]>) -> Result<f64, FieldError> {
        let norm = self.lp_norm(p, region)?;
        Ok(p * norm.ln())
    }

    /// Measures of {v < threshold} and {v ≥ threshold}.
    pub fn sublevel_measure(&self, threshold: f64) -> (f64, f64) {
        let (below, above): (Vec<f64>, Vec<f64>) = self
            .values
            .iter()
            .zip(&self.weights)
            .map(|(&v, &w)| if v < threshold { (w, 0.0) } else { (0.0, w) })
            .unzip();
        (pairwise_sum(&below), pairwise_sum(&above))
    }

    /// Indices with v < threshold.
    pub fn sublevel_set(&self, threshold: f64) -> Vec<usize> {
        (0..self.values.len()).filter(|&i| self.values[i] < threshold).collect()
    }
}

/// Physical quantities and the power of the scale factor c they pick up
/// under X → cX of an n-dimensional hypersurface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Quantity {
    Position,
    Length,
    /// n-dimensional volume of the hypersurface.
    Volume,
    Curvature,
    Lambda1,
    Ricci,
}

impl Quantity {
    pub fn exponent(self, n: u32) -> i32 {
        match self {
            Quantity::Position | Quantity::Length => 1,
            Quantity::Volume => n as i32,
            Quantity::Curvature => -1,
            Quantity::Lambda1 | Quantity::Ricci => -2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RescalingLaw {
    pub factor: f64,
    pub n: u32,
}

impl RescalingLaw {
    pub fn new(factor: f64, n: u32) -> Self {
        RescalingLaw { factor, n }
    }

    pub fn identity(n: u32) -> Self {
        RescalingLaw { factor: 1.0, n }
    }

    pub fn then(self, other: RescalingLaw) -> RescalingLaw {
        debug_assert_eq!(self.n, other.n);
        RescalingLaw {
            factor: self.factor * other.factor,
            n: self.n,
        }
    }

    pub fn inverse(self) -> RescalingLaw {
        RescalingLaw {
            factor: 1.0 / self.factor,
            n: self.n,
        }
    }

    pub fn apply(&self, quantity: Quantity, value: f64) -> f64 {
        value * self.factor.powi(quantity.exponent(self.n))
    }
}

/// Unit-area copy of a surface mesh (n = 2) and the factor c = |M|^{-1/2}.
pub fn normalize_mesh(mesh: &Mesh) -> (Mesh, RescalingLaw) {
    let area = mesh.measures().area;
    let c = area.powf(-0.5);
    if c == 1.0 {
        return (mesh.clone(), RescalingLaw::identity(2));
    }
    (mesh.scaled(c), RescalingLaw::new(c, 2))
}
