//! Deterministic summation helpers.

use nalgebra::Vector3;

const LEAF: usize = 32;

/// Pairwise (tree) summation. The split points depend only on the length,
/// so the result is reproducible regardless of how the inputs were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

pub fn pairwise_sum_by<T>(items: &[T], f: &impl Fn(&T) -> f64) -> f64 {
    if items.len() <= LEAF {
        return items.iter().map(f).sum();
    }
    let mid = items.len() / 2;
    pairwise_sum_by(&items[..mid], f) + pairwise_sum_by(&items[mid..], f)
}

pub fn pairwise_sum_vec3<T>(items: &[T], f: &impl Fn(&T) -> Vector3<f64>) -> Vector3<f64> {
    if items.len() <= LEAF {
        return items.iter().map(f).fold(Vector3::zeros(), |acc, v| acc + v);
    }
    let mid = items.len() / 2;
    pairwise_sum_vec3(&items[..mid], f) + pairwise_sum_vec3(&items[mid..], f)
}
