//! Measures of simplices and their facets.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Relative degeneracy threshold for volumes, measured against `diam^k`.
pub const DEGENERACY_TOLERANCE: f64 = 1e-14;

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Largest pairwise distance between the points.
pub fn diameter(points: &[&[f64]]) -> f64 {
    let mut diam: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            diam = diam.max(distance(a, b));
        }
    }
    diam
}

/// Edge vectors `p_k - p_0` as the columns of a `dim x (points - 1)` matrix.
pub fn edge_matrix(points: &[&[f64]]) -> DMatrix<f64> {
    let dim = points[0].len();
    DMatrix::from_fn(dim, points.len() - 1, |i, k| {
        points[k + 1][i] - points[0][i]
    })
}

/// Volume `|det(v1 - v0, ..., vn - v0)| / n!` of an n-simplex in R^n.
pub fn simplex_volume(points: &[&[f64]]) -> Result<f64> {
    let n = points.len().saturating_sub(1);
    if n == 0 || points.iter().any(|p| p.len() != n) {
        return Err(Error::DimensionError {
            expected: n,
            actual: points.first().map_or(0, |p| p.len()),
        });
    }
    let volume = edge_matrix(points).determinant().abs() / factorial(n);
    let tolerance = DEGENERACY_TOLERANCE * diameter(points).powi(n as i32);
    if !(volume > tolerance) {
        return Err(Error::DegenerateSimplex {
            measure: volume,
            tolerance,
        });
    }
    Ok(volume)
}

/// Relative (n-1)-dimensional measure of n points in R^n, computed from the
/// Gram determinant of the edge vectors.
pub fn facet_measure(points: &[&[f64]]) -> Result<f64> {
    let n = points.len();
    if n < 2 || points.iter().any(|p| p.len() != n) {
        return Err(Error::DimensionError {
            expected: n,
            actual: points.first().map_or(0, |p| p.len()),
        });
    }
    let g = edge_matrix(points);
    let gram = g.transpose() * &g;
    let measure = gram.determinant().max(0.0).sqrt() / factorial(n - 1);
    let tolerance = DEGENERACY_TOLERANCE * diameter(points).powi(n as i32 - 1);
    if !(measure > tolerance) {
        return Err(Error::DegenerateSimplex { measure, tolerance });
    }
    Ok(measure)
}

/// Gradients of the barycentric coordinates `lambda_0, ..., lambda_n` of an
/// n-simplex; row `i` of the result is `grad lambda_i`.
pub fn barycentric_gradients(points: &[&[f64]]) -> DMatrix<f64> {
    let n = points.len() - 1;
    let jac = edge_matrix(points);
    // lambda_{1..n}(x) = J^{-1} (x - x_0)
    let jinv = jac
        .try_inverse()
        .expect("barycentric gradients of a degenerate simplex");
    let mut grads = DMatrix::zeros(n + 1, n);
    for i in 0..n {
        for k in 0..n {
            grads[(i + 1, k)] = jinv[(i, k)];
            grads[(0, k)] -= jinv[(i, k)];
        }
    }
    grads
}
