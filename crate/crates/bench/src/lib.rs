//! Shared inputs for the benchmarks.

use coneglow::{presets, MapSpec};

/// Residual set whose convex hull contains the origin in its interior:
/// the standard basis of R^n together with minus the all-ones vector, each
/// scaled a little differently.
pub fn simplex_residuals(n: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 + 0.1 * i as f64 } else { 0.0 }).collect())
        .collect();
    out.push(vec![-1.0; n]);
    out
}

/// A positive `n x n` matrix spec with distinct entries.
pub fn positive_matrix(n: usize) -> MapSpec {
    let rows = (0..n).map(|i| (0..n).map(|j| 1.0 + ((i * 7 + j * 3) % 5) as f64).collect()).collect();
    MapSpec::matrix(rows).expect("positive matrix")
}

pub fn schoen() -> MapSpec {
    presets::schoen_composition()
}
