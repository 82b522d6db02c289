//! Seeded random test profiles: Gaussian mixtures with exact derivatives.

use std::sync::Arc;

use rand::Rng;

use crate::error::Result;
use crate::grid::{RadialFunction, RadialGrid};

/// `Σ aᵢ e^{−(r/σᵢ)²}` with one to three terms, `aᵢ ∈ [−2, 2]`, `σᵢ ∈ [0.3, 3]`.
/// Sign changes are allowed unless `positive` is set.
pub fn random_profile(rng: &mut impl Rng, grid: Arc<RadialGrid>, positive: bool) -> Result<RadialFunction> {
    let terms: Vec<(f64, f64)> = (0..rng.gen_range(1..=3))
        .map(|_| {
            let a = if positive { rng.gen_range(0.05..2.0) } else { rng.gen_range(-2.0..2.0) };
            (a, rng.gen_range(0.3..3.0))
        })
        .collect();
    gaussian_mixture(grid, &terms)
}

pub fn gaussian_mixture(grid: Arc<RadialGrid>, terms: &[(f64, f64)]) -> Result<RadialFunction> {
    let t = terms.to_vec();
    let t2 = terms.to_vec();
    RadialFunction::from_fn_with_derivative(
        grid,
        move |r| t.iter().map(|&(a, s)| a * (-(r / s).powi(2)).exp()).sum(),
        move |r| t2.iter().map(|&(a, s)| -2.0 * a * r / (s * s) * (-(r / s).powi(2)).exp()).sum(),
    )
}
