//! Energies, constraint functionals and the exact identities they satisfy.
//!
//! Every functional is assembled from one set of [`Moments`], so algebraic
//! identities between them hold to rounding rather than to discretization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{RadialFunction, RadialGrid};
use crate::interp::fd4;
use crate::nonlinearity::{critical_exponent, NonlinearitySpec};
use crate::shooting::{solve_ground_state, ShootingOptions};

/// Nonlinearity, critical mass and Lagrange parameter `λ` (`μ = e^λ`).
#[derive(Debug, Clone)]
pub struct FunctionalContext {
    pub spec: NonlinearitySpec,
    pub m1: f64,
    pub lambda: f64,
}

impl FunctionalContext {
    pub fn new(spec: NonlinearitySpec, m1: f64, lambda: f64) -> Result<Self> {
        if !(m1 > 0.0 && m1.is_finite()) {
            return Err(Error::Domain(format!("m₁ must be positive, got {m1}")));
        }
        if !lambda.is_finite() {
            return Err(Error::Domain("λ must be finite".into()));
        }
        Ok(Self { spec, m1, lambda })
    }

    /// Uses the computed critical mass of the spec's dimension.
    pub fn with_critical_mass(spec: NonlinearitySpec, lambda: f64) -> Result<Self> {
        let m1 = crate::shooting::critical_mass(spec.dim())?;
        Self::new(spec, m1, lambda)
    }

    pub fn mu(&self) -> f64 {
        self.lambda.exp()
    }

    pub fn at_lambda(&self, lambda: f64) -> Self {
        Self { lambda, ..self.clone() }
    }
}

/// The integrals every functional is built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    /// `‖∇u‖₂²`
    pub grad: f64,
    /// `‖u‖₂²`
    pub l2: f64,
    /// `‖u‖_{p+1}^{p+1}`
    pub lp: f64,
    /// `∫G(u)`
    pub big_g: f64,
    /// `∫g(u)u`
    pub gu: f64,
    /// `∫(H(u) − ½h(u)u)` with `h = g − |s|^{p−1}s`
    pub rho_term: f64,
}

impl Moments {
    pub fn of(u: &RadialFunction, spec: &NonlinearitySpec) -> Result<Self> {
        let p = spec.p();
        let big_g = spec.cap_g_batch(u.values());
        let rho: Vec<f64> = u
            .values()
            .iter()
            .zip(&big_g)
            .map(|(&v, gg)| gg - v.abs().powf(p + 1.0) / (p + 1.0) - 0.5 * spec.effective_h(v) * v)
            .collect();
        Ok(Self {
            grad: u.grad_norm_sq()?,
            l2: u.integrate(|v| v * v)?,
            lp: u.integrate(|v| v.abs().powf(p + 1.0))?,
            big_g: u.integrate_samples(&big_g, |v| spec.cap_g(v))?,
            gu: u.integrate(|v| spec.g(v) * v)?,
            rho_term: u.integrate_samples(&rho, |v| spec.effective_cap_h(v) - 0.5 * spec.effective_h(v) * v)?,
        })
    }
}

/// `ℰ_q(u) = ½‖∇u‖₂² − ‖u‖_{q+1}^{q+1}/(q+1)`.
pub fn energy_eq(u: &RadialFunction, q: f64) -> Result<f64> {
    Ok(0.5 * u.grad_norm_sq()? - u.integrate(|v| v.abs().powf(q + 1.0))? / (q + 1.0))
}

pub fn psi_mu_from(m: &Moments, mu: f64) -> f64 {
    0.5 * m.grad + 0.5 * mu * m.l2 - m.big_g
}

/// `Ψ_μ(u) = ½‖∇u‖₂² + (μ/2)‖u‖₂² − ∫G(u)`.
pub fn psi_mu(u: &RadialFunction, ctx: &FunctionalContext) -> Result<f64> {
    Ok(psi_mu_from(&Moments::of(u, &ctx.spec)?, ctx.mu()))
}

/// `Ψ₀μ(u) = ½‖∇u‖₂² + (μ/2)‖u‖₂² − ‖u‖_{p+1}^{p+1}/(p+1)`.
pub fn psi0_mu(u: &RadialFunction, ctx: &FunctionalContext) -> Result<f64> {
    let m = Moments::of(u, &ctx.spec)?;
    let p = ctx.spec.p();
    Ok(0.5 * m.grad + 0.5 * ctx.mu() * m.l2 - m.lp / (p + 1.0))
}

pub fn big_i_from(m: &Moments, mu: f64, m1: f64) -> f64 {
    0.5 * m.grad - m.big_g + mu * (0.5 * m.l2 - m1)
}

/// `I(λ, u) = ½‖∇u‖₂² − ∫G(u) + e^λ(½‖u‖₂² − m₁)`.
pub fn big_i(u: &RadialFunction, ctx: &FunctionalContext) -> Result<f64> {
    Ok(big_i_from(&Moments::of(u, &ctx.spec)?, ctx.mu(), ctx.m1))
}

pub fn pohozaev_from(m: &Moments, mu: f64, dim: usize) -> f64 {
    let n = dim as f64;
    0.5 * (n - 2.0) * m.grad + n * (0.5 * mu * m.l2 - m.big_g)
}

/// `P(λ, u) = ((N−2)/2)‖∇u‖₂² + N(½e^λ‖u‖₂² − ∫G(u))`.
pub fn pohozaev_p(u: &RadialFunction, ctx: &FunctionalContext) -> Result<f64> {
    Ok(pohozaev_from(&Moments::of(u, &ctx.spec)?, ctx.mu(), u.dim()))
}

/// `∂_uI(λ,u)u = ‖∇u‖₂² + e^λ‖u‖₂² − ∫g(u)u`.
pub fn nehari(u: &RadialFunction, ctx: &FunctionalContext) -> Result<f64> {
    let m = Moments::of(u, &ctx.spec)?;
    Ok(m.grad + ctx.mu() * m.l2 - m.gu)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalIdentity {
    /// `½‖∇u‖₂² − ‖u‖_{p+1}^{p+1}/(p+1)`
    pub r1: f64,
    /// `(N/2)∫(H(u) − ½h(u)u)`
    pub r2: f64,
    pub total: f64,
}

pub fn critical_identity_from(m: &Moments, dim: usize) -> CriticalIdentity {
    let p = critical_exponent(dim);
    let r1 = 0.5 * m.grad - m.lp / (p + 1.0);
    let r2 = 0.5 * dim as f64 * m.rho_term;
    CriticalIdentity { r1, r2, total: r1 + r2 }
}

/// The split of `(N/4)∂_uI(λ,u)u − ½P(λ,u)` into its power and perturbation parts.
pub fn critical_identity_residual(u: &RadialFunction, spec: &NonlinearitySpec) -> Result<CriticalIdentity> {
    Ok(critical_identity_from(&Moments::of(u, spec)?, u.dim()))
}

/// Comparison of two computed quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub left: f64,
    pub right: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl IdentityReport {
    /// `residual = |left − right| / max(|left|, |right|, scale)`.
    pub fn new(name: impl Into<String>, left: f64, right: f64, scale: f64, tolerance: f64) -> Self {
        let residual = (left - right).abs() / left.abs().max(right.abs()).max(scale);
        Self { name: name.into(), left, right, residual, tolerance, pass: residual <= tolerance }
    }

    /// One-sided check `left ≥ right − tolerance·scale`.
    pub fn at_least(name: impl Into<String>, left: f64, right: f64, scale: f64, tolerance: f64) -> Self {
        let residual = ((right - left) / scale.max(f64::MIN_POSITIVE)).max(0.0);
        Self { name: name.into(), left, right, residual, tolerance, pass: residual <= tolerance }
    }
}

/// `Z(u) = ½‖∇u‖₂² − ∫G(u)`.
pub fn zero_mass_z(u: &RadialFunction, spec: &NonlinearitySpec) -> Result<f64> {
    let m = Moments::of(u, spec)?;
    Ok(0.5 * m.grad - m.big_g)
}

/// Nehari, Pohozaev, their combination and the sign of `Z` for a zero-mass candidate.
pub fn zero_mass_residuals(u: &RadialFunction, spec: &NonlinearitySpec, tolerance: f64) -> Result<Vec<IdentityReport>> {
    let m = Moments::of(u, spec)?;
    let n = u.dim() as f64;
    let scale = m.grad.max(f64::MIN_POSITIVE);
    let z = 0.5 * m.grad - m.big_g;
    Ok(vec![
        IdentityReport::new("‖∇u‖² = ∫g(u)u", m.grad, m.gu, scale, tolerance),
        IdentityReport::new("((N−2)/2)‖∇u‖² = N∫G(u)", 0.5 * (n - 2.0) * m.grad, n * m.big_g, scale, tolerance),
        IdentityReport::new("∫NG(u) − ((N−2)/2)g(u)u = 0", n * m.big_g - 0.5 * (n - 2.0) * m.gu, 0.0, scale, tolerance),
        IdentityReport::at_least("Z(u) ≥ 0", z, 0.0, scale, tolerance),
    ])
}

/// `C_GN = ½(p+1)(2m₁)^{−2/N}`.
pub fn gn_constant(m1: f64, dim: usize) -> f64 {
    0.5 * (critical_exponent(dim) + 1.0) * (2.0 * m1).powf(-2.0 / dim as f64)
}

/// `‖u‖_{p+1}^{p+1} / (‖∇u‖₂² ‖u‖₂^{4/N})`.
pub fn gn_quotient(u: &RadialFunction) -> Result<f64> {
    let p = critical_exponent(u.dim());
    let grad = u.grad_norm_sq()?;
    let l2 = u.integrate(|v| v * v)?;
    if grad <= 0.0 || l2 <= 0.0 {
        return Err(Error::Domain("Gagliardo–Nirenberg quotient of the zero function".into()));
    }
    Ok(u.integrate(|v| v.abs().powf(p + 1.0))? / (grad * l2.powf(2.0 / u.dim() as f64)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub dim: usize,
    /// `max_r r|u(r)|³` for N = 2.
    pub max_weighted: Option<f64>,
    /// `(3/2π)‖u‖₄²‖∇u‖₂` for N = 2.
    pub bound: Option<f64>,
    pub pass: Option<bool>,
    /// `(r, r^{(N−2)/2}|u(r)|)` for N ≥ 3; no constant is known, so no verdict.
    pub envelope: Vec<[f64; 2]>,
}

pub fn decay_report(u: &RadialFunction) -> Result<DecayReport> {
    let n = u.dim();
    let nodes = u.grid().nodes();
    if n == 2 {
        let lhs = nodes.iter().zip(u.values()).map(|(&r, &v)| r * v.abs().powi(3)).fold(0.0, f64::max);
        let l4 = u.integrate(|v| v.powi(4))?.sqrt();
        let bound = 3.0 / (2.0 * std::f64::consts::PI) * l4 * u.grad_norm_sq()?.sqrt();
        return Ok(DecayReport {
            dim: n,
            max_weighted: Some(lhs),
            bound: Some(bound),
            pass: Some(lhs <= bound * (1.0 + 1e-9)),
            envelope: Vec::new(),
        });
    }
    let stride = (nodes.len() / 256).max(1);
    let envelope = nodes
        .iter()
        .zip(u.values())
        .step_by(stride)
        .map(|(&r, &v)| [r, r.powf(0.5 * (n as f64 - 2.0)) * v.abs()])
        .collect();
    Ok(DecayReport { dim: n, max_weighted: None, bound: None, pass: None, envelope })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub mu: f64,
    pub mass: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingLawReport {
    pub q: f64,
    pub rows: Vec<ScalingRow>,
    /// Fitted `d log ℳ / d log μ` against `N(p−q)/(2(q−1))`.
    pub mass_slope: IdentityReport,
    /// Fitted `d log|ℰ_q| / d log μ` against `2/(q−1) − N/2 + 1`; absent at `q = p` where `ℰ_p ≡ 0`.
    pub energy_slope: Option<IdentityReport>,
    /// `ℰ_q/(μℳ)` (μ-independent) at the first sample against `N(q−p)/((N+2) − (N−2)q)`.
    pub energy_ratio: Option<IdentityReport>,
}

fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Solves `w_{q,μ}` at each sample and fits the μ-scaling of mass and energy.
pub fn scaling_law_check(spec: &NonlinearitySpec, mu_samples: &[f64], tolerance: f64) -> Result<ScalingLawReport> {
    let q = match spec.family() {
        crate::nonlinearity::Family::PurePower { q } => *q,
        _ => return Err(Error::NotApplicable("scaling laws are stated for pure powers".into())),
    };
    if mu_samples.len() < 2 {
        return Err(Error::EmptyInput("need at least two μ samples".into()));
    }
    let n = spec.dim() as f64;
    let p = spec.p();
    let rows: Vec<ScalingRow> = mu_samples
        .iter()
        .map(|&mu| {
            let sol = solve_ground_state(spec, mu, &ShootingOptions::default())?;
            Ok(ScalingRow { mu, mass: sol.mass()?, energy: energy_eq(&sol.profile, q)? })
        })
        .collect::<Result<_>>()?;
    let x: Vec<f64> = rows.iter().map(|r| r.mu.ln()).collect();
    let ym: Vec<f64> = rows.iter().map(|r| r.mass.ln()).collect();
    let expected_mass = n * (p - q) / (2.0 * (q - 1.0));
    let mass_slope = IdentityReport::new("mass slope", ls_slope(&x, &ym), expected_mass, 1.0, tolerance);
    let critical = (q - p).abs() < 1e-12;
    let (energy_slope, energy_ratio) = if critical {
        (None, None)
    } else {
        let ye: Vec<f64> = rows.iter().map(|r| r.energy.abs().ln()).collect();
        let expected_e = 2.0 / (q - 1.0) - n / 2.0 + 1.0;
        let ratio = n * (q - p) / ((n + 2.0) - (n - 2.0) * q);
        (
            Some(IdentityReport::new("energy slope", ls_slope(&x, &ye), expected_e, 1.0, tolerance)),
            Some(IdentityReport::new("ℰ_q/(μℳ)", rows[0].energy / (rows[0].mu * rows[0].mass), ratio, 1.0, tolerance)),
        )
    };
    Ok(ScalingLawReport { q, rows, mass_slope, energy_slope, energy_ratio })
}

/// `R = −u″ − ((N−1)/r)u′ + μu − g(u)` at the nodes; `−Nu″(0) + μu(0) − g(u(0))` at the origin.
pub fn strong_residual(u: &RadialFunction, spec: &NonlinearitySpec, mu: f64) -> Vec<f64> {
    let grid = u.grid();
    let du = u.derivative();
    let d2 = fd4(&du, grid.step());
    let n = u.dim() as f64;
    grid.nodes()
        .iter()
        .zip(u.values())
        .zip(du.iter().zip(&d2))
        .map(|((&r, &v), (&d, &dd))| {
            let lap = if r == 0.0 { n * dd } else { dd + (n - 1.0) / r * d };
            -lap + mu * v - spec.g(v)
        })
        .collect()
}

/// `‖f‖_{E*}` for the functional `φ ↦ ∫Rφ`: the E-norm of the Riesz
/// representative, from linear elements on the grid (Neumann at `R_max`).
pub fn riesz_dual_norm(grid: &RadialGrid, residual: &[f64]) -> Result<f64> {
    Ok(riesz_representative(grid, residual)?.1)
}

/// Nodal values of the Riesz representative `ρ` of `φ ↦ ∫Rφ` in `E`, and `‖ρ‖_E`.
pub fn riesz_representative(grid: &RadialGrid, residual: &[f64]) -> Result<(Vec<f64>, f64)> {
    let n = grid.len();
    if residual.len() != n {
        return Err(Error::Domain("residual does not match the grid".into()));
    }
    let dim = grid.dim() as i32;
    let area = crate::grid::sphere_area(grid.dim());
    let h = grid.step();
    let r = grid.nodes();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n - 1];
    let mut lumped = vec![0.0; n];
    let gauss = [(-(0.6f64).sqrt(), 5.0 / 9.0), (0.0, 8.0 / 9.0), ((0.6f64).sqrt(), 5.0 / 9.0)];
    for k in 0..n - 1 {
        let stiff = area * (r[k + 1].powi(dim) - r[k].powi(dim)) / (dim as f64 * h * h);
        let (mut maa, mut mab, mut mbb) = (0.0, 0.0, 0.0);
        for &(x, w) in &gauss {
            let t = 0.5 * (1.0 + x);
            let rr = r[k] + t * h;
            let wt = 0.5 * h * w * area * rr.powi(dim - 1);
            maa += wt * (1.0 - t) * (1.0 - t);
            mab += wt * (1.0 - t) * t;
            mbb += wt * t * t;
        }
        diag[k] += stiff + maa;
        diag[k + 1] += stiff + mbb;
        off[k] += -stiff + mab;
        lumped[k] += maa + mab;
        lumped[k + 1] += mab + mbb;
    }
    let b: Vec<f64> = lumped.iter().zip(residual).map(|(m, v)| m * v).collect();
    let rho = thomas(&off, &diag, &off, &b)?;
    let sq: f64 = rho.iter().zip(&b).map(|(a, c)| a * c).sum();
    Ok((rho, sq.max(0.0).sqrt()))
}

/// Tridiagonal solve; `sub[i]` couples rows `i+1, i`, `sup[i]` rows `i, i+1`.
fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut beta = diag[0];
    c[0] = if n > 1 { sup[0] / beta } else { 0.0 };
    d[0] = rhs[0] / beta;
    for i in 1..n {
        beta = diag[i] - sub[i - 1] * c[i - 1];
        if beta == 0.0 || !beta.is_finite() {
            return Err(Error::Domain("singular tridiagonal system".into()));
        }
        if i < n - 1 {
            c[i] = sup[i] / beta;
        }
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// `‖∂_uI(λ, u)‖_{E*}`.
pub fn gradient_dual_norm(u: &RadialFunction, ctx: &FunctionalContext) -> Result<f64> {
    riesz_dual_norm(u.grid(), &strong_residual(u, &ctx.spec, ctx.mu()))
}

/// Whether the sampled `μ ↦ ℐ(sω_μ)` stays bounded below or runs off to `−∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DTrend {
    Zero,
    NegInfinity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DProbe {
    pub m: f64,
    pub s: f64,
    /// `(μ, ℐ(sω_μ))`
    pub samples: Vec<[f64; 2]>,
    pub infimum: f64,
    pub trend: DTrend,
    /// Closed form against direct quadrature at the middle of the sweep.
    pub witness: IdentityReport,
}

/// `d(m) = inf ℐ` over the family `{sω_μ : ½‖sω_μ‖₂² = m}` for the pure critical power.
pub fn d_of_m_probe(
    omega1: &RadialFunction,
    spec: &NonlinearitySpec,
    m1: f64,
    m: f64,
    mu_sweep: &[f64],
) -> Result<DProbe> {
    if !spec.is_pure_critical() {
        return Err(Error::NotApplicable("the d(m) probe is defined for g(s) = |s|^{p−1}s".into()));
    }
    if mu_sweep.is_empty() {
        return Err(Error::EmptyInput("empty μ sweep".into()));
    }
    if !(m > 0.0) {
        return Err(Error::Domain(format!("mass must be positive, got {m}")));
    }
    let n = spec.dim() as f64;
    let p = spec.p();
    let s = (m / m1).sqrt();
    let closed = |mu: f64| 0.5 * n * m1 * mu * (s * s - s.powf(p + 1.0));
    let samples: Vec<[f64; 2]> = mu_sweep.iter().map(|&mu| [mu, closed(mu)]).collect();
    let infimum = samples.iter().map(|v| v[1]).fold(f64::INFINITY, f64::min);
    let tail: Vec<f64> = samples.iter().rev().take(3).map(|v| v[1]).collect();
    let trend = if infimum < 0.0 && tail.windows(2).all(|w| w[0] < w[1]) { DTrend::NegInfinity } else { DTrend::Zero };

    let mu_w = mu_sweep[mu_sweep.len() / 2];
    let u = omega1.power_rescale(mu_w, p)?.scale(s);
    let direct = {
        let mm = Moments::of(&u, spec)?;
        0.5 * mm.grad - mm.big_g
    };
    let witness = IdentityReport::new(format!("ℐ(sω_μ) at μ = {mu_w}"), direct, closed(mu_w), m1 * mu_w, 1e-6);
    Ok(DProbe { m, s, samples, infimum, trend, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::Perturbation;
    use crate::profiles::random_profile;
    use crate::shooting::critical_ground_state;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    const M1: f64 = 5.850448262280896;

    fn grid(dim: usize) -> Arc<RadialGrid> {
        Arc::new(RadialGrid::uniform(dim, 20.0, 4096).unwrap())
    }

    fn ctx2(lambda: f64) -> FunctionalContext {
        FunctionalContext::new(NonlinearitySpec::critical(2).unwrap(), M1, lambda).unwrap()
    }

    #[test]
    fn zero_function() {
        let z = RadialFunction::zeros(grid(2));
        let c = ctx2(0.3);
        assert_eq!(psi_mu(&z, &c).unwrap(), 0.0);
        assert_eq!(pohozaev_p(&z, &c).unwrap(), 0.0);
        assert!((big_i(&z, &c).unwrap() + c.mu() * M1).abs() < 1e-12);
        assert!(matches!(gn_quotient(&z), Err(Error::Domain(_))));
        assert_eq!(energy_eq(&z, 3.0).unwrap(), 0.0);
        let d = decay_report(&z).unwrap();
        assert_eq!(d.pass, Some(true));
        assert!(zero_mass_residuals(&z, &c.spec, 1e-8).unwrap().iter().all(|r| r.pass));
    }

    #[test]
    fn ground_state_identities() {
        let w = critical_ground_state(2).unwrap();
        let c = ctx2(0.0);
        let m = Moments::of(&w.profile, &c.spec).unwrap();
        assert!((m.grad - 2.0 * M1).abs() < 1e-6 * M1);
        assert!((psi0_mu(&w.profile, &c).unwrap() - M1).abs() < 1e-6 * M1);
        assert!((energy_eq(&w.profile, 3.0).unwrap()).abs() < 1e-6 * M1);
        let ci = critical_identity_residual(&w.profile, &c.spec).unwrap();
        assert_eq!(ci.r2, 0.0);
        assert!(ci.total.abs() < 1e-6 * M1);
        assert!((gn_quotient(&w.profile).unwrap() / gn_constant(M1, 2) - 1.0).abs() < 1e-6);
        assert_eq!(decay_report(&w.profile).unwrap().pass, Some(true));
        // the rescaled ground state keeps Ψ₀μ = μm₁
        let w4 = w.profile.power_rescale(4.0, 3.0).unwrap();
        assert!((psi0_mu(&w4, &ctx2(4f64.ln())).unwrap() - 4.0 * M1).abs() < 1e-6 * 4.0 * M1);
    }

    #[test]
    fn subcritical_energy_equals_mass() {
        let s = NonlinearitySpec::pure_power(3, 3.0).unwrap();
        let sol = solve_ground_state(&s, 1.0, &ShootingOptions::default()).unwrap();
        let e = energy_eq(&sol.profile, 3.0).unwrap();
        assert!((e / sol.mass().unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn gaussian_is_below_the_optimal_constant() {
        let u = crate::profiles::gaussian_mixture(grid(2), &[(1.0, 1.0)]).unwrap();
        assert!(gn_quotient(&u).unwrap() < gn_constant(M1, 2));
    }

    #[test]
    fn pohozaev_is_the_dilation_derivative() {
        let spec = NonlinearitySpec::perturbed(2, Perturbation::Saturated { c: 1.0, a: 4.0, b: 0.5 }).unwrap();
        let c = FunctionalContext::new(spec, M1, 0.2).unwrap();
        let u = crate::profiles::gaussian_mixture(grid(2), &[(1.4, 1.2), (-0.3, 0.5)]).unwrap();
        let p = pohozaev_p(&u, &c).unwrap();
        let fd = |d: f64| {
            (big_i(&u.rescaled(d).unwrap(), &c).unwrap() - big_i(&u.rescaled(-d).unwrap(), &c).unwrap()) / (2.0 * d)
        };
        let (e1, e2) = ((fd(0.02) - p).abs(), (fd(0.01) - p).abs());
        assert!(e2 < 1e-4 * p.abs());
        assert!((e1 / e2 - 4.0).abs() < 0.5, "{}", e1 / e2);
    }

    #[test]
    fn i_is_psi_minus_mu_m1_and_critical_split() {
        let spec = NonlinearitySpec::perturbed(2, Perturbation::Soave { theta: 0.5, q: 1.5 }).unwrap();
        let c = FunctionalContext::new(spec.clone(), M1, -0.7).unwrap();
        let u = crate::profiles::gaussian_mixture(grid(2), &[(1.1, 1.3)]).unwrap();
        let m = Moments::of(&u, &spec).unwrap();
        assert!((big_i_from(&m, c.mu(), M1) - (psi_mu_from(&m, c.mu()) - c.mu() * M1)).abs() < 1e-12);
        // (N/4)·Nehari − ½P equals r1 + r2
        let n = 2.0;
        let lhs = 0.25 * n * (m.grad + c.mu() * m.l2 - m.gu) - 0.5 * pohozaev_from(&m, c.mu(), 2);
        let ci = critical_identity_from(&m, 2);
        assert!((lhs - ci.total).abs() < 1e-12 * m.grad);
        assert!(ci.r2 > 0.0);
    }

    #[test]
    fn riesz_norm_of_a_known_functional() {
        // R = (−Δ + 1)φ for φ = e^{−r²} has ‖R‖_{E*} = ‖φ‖_E
        let g = grid(3);
        let phi = crate::profiles::gaussian_mixture(g.clone(), &[(1.0, 1.0)]).unwrap();
        let res: Vec<f64> = g.nodes().iter().map(|&r| (6.0 - 4.0 * r * r) * (-r * r).exp() + (-r * r).exp()).collect();
        let dual = riesz_dual_norm(&g, &res).unwrap();
        let e = phi.h1_norms().unwrap().e;
        assert!((dual / e - 1.0).abs() < 1e-4, "{dual} vs {e}");
        // the ground state is a critical point
        let w = critical_ground_state(2).unwrap();
        let gn = gradient_dual_norm(&w.profile, &ctx2(0.0)).unwrap();
        assert!(gn < 1e-6, "{gn}");
    }

    #[test]
    fn d_probe_dichotomy() {
        let w = critical_ground_state(2).unwrap();
        let spec = NonlinearitySpec::critical(2).unwrap();
        let sweep: Vec<f64> = (-3..=6).map(|k| 10f64.powi(k)).collect();
        let at = d_of_m_probe(&w.profile, &spec, M1, M1, &sweep).unwrap();
        assert!(at.infimum >= -1e-6 && at.trend == DTrend::Zero);
        let above = d_of_m_probe(&w.profile, &spec, M1, 4.0 * M1, &sweep).unwrap();
        assert!(above.infimum < -1e6 && above.trend == DTrend::NegInfinity);
        assert!(above.witness.pass, "{:?}", above.witness);
    }

    #[test]
    fn scaling_laws_subcritical() {
        let s = NonlinearitySpec::pure_power(3, 3.0).unwrap();
        let r = scaling_law_check(&s, &[0.25, 1.0, 4.0], 1e-4).unwrap();
        assert!(r.mass_slope.pass, "{:?}", r.mass_slope);
        assert!(r.energy_slope.as_ref().unwrap().pass);
        assert!(r.energy_ratio.as_ref().unwrap().pass);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn gn_inequality_and_cor22(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_profile(&mut rng, grid(2), false).unwrap();
            let q = gn_quotient(&u).unwrap();
            prop_assert!(q <= gn_constant(M1, 2) * (1.0 + 1e-6));
            let scale = (M1 / u.mass().unwrap()).sqrt();
            let v = u.scale(scale);
            let ci = critical_identity_residual(&v, &NonlinearitySpec::critical(2).unwrap()).unwrap();
            let m = Moments::of(&v, &NonlinearitySpec::critical(2).unwrap()).unwrap();
            prop_assert!(ci.r1 >= -1e-8 * m.grad);
        }

        #[test]
        fn i_matches_psi_on_random_profiles(seed in any::<u64>(), lambda in -3.0f64..3.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_profile(&mut rng, grid(3), false).unwrap();
            let spec = NonlinearitySpec::perturbed(3, Perturbation::Saturated { c: 0.7, a: 3.0, b: 0.5 }).unwrap();
            let c = FunctionalContext::new(spec, 10.0, lambda).unwrap();
            let i = big_i(&u, &c).unwrap();
            let psi = psi_mu(&u, &c).unwrap();
            prop_assert!((i - (psi - c.mu() * 10.0)).abs() <= 1e-12 * (1.0 + psi.abs() + c.mu() * 10.0));
        }
    }
}
