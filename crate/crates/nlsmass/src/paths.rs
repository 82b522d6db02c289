//! Explicit mountain-pass paths: rays `t ↦ tω_μ`, the barrier map `ζ₀`, and
//! optimal paths through a ground state.
//!
//! Every path is sampled at 257 points per piece; the maximum is then
//! polished by golden-section search on the bracketing samples, and the
//! change from a once-refined sampling is recorded.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::FunctionalContext;
use crate::grid::RadialFunction;
use crate::nonlinearity::{NonlinearitySpec, Sampling};
use crate::shooting::{critical_ground_state, GroundStateSolution};

pub const SAMPLES: usize = 257;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    Ray,
    Zeta0,
    Optimal,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathProfile {
    pub kind: PathKind,
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    pub argmax: f64,
    pub max: f64,
    /// `|max(refined sampling) − max(sampling)| / max(1, |max|)`, before polishing.
    pub refine_change: f64,
}

impl PathProfile {
    pub fn write_csv(&self, out: impl std::io::Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "value"])?;
        for (t, v) in self.t.iter().zip(&self.values) {
            w.write_record(&[format!("{t:.15e}"), format!("{v:.15e}")])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Concatenates pieces already mapped onto consecutive parameter ranges.
    fn join(kind: PathKind, pieces: Vec<PathProfile>) -> Self {
        let mut out = PathProfile {
            kind,
            t: Vec::new(),
            values: Vec::new(),
            argmax: 0.0,
            max: f64::NEG_INFINITY,
            refine_change: 0.0,
        };
        for p in pieces {
            let skip = usize::from(out.t.last() == p.t.first());
            out.t.extend(&p.t[skip..]);
            out.values.extend(&p.values[skip..]);
            if p.max > out.max {
                out.max = p.max;
                out.argmax = p.argmax;
            }
            out.refine_change = out.refine_change.max(p.refine_change);
        }
        out
    }
}

/// Samples `f` on `[a, b]`, refines once, and polishes the maximum.
/// `map` sends the path parameter to the reported abscissa.
fn sample(
    kind: PathKind,
    f: &impl Fn(f64) -> Result<f64>,
    a: f64,
    b: f64,
    n: usize,
    map: impl Fn(f64) -> f64,
) -> Result<PathProfile> {
    let at = |i: usize, m: usize| a + (b - a) * i as f64 / (m - 1) as f64;
    let coarse: Vec<f64> = (0..n).map(|i| f(at(i, n))).collect::<Result<_>>()?;
    let mids: Vec<f64> = (0..n - 1).map(|i| f(at(2 * i + 1, 2 * n - 1))).collect::<Result<_>>()?;
    let best = |v: &[f64]| {
        v.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |m, (i, x)| if x > m.1 { (i, x) } else { m })
    };
    let (_, mc) = best(&coarse);
    let (_, mm) = best(&mids);
    let refine_change = (mc.max(mm) - mc).abs() / mc.abs().max(1.0);
    let mut t = Vec::with_capacity(2 * n - 1);
    let mut values = Vec::with_capacity(2 * n - 1);
    for i in 0..n {
        t.push(at(2 * i, 2 * n - 1));
        values.push(coarse[i]);
        if i + 1 < n {
            t.push(at(2 * i + 1, 2 * n - 1));
            values.push(mids[i]);
        }
    }
    let (i, _) = best(&values);
    let lo = t[i.saturating_sub(1)];
    let hi = t[(i + 1).min(t.len() - 1)];
    let (x, v) = golden_max(f, lo, hi)?;
    let (argmax, max) = if v >= values[i] { (x, v) } else { (t[i], values[i]) };
    Ok(PathProfile { kind, t: t.into_iter().map(&map).collect(), values, argmax: map(argmax), max, refine_change })
}

fn golden_max(f: &impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    const R: f64 = 0.618_033_988_749_894_9;
    let mut c = b - R * (b - a);
    let mut d = a + R * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..80 {
        if (b - a).abs() <= 1e-12 * (1.0 + a.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - R * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + R * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc > fd { (c, fc) } else { (d, fd) })
}

/// `Ψ_μ(u) = ½‖∇u‖₂² + (μ/2)‖u‖₂² − ∫G(u)`, the functional `L` of the scalar problem.
fn psi(u: &RadialFunction, spec: &NonlinearitySpec, mu: f64) -> Result<f64> {
    let g = spec.cap_g_batch(u.values());
    Ok(0.5 * u.grad_norm_sq()? + 0.5 * mu * u.integrate(|v| v * v)? - u.integrate_samples(&g, |v| spec.cap_g(v))?)
}

/// `ω_μ = μ^{1/(p−1)} ω₁(√μ x)` for the pure critical power.
pub fn omega_mu(dim: usize, mu: f64) -> Result<RadialFunction> {
    let w = critical_ground_state(dim)?;
    w.profile.power_rescale(mu, crate::nonlinearity::critical_exponent(dim))
}

/// `I(λ, tω_μ) = μm₁((N+2)(½t² − t^{p+1}/(p+1)) − 1)` for the pure critical power.
pub fn power_ray_closed_form(dim: usize, mu: f64, m1: f64, t: f64) -> f64 {
    let n = dim as f64;
    let p = 1.0 + 4.0 / n;
    mu * m1 * ((n + 2.0) * (0.5 * t * t - t.powf(p + 1.0) / (p + 1.0)) - 1.0)
}

/// `t ↦ I(λ, tω_μ)` on `[0, t_max]` for the pure critical power.
pub fn power_ray_profile(ctx: &FunctionalContext, t_max: f64) -> Result<PathProfile> {
    if !ctx.spec.is_pure_critical() {
        return Err(Error::NotApplicable("the ray profile is defined for the pure critical power".into()));
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::Domain(format!("t_max must be positive, got {t_max}")));
    }
    let mu = ctx.mu();
    let w = omega_mu(ctx.spec.dim(), mu)?;
    let f = |t: f64| Ok(psi(&w.scale(t), &ctx.spec, mu)? - mu * ctx.m1);
    sample(PathKind::Ray, &f, 0.0, t_max, SAMPLES, |t| t)
}

/// Constants of the barrier map `ζ₀(λ) = T₀μ^{−1/(p+1)}ω_μ` (`λ ≤ λ₀`),
/// `T₁ω_μ` (`λ > λ₀`). The short bridge between the two branches is not built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Zeta0Params {
    pub t0: f64,
    pub t1: f64,
    pub lambda0: f64,
    /// Growth constant with `|H(s)| ≤ As²`.
    pub a: f64,
}

impl Zeta0Params {
    /// The barrier level `−2Am₁ − 1`.
    pub fn barrier(&self, m1: f64) -> f64 {
        -2.0 * self.a * m1 - 1.0
    }

    /// Smallest powers of two `T₀`, then `T₁ > T₀μ₀^{−1/(p+1)}`, meeting
    /// `Ψ_μ(ζ₀(λ)) < −2Am₁ − 1` at every sampled `λ` of each branch.
    pub fn search(spec: &NonlinearitySpec, m1: f64, lambda0: f64, lambdas: &[f64]) -> Result<Self> {
        let a = spec.estimate_a(&Sampling::default())?;
        let mut params = Self { t0: 2.0, t1: 2.0, lambda0, a };
        let barrier = params.barrier(m1);
        let p = spec.p();
        let meets = |t: f64, branch_low: bool| -> Result<bool> {
            for &l in lambdas.iter().filter(|&&l| (l <= lambda0) == branch_low) {
                let mu = l.exp();
                let scale = if branch_low { t * mu.powf(-1.0 / (p + 1.0)) } else { t };
                if psi(&omega_mu(spec.dim(), mu)?.scale(scale), spec, mu)? >= barrier {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        let search = |start: f64, low: bool| -> Result<f64> {
            let mut t = start;
            while t <= 1024.0 {
                if meets(t, low)? {
                    return Ok(t);
                }
                t *= 2.0;
            }
            Err(Error::Path(format!(
                "no barrier constant up to 1024 on the {} branch",
                if low { "lower" } else { "upper" }
            )))
        };
        params.t0 = search(2.0, true)?;
        let floor = params.t0 * lambda0.exp().powf(-1.0 / (p + 1.0));
        let mut t1 = 2.0;
        while t1 <= floor {
            t1 *= 2.0;
        }
        params.t1 = search(t1, false)?;
        Ok(params)
    }

    pub fn zeta0(&self, spec: &NonlinearitySpec, lambda: f64) -> Result<RadialFunction> {
        let mu = lambda.exp();
        let w = omega_mu(spec.dim(), mu)?;
        Ok(if lambda <= self.lambda0 { w.scale(self.t0 * mu.powf(-1.0 / (spec.p() + 1.0))) } else { w.scale(self.t1) })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Zeta0Profile {
    pub lambda: f64,
    /// `t ↦ I(λ, tζ₀(λ))` on `[0, 1]`.
    pub profile: PathProfile,
    pub endpoint_psi: f64,
    pub endpoint_mass: f64,
    pub barrier: f64,
    pub barrier_ok: bool,
    pub mass_ok: bool,
}

pub fn zeta0_segment_profile(ctx: &FunctionalContext, lambda: f64, params: &Zeta0Params) -> Result<Zeta0Profile> {
    let spec = &ctx.spec;
    let mu = lambda.exp();
    let z = params.zeta0(spec, lambda)?;
    let f = |t: f64| Ok(psi(&z.scale(t), spec, mu)? - mu * ctx.m1);
    let profile = sample(PathKind::Zeta0, &f, 0.0, 1.0, SAMPLES, |t| t)?;
    let endpoint_psi = psi(&z, spec, mu)?;
    let endpoint_mass = z.mass()?;
    let barrier = params.barrier(ctx.m1);
    Ok(Zeta0Profile {
        lambda,
        profile,
        endpoint_psi,
        endpoint_mass,
        barrier,
        barrier_ok: endpoint_psi < barrier,
        mass_ok: endpoint_mass > ctx.m1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum PathShape {
    /// `γ(t) = u₀(x/(Tt))`, `N ≥ 3`.
    Dilation { big_t: f64, t0: f64, increasing_before: bool, decreasing_after: bool },
    /// `t u_{0θ₀}`, then `u_{0θ}` for `θ ∈ [θ₀, θ₁]`, then `t u_{0θ₁}` for `t ∈ [1, t₁]`; `N = 2`.
    ThreePiece {
        theta0: f64,
        theta1: f64,
        t1: f64,
        /// `∫F(u₀) = ∫G(u₀) − (μ/2)‖u₀‖₂²`, zero at a critical point in 2-D.
        big_f: f64,
        /// `max_θ |L(u_{0θ}) − L(u₀)| / |L(u₀)|` on the plateau.
        plateau_deviation: f64,
        /// `min_{t ∈ (0,1]} (d/dt L(t u_{0θ₀}))/t`
        min_slope_a: f64,
        /// `max_{t ∈ [1,t₁]} d/dt L(t u_{0θ₁})`
        max_slope_c: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimalPath {
    pub mu: f64,
    /// `L(u₀) = Ψ_μ(u₀)`
    pub level: f64,
    pub endpoint: f64,
    pub profile: PathProfile,
    pub shape: PathShape,
}

impl OptimalPath {
    /// Sign conditions of the construction and `L(γ(1)) < 0`.
    pub fn well_formed(&self, flat_tol: f64) -> bool {
        self.endpoint < 0.0
            && match self.shape {
                PathShape::Dilation { increasing_before, decreasing_after, .. } => {
                    increasing_before && decreasing_after
                }
                PathShape::ThreePiece { plateau_deviation, min_slope_a, max_slope_c, .. } => {
                    plateau_deviation < flat_tol && min_slope_a > 0.0 && max_slope_c < 0.0
                }
            }
    }
}

const BIG_T_MAX: f64 = 1024.0;

/// Optimal mountain-pass path through the ground state `u₀` of
/// `−Δu + μu = g(u)`, with `L = Ψ_μ`.
pub fn optimal_path_profile(u0: &GroundStateSolution) -> Result<OptimalPath> {
    let spec = &u0.spec;
    let mu = u0.mu;
    let u = &u0.profile;
    let level = psi(u, spec, mu)?;
    if spec.dim() >= 3 {
        dilation_path(u, spec, mu, level)
    } else {
        three_piece_path(u, spec, mu, level)
    }
}

fn dilation_path(u: &RadialFunction, spec: &NonlinearitySpec, mu: f64, level: f64) -> Result<OptimalPath> {
    let l_at = |s: f64| -> Result<f64> {
        if s == 0.0 {
            return Ok(0.0);
        }
        psi(&u.rescaled(s.ln())?, spec, mu)
    };
    let mut big_t = 2.0;
    while l_at(big_t)? >= 0.0 {
        big_t *= 2.0;
        if big_t > BIG_T_MAX {
            return Err(Error::Path(format!("L(γ(1)) ≥ 0 for every T ≤ {BIG_T_MAX}")));
        }
    }
    let f = |t: f64| l_at(big_t * t);
    let profile = sample(PathKind::Optimal, &f, 0.0, 1.0, SAMPLES, |t| t)?;
    let t0 = 1.0 / big_t;
    let (mut inc, mut dec) = (true, true);
    for (w, tt) in profile.values.windows(2).zip(profile.t.windows(2)) {
        if tt[1] <= t0 && w[1] <= w[0] {
            inc = false;
        }
        if tt[0] >= t0 && w[1] >= w[0] {
            dec = false;
        }
    }
    Ok(OptimalPath {
        mu,
        level,
        endpoint: *profile.values.last().unwrap(),
        profile,
        shape: PathShape::Dilation { big_t, t0, increasing_before: inc, decreasing_after: dec },
    })
}

fn three_piece_path(u: &RadialFunction, spec: &NonlinearitySpec, mu: f64, level: f64) -> Result<OptimalPath> {
    let t1 = 1.1;
    let dil = |theta: f64| u.rescaled(theta.ln());
    // d/dt L(t v) = t‖∇v‖₂² − ∫(g(tv) − μtv)v, and ‖∇v‖₂ is dilation invariant in 2-D
    let grad = u.grad_norm_sq()?;
    let slope = |v: &RadialFunction, t: f64| -> Result<f64> {
        Ok(t * grad - v.integrate(|x| (spec.g(t * x) - mu * t * x) * x)?)
    };
    let big_f = {
        let g = spec.cap_g_batch(u.values());
        u.integrate_samples(&g, |v| spec.cap_g(v))? - 0.5 * mu * u.integrate(|v| v * v)?
    };

    let ts: Vec<f64> = (1..=32).map(|i| i as f64 / 32.0).collect();
    let mut theta0 = 0.5;
    let min_slope_a = loop {
        let v = dil(theta0)?;
        let worst = ts
            .iter()
            .map(|&t| slope(&v, t).map(|s| s / t))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if worst > 0.0 {
            break worst;
        }
        theta0 *= 0.5;
        if theta0 < 1.0 / BIG_T_MAX {
            return Err(Error::Path("no θ₀ makes the first piece increasing".into()));
        }
    };
    let tc: Vec<f64> = (0..=32).map(|i| 1.0 + (t1 - 1.0) * i as f64 / 32.0).collect();
    let mut theta1 = 2.0;
    let max_slope_c = loop {
        let v = dil(theta1)?;
        let worst =
            tc.iter().map(|&t| slope(&v, t)).collect::<Result<Vec<_>>>()?.into_iter().fold(f64::NEG_INFINITY, f64::max);
        if worst < 0.0 && psi(&v.scale(t1), spec, mu)? < 0.0 {
            break worst;
        }
        theta1 *= 2.0;
        if theta1 > BIG_T_MAX {
            return Err(Error::Path(format!("L(t₁u_θ) ≥ 0 for every θ ≤ {BIG_T_MAX}")));
        }
    };
    let (v0, v1) = (dil(theta0)?, dil(theta1)?);
    let third = 1.0 / 3.0;
    let a = sample(PathKind::Optimal, &|t: f64| psi(&v0.scale(t), spec, mu), 0.0, 1.0, SAMPLES, |t| third * t)?;
    let b = sample(PathKind::Optimal, &|th: f64| psi(&dil(th)?, spec, mu), theta0, theta1, SAMPLES, |th| {
        third * (1.0 + (th - theta0) / (theta1 - theta0))
    })?;
    let c = sample(PathKind::Optimal, &|t: f64| psi(&v1.scale(t), spec, mu), 1.0, t1, SAMPLES, |t| {
        third * (2.0 + (t - 1.0) / (t1 - 1.0))
    })?;
    let plateau_deviation =
        b.values.iter().map(|v| (v - level).abs()).fold(0.0, f64::max) / level.abs().max(f64::MIN_POSITIVE);
    let endpoint = *c.values.last().unwrap();
    let profile = PathProfile::join(PathKind::Optimal, vec![a, b, c]);
    Ok(OptimalPath {
        mu,
        level,
        endpoint,
        profile,
        shape: PathShape::ThreePiece { theta0, theta1, t1, big_f, plateau_deviation, min_slope_a, max_slope_c },
    })
}
