//! The augmented space `ℝ × ℝ × E` with `J(θ, λ, u) = I(λ, u(x/e^θ))`.
//!
//! `J` is always evaluated on the exactly stretched grid, so the dilation
//! action `Φ_τ(θ, λ, u) = (θ + τ, λ, u(e^τ x))` leaves it invariant to rounding
//! when applied the same way, and to interpolation accuracy when `u(e^τ x)` is
//! resampled onto the original grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{
    big_i_from, pohozaev_from, riesz_representative, strong_residual, FunctionalContext, IdentityReport, Moments,
};
use crate::grid::RadialFunction;

#[derive(Debug, Clone)]
pub struct AugmentedPoint {
    pub theta: f64,
    pub lambda: f64,
    pub u: RadialFunction,
}

impl AugmentedPoint {
    pub fn new(theta: f64, lambda: f64, u: RadialFunction) -> Result<Self> {
        if !(theta.is_finite() && lambda.is_finite()) {
            return Err(Error::Domain("θ and λ must be finite".into()));
        }
        Ok(Self { theta, lambda, u })
    }

    /// `u(x/e^θ)` on the stretched grid.
    pub fn physical(&self) -> Result<RadialFunction> {
        self.u.rescaled(self.theta)
    }

    /// `Φ_τ`: `(θ + τ, λ, u(e^τ x))`, the new `u` resampled on the same grid.
    pub fn act(&self, tau: f64) -> Result<Self> {
        Ok(Self { theta: self.theta + tau, lambda: self.lambda, u: self.u.dilate(-tau)? })
    }
}

/// One PSPC telemetry row. `pspc = √(∂_θJ² + ∂_λJ² + cerami²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PspcRecord {
    pub j: f64,
    pub dtheta: f64,
    pub dlambda: f64,
    /// `‖∂_uJ‖_{E_θ*}`
    pub grad_dual: f64,
    /// `(1 + ‖u‖_{E_θ})·‖∂_uJ‖_{E_θ*}`
    pub cerami: f64,
    pub pspc: f64,
}

impl PspcRecord {
    pub fn new(j: f64, dtheta: f64, dlambda: f64, u_norm: f64, grad_dual: f64) -> Self {
        let cerami = (1.0 + u_norm.abs()) * grad_dual.abs();
        let (dtheta, dlambda) = (dtheta.abs(), dlambda.abs());
        Self {
            j,
            dtheta,
            dlambda,
            grad_dual: grad_dual.abs(),
            cerami,
            pspc: (dtheta * dtheta + dlambda * dlambda + cerami * cerami).sqrt(),
        }
    }

    /// Every derivative condition below `tol`.
    pub fn is_small(&self, tol: f64) -> bool {
        self.dtheta < tol && self.dlambda < tol && self.cerami < tol
    }
}

/// `(∂_θJ, ∂_λJ, ∂_uJ)`, the last as its Riesz representative in `E_θ`.
#[derive(Debug, Clone)]
pub struct Derivative {
    pub dtheta: f64,
    pub dlambda: f64,
    pub du: RadialFunction,
    /// `‖∂_uJ‖_{E_θ*} = ‖du‖_{E_θ}`
    pub grad_dual: f64,
}

impl Derivative {
    /// Norm of the derivative in the dual metric; equal to the metric gradient's length.
    pub fn norm(&self) -> f64 {
        (self.dtheta.powi(2) + self.dlambda.powi(2) + self.grad_dual.powi(2)).sqrt()
    }
}

pub fn j_eval(pt: &AugmentedPoint, ctx: &FunctionalContext) -> Result<f64> {
    let v = pt.physical()?;
    Ok(big_i_from(&Moments::of(&v, &ctx.spec)?, pt.lambda.exp(), ctx.m1))
}

/// `ctx.lambda` is ignored: `λ` comes from the point.
pub fn dj(pt: &AugmentedPoint, ctx: &FunctionalContext) -> Result<Derivative> {
    let v = pt.physical()?;
    let mu = pt.lambda.exp();
    let m = Moments::of(&v, &ctx.spec)?;
    let residual = strong_residual(&v, &ctx.spec, mu);
    // The representative of ∂_uI at v, read back on u's grid, is exactly the
    // E_θ-representative of ∂_uJ: the stretch cancels the metric weights.
    let (rho, grad_dual) = riesz_representative(v.grid(), &residual)?;
    Ok(Derivative {
        dtheta: pohozaev_from(&m, mu, v.dim()),
        dlambda: mu * (0.5 * m.l2 - ctx.m1),
        du: RadialFunction::new(pt.u.grid().clone(), rho)?,
        grad_dual,
    })
}

pub fn record_at(pt: &AugmentedPoint, ctx: &FunctionalContext) -> Result<(PspcRecord, Derivative)> {
    let v = pt.physical()?;
    let j = big_i_from(&Moments::of(&v, &ctx.spec)?, pt.lambda.exp(), ctx.m1);
    let d = dj(pt, ctx)?;
    let norm = pt.u.e_theta_norm(pt.theta)?;
    Ok((PspcRecord::new(j, d.dtheta, d.dlambda, norm, d.grad_dual), d))
}

/// `‖(a, v, h)‖_{(θ,λ,u)} = √(a² + v² + ‖h‖²_{E_θ})`.
pub fn metric_norm(pt: &AugmentedPoint, tangent: (f64, f64, &RadialFunction)) -> Result<f64> {
    let (a, v, h) = tangent;
    let hn = h.e_theta_norm(pt.theta)?;
    Ok((a * a + v * v + hn * hn).sqrt())
}

/// `Υ(θ, λ, u) = (θ, λ, |u|)`.
pub fn upsilon(pt: &AugmentedPoint) -> AugmentedPoint {
    AugmentedPoint { theta: pt.theta, lambda: pt.lambda, u: pt.u.absolute_value() }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowOptions {
    /// Initial (and maximal) time step.
    pub step: f64,
    pub n_steps: usize,
    pub armijo: f64,
    /// Largest metric displacement `τ·‖∇J‖` allowed in one step.
    pub max_move: f64,
    /// Steps below this raise a stall.
    pub min_step: f64,
    /// Metric gradient length at which the flow counts as stationary.
    pub stationary_tol: f64,
    /// Stop once `J` leaves `[lo, hi]`.
    pub level_window: Option<(f64, f64)>,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            step: 0.5,
            n_steps: 200,
            armijo: 1e-4,
            max_move: 0.1,
            min_step: 1e-12,
            stationary_tol: 1e-7,
            level_window: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStop {
    StepsExhausted,
    Stationary,
    LeftWindow,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FlowStep {
    pub step: usize,
    pub theta: f64,
    pub lambda: f64,
    /// Time step that was accepted to reach this point (0 for the start).
    pub tau: f64,
    pub record: PspcRecord,
}

#[derive(Debug, Clone)]
pub struct FlowOutcome {
    pub trajectory: Vec<FlowStep>,
    pub end: AugmentedPoint,
    pub stop: FlowStop,
}

impl FlowOutcome {
    pub fn j_values(&self) -> Vec<f64> {
        self.trajectory.iter().map(|s| s.record.j).collect()
    }

    pub fn records(&self) -> Vec<PspcRecord> {
        self.trajectory.iter().map(|s| s.record).collect()
    }

    pub fn write_csv(&self, out: impl std::io::Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "J", "dtheta", "dlambda", "grad_dual", "pspc"])?;
        for s in &self.trajectory {
            let r = s.record;
            w.write_record(&[
                s.step.to_string(),
                format!("{:.15e}", r.j),
                format!("{:.15e}", r.dtheta),
                format!("{:.15e}", r.dlambda),
                format!("{:.15e}", r.grad_dual),
                format!("{:.15e}", r.pspc),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Explicit steepest descent `η ← η − τ·∇J` in the metric of the augmented
/// space. The time step is capped so one step moves at most `max_move`,
/// halved until the Armijo condition holds, and doubled back (up to
/// `opts.step`) after each acceptance.
pub fn descent_flow(pt0: &AugmentedPoint, ctx: &FunctionalContext, opts: &FlowOptions) -> Result<FlowOutcome> {
    if !(opts.step > 0.0 && opts.step.is_finite()) {
        return Err(Error::Domain(format!("flow step must be positive, got {}", opts.step)));
    }
    // the flow moves u off its smooth representation: keep it plain from the start
    let mut pt = AugmentedPoint { u: pt0.u.clone().without_tail().without_derivative(), ..pt0.clone() };
    let (mut rec, mut d) = record_at(&pt, ctx)?;
    let mut trajectory = vec![FlowStep { step: 0, theta: pt.theta, lambda: pt.lambda, tau: 0.0, record: rec }];
    let mut tau = opts.step;
    let mut stop = FlowStop::StepsExhausted;
    for step in 1..=opts.n_steps {
        if let Some((lo, hi)) = opts.level_window {
            if !(lo..=hi).contains(&rec.j) {
                stop = FlowStop::LeftWindow;
                break;
            }
        }
        let g2 = d.norm().powi(2);
        if g2.sqrt() < opts.stationary_tol {
            stop = FlowStop::Stationary;
            break;
        }
        tau = tau.min(opts.max_move / g2.sqrt());
        let next = loop {
            if tau < opts.min_step {
                return Err(Error::Stall { step, record: Box::new(rec) });
            }
            let trial = AugmentedPoint {
                theta: pt.theta - tau * d.dtheta,
                lambda: pt.lambda - tau * d.dlambda,
                u: pt.u.axpy(-tau, &d.du)?,
            };
            match j_eval(&trial, ctx) {
                Ok(j) if j <= rec.j - opts.armijo * tau * g2 => break trial,
                Ok(_) => tau *= 0.5,
                Err(Error::Resolution(_)) | Err(Error::Domain(_)) => tau *= 0.5,
                Err(e) => return Err(e),
            }
        };
        pt = next;
        (rec, d) = record_at(&pt, ctx)?;
        trajectory.push(FlowStep { step, theta: pt.theta, lambda: pt.lambda, tau, record: rec });
        tau = (2.0 * tau).min(opts.step);
    }
    Ok(FlowOutcome { trajectory, end: pt, stop })
}

/// Runs independent flows in parallel.
pub fn descent_flows(
    starts: &[AugmentedPoint],
    ctx: &FunctionalContext,
    opts: &FlowOptions,
) -> Vec<Result<FlowOutcome>> {
    use rayon::prelude::*;
    starts.par_iter().map(|p| descent_flow(p, ctx, opts)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaTrend {
    Bounded,
    ToPlusInfinity,
    ToMinusInfinity,
}

/// Telemetry along a sequence `(λ_j, u_j)` at `θ = 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PspcMonitorReport {
    pub records: Vec<PspcRecord>,
    pub lambdas: Vec<f64>,
    /// The last record is below the smallness tolerance.
    pub pspc_small: bool,
    /// Level the sequence settles at (the final `I`), when `pspc_small`.
    pub b: Option<f64>,
    /// Residuals of the four asymptotic identities at the final element.
    pub asymptotics: Vec<IdentityReport>,
    pub lambda_trend: LambdaTrend,
}

impl PspcMonitorReport {
    pub fn asymptotics_hold(&self) -> bool {
        self.pspc_small && self.asymptotics.iter().all(|r| r.pass)
    }
}

/// `small_tol` decides PSPC-smallness of the final record; `tol` is the
/// relative tolerance for the asymptotic identities.
pub fn pspc_monitor(
    sequence: &[(f64, RadialFunction)],
    ctx: &FunctionalContext,
    small_tol: f64,
    tol: f64,
) -> Result<PspcMonitorReport> {
    if sequence.is_empty() {
        return Err(Error::EmptyInput("PSPC monitor needs at least one element".into()));
    }
    let mut records = Vec::with_capacity(sequence.len());
    for (lambda, u) in sequence {
        let pt = AugmentedPoint::new(0.0, *lambda, u.clone())?;
        records.push(record_at(&pt, ctx)?.0);
    }
    let lambdas: Vec<f64> = sequence.iter().map(|(l, _)| *l).collect();
    let last = records.last().unwrap();
    let pspc_small = last.is_small(small_tol);
    let (b, asymptotics) = if pspc_small {
        let b = last.j;
        let (lambda, u) = sequence.last().unwrap();
        let mu = lambda.exp();
        let n = u.dim() as f64;
        let m = Moments::of(u, &ctx.spec)?;
        let mm = mu * ctx.m1;
        let scale = 1.0 + mm.abs() + b.abs();
        let rows = vec![
            IdentityReport::new("mu_l2", mu * m.l2, 2.0 * mm, scale, tol),
            IdentityReport::new("grad", m.grad, n * mm + n * b, scale, tol),
            IdentityReport::new("big_g", m.big_g, 0.5 * n * mm + 0.5 * (n - 2.0) * b, scale, tol),
            IdentityReport::new("gu", m.gu, (n + 2.0) * mm + n * b, scale, tol),
        ];
        (Some(b), rows)
    } else {
        (None, Vec::new())
    };
    Ok(PspcMonitorReport { records, lambda_trend: lambda_trend(&lambdas), lambdas, pspc_small, b, asymptotics })
}

/// Monotone with increments that do not die out, and a total drift above one.
fn lambda_trend(l: &[f64]) -> LambdaTrend {
    if l.len() < 3 {
        return LambdaTrend::Bounded;
    }
    let steps: Vec<f64> = l.windows(2).map(|w| w[1] - w[0]).collect();
    let first = steps[0];
    let last = *steps.last().unwrap();
    let drift = l[l.len() - 1] - l[0];
    let monotone = steps.iter().all(|s| s * first > 0.0);
    if monotone && drift.abs() > 1.0 && last.abs() >= 0.5 * first.abs() {
        if drift > 0.0 {
            LambdaTrend::ToPlusInfinity
        } else {
            LambdaTrend::ToMinusInfinity
        }
    } else {
        LambdaTrend::Bounded
    }
}
