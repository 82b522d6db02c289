//! Radial discretization of ℝᴺ: grids, quadrature, norms and the scaling
//! operators (dilation, power rescaling, modulus).

mod io;
mod tail;

use std::borrow::Cow;
use std::f64::consts::{LN_10, PI};
use std::sync::Arc;

pub use io::{read_radial_csv, write_radial_csv, Sidecar, SidecarTail};
pub use tail::TailModel;

use crate::error::{Error, Result};
use crate::interp::{fd4, hermite, limit_slopes};

/// Default number of grid intervals.
pub const DEFAULT_INTERVALS: usize = 8192;

/// Uniform grid on `[0, R_max]` with composite Simpson weights that already
/// contain the sphere factor `|S^{N-1}| r^{N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    dim: usize,
    r_max: f64,
    step: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Surface area of the unit sphere in ℝᴺ.
pub fn sphere_area(dim: usize) -> f64 {
    match dim {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        n => 2.0 * PI / (n - 2) as f64 * sphere_area(n - 2),
    }
}

impl RadialGrid {
    pub fn uniform(dim: usize, r_max: f64, intervals: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Domain(format!("dimension must be at least 2, got {dim}")));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::Domain(format!("R_max must be positive and finite, got {r_max}")));
        }
        if intervals < 4 || intervals % 2 != 0 {
            return Err(Error::Domain(format!("interval count must be even and ≥ 4, got {intervals}")));
        }
        let step = r_max / intervals as f64;
        let area = sphere_area(dim);
        let nodes: Vec<f64> = (0..=intervals).map(|k| k as f64 * step).collect();
        let weights = nodes
            .iter()
            .enumerate()
            .map(|(k, &r)| {
                let simpson = if k == 0 || k == intervals {
                    1.0
                } else if k % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                area * r.powi(dim as i32 - 1) * simpson * step / 3.0
            })
            .collect();
        Ok(Self { dim, r_max, step, nodes, weights })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn r_max(&self) -> f64 {
        self.r_max
    }
    pub fn step(&self) -> f64 {
        self.step
    }
    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The same grid stretched by `factor` (nodes `factor·r_k`).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::uniform(self.dim, self.r_max * factor, self.intervals())
    }

    /// ∫_{ℝᴺ} of a radial integrand sampled on the nodes, restricted to the ball `B_{R_max}`.
    pub fn integrate(&self, samples: &[f64]) -> Result<f64> {
        if samples.len() != self.nodes.len() {
            return Err(Error::Domain("sample count does not match the grid".into()));
        }
        let mut acc = 0.0;
        for (w, f) in self.weights.iter().zip(samples) {
            if !f.is_finite() {
                return Err(Error::Domain("non-finite integrand sample".into()));
            }
            acc += w * f;
        }
        Ok(acc)
    }

    /// ∫ over the ball `B_{r_j}`; Simpson with a 3/8 closing panel when `j` is odd.
    pub fn integrate_to(&self, samples: &[f64], j: usize) -> Result<f64> {
        if j == 0 {
            return Ok(0.0);
        }
        if j >= self.nodes.len() || samples.len() != self.nodes.len() {
            return Err(Error::Domain("partial integral index outside the grid".into()));
        }
        let area = sphere_area(self.dim);
        let h = self.step;
        let f = |k: usize| area * self.nodes[k].powi(self.dim as i32 - 1) * samples[k];
        let simpson = |a: usize, b: usize| -> f64 {
            (a..=b)
                .map(|k| {
                    let c = if k == a || k == b {
                        1.0
                    } else if (k - a) % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    c * f(k)
                })
                .sum::<f64>()
                * h
                / 3.0
        };
        Ok(match j {
            1 => 0.5 * h * (f(0) + f(1)),
            _ if j % 2 == 0 => simpson(0, j),
            _ => {
                let head = if j > 3 { simpson(0, j - 3) } else { 0.0 };
                let a = j - 3;
                head + 3.0 * h / 8.0 * (f(a) + 3.0 * f(a + 1) + 3.0 * f(a + 2) + f(a + 3))
            }
        })
    }
}

/// `(‖∇u‖₂, ‖u‖₂, ‖u‖_E)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H1Norms {
    pub grad: f64,
    pub l2: f64,
    pub e: f64,
}

/// A radial function sampled on a [`RadialGrid`], optionally carrying its
/// exact derivative and an exponential tail model for `r > R_max`.
#[derive(Debug, Clone)]
pub struct RadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
    slope: Option<Vec<f64>>,
    tail: Option<TailModel>,
}

impl RadialFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Domain(format!("{} values for a grid of {} nodes", values.len(), grid.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("radial function values must be finite".into()));
        }
        Ok(Self { grid, values, slope: None, tail: None })
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let n = grid.len();
        Self { grid, values: vec![0.0; n], slope: Some(vec![0.0; n]), tail: None }
    }

    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid, values)
    }

    /// Samples `f` and its derivative `df`.
    pub fn from_fn_with_derivative(
        grid: Arc<RadialGrid>,
        f: impl Fn(f64) -> f64,
        df: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let d = grid.nodes().iter().map(|&r| df(r)).collect();
        Self::from_fn(grid, f)?.with_derivative(d)
    }

    pub fn with_derivative(mut self, slope: Vec<f64>) -> Result<Self> {
        if slope.len() != self.values.len() || slope.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("derivative samples must be finite and match the grid".into()));
        }
        self.slope = Some(slope);
        Ok(self)
    }

    /// Attaches a tail model; it must continue `u(R_max)` to within 1e−6 relative.
    pub fn with_tail(mut self, tail: TailModel) -> Result<Self> {
        let n = self.grid.dim();
        let at_edge = *self.values.last().unwrap();
        let model = tail.eval(self.grid.r_max(), n);
        if (model - at_edge).abs() > 1e-6 * at_edge.abs().max(f64::MIN_POSITIVE) && model != at_edge {
            return Err(Error::Domain(format!(
                "tail model gives {model:e} at R_max but the profile ends at {at_edge:e}"
            )));
        }
        self.tail = Some(tail);
        Ok(self)
    }

    pub fn without_tail(mut self) -> Self {
        self.tail = None;
        self
    }

    pub fn without_derivative(mut self) -> Self {
        self.slope = None;
        self
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }
    pub fn dim(&self) -> usize {
        self.grid.dim()
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn tail(&self) -> Option<&TailModel> {
        self.tail.as_ref()
    }
    pub fn has_stored_derivative(&self) -> bool {
        self.slope.is_some()
    }

    /// `u'(r_k)`: the stored derivative if present, else fourth-order differences.
    pub fn derivative(&self) -> Cow<'_, [f64]> {
        match &self.slope {
            Some(s) => Cow::Borrowed(s),
            None => Cow::Owned(fd4(&self.values, self.grid.step())),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `∫ f(u) dx` including the tail contribution.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> Result<f64> {
        let samples: Vec<f64> = self.values.iter().map(|&u| f(u)).collect();
        let mut total = self.grid.integrate(&samples)?;
        if let Some(t) = &self.tail {
            total += t.integral(self.grid.r_max(), self.dim(), |u, _| f(u));
        }
        Ok(total)
    }

    /// `∫ f(u) dx` from precomputed node samples of `f(u)`; `f` itself is
    /// only called on the tail.
    pub fn integrate_samples(&self, samples: &[f64], f: impl Fn(f64) -> f64) -> Result<f64> {
        let mut total = self.grid.integrate(samples)?;
        if let Some(t) = &self.tail {
            total += t.integral(self.grid.r_max(), self.dim(), |u, _| f(u));
        }
        Ok(total)
    }

    /// `∫ f(u, u') dx` including the tail contribution.
    pub fn integrate_with_derivative(&self, f: impl Fn(f64, f64) -> f64) -> Result<f64> {
        let d = self.derivative();
        let samples: Vec<f64> = self.values.iter().zip(d.iter()).map(|(&u, &du)| f(u, du)).collect();
        let mut total = self.grid.integrate(&samples)?;
        if let Some(t) = &self.tail {
            total += t.integral(self.grid.r_max(), self.dim(), f);
        }
        Ok(total)
    }

    pub fn lp_norm(&self, exponent: f64) -> Result<f64> {
        if !(exponent.is_finite() && exponent >= 1.0) {
            return Err(Error::Domain(format!("L^p exponent must be finite and ≥ 1, got {exponent}")));
        }
        Ok(self.integrate(|u| u.abs().powf(exponent))?.powf(1.0 / exponent))
    }

    /// `½‖u‖₂²`.
    pub fn mass(&self) -> Result<f64> {
        Ok(0.5 * self.integrate(|u| u * u)?)
    }

    pub fn grad_norm_sq(&self) -> Result<f64> {
        self.integrate_with_derivative(|_, du| du * du)
    }

    pub fn h1_norms(&self) -> Result<H1Norms> {
        let g2 = self.grad_norm_sq()?;
        let l2 = self.integrate(|u| u * u)?;
        Ok(H1Norms { grad: g2.sqrt(), l2: l2.sqrt(), e: (g2 + l2).sqrt() })
    }

    /// `‖u‖_{E_θ}² = e^{(N−2)θ}‖∇u‖₂² + e^{Nθ}‖u‖₂²`, returned as the norm.
    pub fn e_theta_norm(&self, theta: f64) -> Result<f64> {
        let n = self.dim() as f64;
        let h = self.h1_norms()?;
        Ok(((n - 2.0) * theta).exp().mul_add(h.grad * h.grad, (n * theta).exp() * h.l2 * h.l2).sqrt())
    }

    /// Value at an arbitrary radius (Hermite interpolation, tail beyond `R_max`).
    pub fn eval_at(&self, r: f64) -> f64 {
        let d = self.derivative();
        self.sample(r.abs(), &self.values, &d, None).0
    }

    fn sample(&self, s: f64, y: &[f64], m: &[f64], m2: Option<&[f64]>) -> (f64, f64) {
        let h = self.grid.step();
        let k = self.grid.intervals();
        let r_max = self.grid.r_max();
        if s <= r_max {
            let j = ((s / h) as usize).min(k - 1);
            let t = (s - self.grid.nodes()[j]) / h;
            let v = hermite(y[j], y[j + 1], m[j], m[j + 1], h, t);
            let dv = match m2 {
                Some(m2) => hermite(m[j], m[j + 1], m2[j], m2[j + 1], h, t),
                None => 0.0,
            };
            return (v, dv);
        }
        let n = self.dim();
        if let Some(tail) = &self.tail {
            return (tail.eval(s, n), tail.derivative(s, n));
        }
        let edge = y[k];
        let slope = m[k];
        if edge != 0.0 && -slope / edge > 0.0 {
            let kappa = -slope / edge;
            let v = edge * (-kappa * (s - r_max)).exp();
            (v, -kappa * v)
        } else {
            (0.0, 0.0)
        }
    }

    /// `x ↦ u(x/e^θ)` resampled on the same grid by monotone cubic Hermite
    /// interpolation, with tail or exponential extrapolation past `R_max`.
    pub fn dilate(&self, theta: f64) -> Result<Self> {
        if theta == 0.0 {
            return Ok(self.clone());
        }
        if !theta.is_finite() || theta.abs() > LN_10 {
            return Err(Error::Resolution(format!("dilation by e^{theta} would move the support beyond 10·R_max")));
        }
        let h = self.grid.step();
        let slope = self.derivative().into_owned();
        let mut limited = slope.clone();
        limit_slopes(&self.values, h, &mut limited);
        let curvature = fd4(&slope, h);
        let factor = (-theta).exp();
        let mut values = Vec::with_capacity(self.values.len());
        let mut derivs = Vec::with_capacity(self.values.len());
        for &r in self.grid.nodes() {
            let s = r * factor;
            let (v, _) = self.sample(s, &self.values, &limited, None);
            let (_, dv) = self.sample(s, &self.values, &slope, Some(&curvature));
            values.push(v);
            derivs.push(factor * dv);
        }
        let mut out = Self::new(self.grid.clone(), values)?.with_derivative(derivs)?;
        if let Some(tail) = &self.tail {
            out.tail =
                tail.rescaled(theta, self.dim()).refit(self.grid.r_max(), self.dim(), *out.values.last().unwrap());
        }
        Ok(out)
    }

    /// Exact dilation `x ↦ u(x/e^θ)` carried by a grid stretched by `e^θ`.
    pub fn rescaled(&self, theta: f64) -> Result<Self> {
        let factor = theta.exp();
        let grid = Arc::new(self.grid.scaled(factor)?);
        Ok(Self {
            grid,
            values: self.values.clone(),
            slope: self.slope.as_ref().map(|s| s.iter().map(|d| d / factor).collect()),
            tail: self.tail.as_ref().map(|t| t.rescaled(theta, self.dim())),
        })
    }

    /// `μ^{1/(q−1)} w₁(μ^{1/2} x)`, exact on a grid scaled by `μ^{−1/2}`.
    pub fn power_rescale(&self, mu: f64, q: f64) -> Result<Self> {
        if !(q.is_finite() && q > 1.0) {
            return Err(Error::Domain(format!("power rescaling needs q > 1, got {q}")));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::Domain(format!("power rescaling needs μ > 0, got {mu}")));
        }
        let amp = mu.powf(1.0 / (q - 1.0));
        let root = mu.sqrt();
        let theta = -root.ln();
        let grid = Arc::new(self.grid.scaled(1.0 / root)?);
        Ok(Self {
            grid,
            values: self.values.iter().map(|v| amp * v).collect(),
            slope: self.slope.as_ref().map(|s| s.iter().map(|d| amp * root * d).collect()),
            tail: self.tail.as_ref().map(|t| t.rescaled(theta, self.dim()).scaled(amp)),
        })
    }

    /// Pointwise modulus; the derivative becomes `sign(u)·u'`, so `‖∇|u|‖₂ = ‖∇u‖₂` exactly.
    pub fn absolute_value(&self) -> Self {
        let d = self.derivative();
        let slope = self.values.iter().zip(d.iter()).map(|(&u, &du)| if u < 0.0 { -du } else { du }).collect();
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| v.abs()).collect(),
            slope: Some(slope),
            tail: self.tail.as_ref().map(|t| t.scaled(t.amplitude.signum())),
        }
    }

    /// `c·u`.
    pub fn scale(&self, c: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
            slope: self.slope.as_ref().map(|s| s.iter().map(|d| c * d).collect()),
            tail: self.tail.as_ref().map(|t| t.scaled(c)),
        }
    }

    /// `u + c·v` on a shared grid; the tail model is dropped.
    pub fn axpy(&self, c: f64, other: &Self) -> Result<Self> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && *self.grid != *other.grid {
            return Err(Error::Domain("axpy needs functions on the same grid".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect();
        let out = Self::new(self.grid.clone(), values)?;
        match (&self.slope, &other.slope) {
            (Some(a), Some(b)) => out.with_derivative(a.iter().zip(b).map(|(x, y)| x + c * y).collect()),
            _ => Ok(out),
        }
    }
}
