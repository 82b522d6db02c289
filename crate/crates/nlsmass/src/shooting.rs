//! Positive radial ground states of `−Δw + μw = g(w)` by shooting on `w(0)`.
//!
//! Two passes: a free adaptive pass brackets the height and measures the
//! length scales, then a node-clamped pass on the final grid bisects the
//! height to rounding. The lower and upper shots track the ground state until
//! they separate; past that radius the profile continues with the exponential
//! tail fitted there.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{RadialFunction, RadialGrid, TailModel};
use crate::nonlinearity::{NonlinearitySpec, Sampling};
use crate::ode::{Dopri5, State};

/// Outcome of one shot from `w(0) = w0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shot {
    /// `w` reaches zero.
    Overshoot,
    /// `w′ ≥ 0` while `w > 0`.
    Undershoot,
    /// `w` decays below `converged_fraction · w0` while positive and decreasing.
    Converged,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShootingOptions {
    /// Relative tolerance of the fine pass.
    pub rtol: f64,
    /// Threshold (relative to `w0`) below which [`classify_shot`] reports `Converged`.
    pub converged_fraction: f64,
    pub min_intervals: usize,
    pub max_intervals: usize,
    /// Grid nodes per half-width radius of the profile.
    pub nodes_per_half_width: f64,
    /// Largest initial height tried before giving up.
    pub height_cap: f64,
    /// Log-spaced heights probed for additional brackets.
    pub scan_points: usize,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            converged_fraction: 1e-6,
            min_intervals: crate::grid::DEFAULT_INTERVALS,
            max_intervals: 1 << 20,
            nodes_per_half_width: 400.0,
            height_cap: 1e6,
            scan_points: 24,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `|‖∇w‖² + μ‖w‖² − ∫g(w)w| / (μ‖w‖²)`.
    pub nehari_residual: f64,
    /// `|P(λ, w)| / (μ‖w‖²)`.
    pub pohozaev_residual: f64,
    pub boundary_value: f64,
    /// Final `(hi − lo)/w0` of the height bracket.
    pub bisection_width: f64,
    /// Radius past which the profile is the fitted tail.
    pub cut_radius: f64,
    /// Every undershoot→overshoot transition seen on the coarse height scan.
    pub brackets: Vec<[f64; 2]>,
    pub multiple_brackets: bool,
}

#[derive(Debug, Clone)]
pub struct GroundStateSolution {
    pub spec: NonlinearitySpec,
    pub mu: f64,
    pub w0: f64,
    pub profile: RadialFunction,
    pub diagnostics: Diagnostics,
}

impl GroundStateSolution {
    /// `½‖w‖₂²`, tail included.
    pub fn mass(&self) -> Result<f64> {
        self.profile.mass()
    }
    pub fn lambda(&self) -> f64 {
        self.mu.ln()
    }
}

pub fn mass_of(solution: &GroundStateSolution) -> Result<f64> {
    solution.mass()
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    /// Run until the shot over- or undershoots.
    Decide,
    /// Also stop with `Converged` once the shot has decayed far enough.
    Classify(f64),
}

struct Shooter<'a> {
    spec: &'a NonlinearitySpec,
    mu: f64,
    dim: f64,
}

struct Trajectory {
    shot: Shot,
    event_radius: f64,
    half_radius: Option<f64>,
    nodes: Vec<State>,
}

impl<'a> Shooter<'a> {
    fn new(spec: &'a NonlinearitySpec, mu: f64) -> Self {
        Self { spec, mu, dim: spec.dim() as f64 }
    }

    fn rhs(&self) -> impl Fn(f64, &State) -> State + '_ {
        move |r, y| [y[1], self.mu * y[0] - self.spec.g(y[0]) - (self.dim - 1.0) / r * y[1]]
    }

    fn kappa(&self) -> f64 {
        self.mu.sqrt()
    }

    /// Local length scale at the origin.
    fn scale(&self, w0: f64) -> f64 {
        1.0 / (self.mu + (self.spec.g(w0) / w0).abs()).sqrt()
    }

    /// Series start `w = w0 + a r²` with `a = (μw0 − g(w0))/(2N)`.
    fn series(&self, w0: f64, r: f64) -> State {
        let a = (self.mu * w0 - self.spec.g(w0)) / (2.0 * self.dim);
        [w0 + a * r * r, 2.0 * a * r]
    }

    fn event(mode: Mode, w0: f64, y: &State) -> Option<Shot> {
        if y[0] <= 0.0 {
            Some(Shot::Overshoot)
        } else if y[1] >= 0.0 {
            Some(Shot::Undershoot)
        } else if let Mode::Classify(frac) = mode {
            (y[0] < frac * w0).then_some(Shot::Converged)
        } else if y[0] < 1e-250 {
            // indistinguishable from the ground state in double precision
            Some(Shot::Converged)
        } else {
            None
        }
    }

    /// Free adaptive run from the series start until an event.
    fn free(&self, w0: f64, rtol: f64, mode: Mode, from: Option<(f64, State)>) -> Result<Trajectory> {
        let l = self.scale(w0);
        let (r0, y0) = from.unwrap_or_else(|| {
            let r = 1e-4 * l;
            (r, self.series(w0, r))
        });
        let mut stepper = Dopri5::new(rtol, 1e-16 * w0, 1e-3 * l);
        let mut shot = None;
        let mut half = None;
        let mut prev = (r0, y0[0]);
        let cap = r0 + 2000.0 / self.kappa() + 2000.0 * l;
        let f = self.rhs();
        let end = stepper.run(&f, r0, y0, cap, |r, y| {
            if half.is_none() && y[0] <= 0.5 * w0 {
                let t = (prev.1 - 0.5 * w0) / (prev.1 - y[0]);
                half = Some(prev.0 + t * (r - prev.0));
            }
            prev = (r, y[0]);
            shot = Self::event(mode, w0, y);
            shot.is_none()
        })?;
        Ok(Trajectory {
            shot: shot.unwrap_or(Shot::Converged),
            event_radius: end.r,
            half_radius: half,
            nodes: Vec::new(),
        })
    }

    /// Node-clamped run over `grid` from node `start` with state `y0`, recording
    /// `(w, w′)` at nodes; shots still undecided at `R_max` continue freely.
    fn clamped(
        &self,
        w0: f64,
        grid: &RadialGrid,
        start: usize,
        y0: State,
        rtol: f64,
        mode: Mode,
    ) -> Result<Trajectory> {
        let nodes = grid.nodes();
        let l = self.scale(w0);
        let mut out = Vec::with_capacity(nodes.len() - start);
        out.push(y0);
        let (mut r, mut y) = if start == 0 {
            let r0 = (1e-4 * l).min(0.5 * nodes[1]);
            (r0, self.series(w0, r0))
        } else {
            (nodes[start], y0)
        };
        let mut stepper = Dopri5::new(rtol, 1e-16 * w0, (1e-3 * l).min(nodes[start + 1] - r));
        let f = self.rhs();
        for &target in &nodes[start + 1..] {
            let mut shot = None;
            let end = stepper.run(&f, r, y, target, |_, y| {
                shot = Self::event(mode, w0, y);
                shot.is_none()
            })?;
            if let Some(shot) = shot {
                return Ok(Trajectory { shot, event_radius: end.r, half_radius: None, nodes: out });
            }
            r = end.r;
            y = end.y;
            out.push(y);
        }
        let shot = self.free(w0, rtol, mode, Some((r, y)))?.shot;
        Ok(Trajectory { shot, event_radius: f64::INFINITY, half_radius: None, nodes: out })
    }
}

/// Bisects a shooting parameter between an undershooting and an overshooting
/// value until no floating-point midpoint remains.
fn bisect(
    shoot: impl Fn(f64) -> Result<Trajectory>,
    (mut u, mut ut): (f64, Trajectory),
    (mut o, mut ot): (f64, Trajectory),
) -> Result<(f64, Trajectory, f64, Trajectory)> {
    loop {
        let mid = 0.5 * (u + o);
        if mid == u || mid == o || (u - o).abs() <= 1e-15 * u.abs().max(o.abs()) {
            break;
        }
        let t = shoot(mid)?;
        match t.shot {
            Shot::Undershoot => {
                u = mid;
                ut = t;
            }
            Shot::Overshoot => {
                o = mid;
                ot = t;
            }
            Shot::Converged => break,
        }
    }
    Ok((u, ut, o, ot))
}

/// Widens `u, o` symmetrically until `u` undershoots and `o` overshoots.
fn establish(
    shoot: &impl Fn(f64) -> Result<Trajectory>,
    mut u: f64,
    mut o: f64,
    min_gap: f64,
) -> Result<((f64, Trajectory), (f64, Trajectory))> {
    let mut gap = (u - o).abs().max(min_gap);
    let dir = if o >= u { 1.0 } else { -1.0 };
    let mut ut = shoot(u)?;
    let mut ot = shoot(o)?;
    for _ in 0..200 {
        if ut.shot == Shot::Undershoot && ot.shot == Shot::Overshoot {
            return Ok(((u, ut), (o, ot)));
        }
        gap *= 4.0;
        if ut.shot != Shot::Undershoot {
            u -= dir * gap;
            ut = shoot(u)?;
        }
        if ot.shot != Shot::Overshoot {
            o += dir * gap;
            ot = shoot(o)?;
        }
    }
    Err(Error::NoBracket("fine pass could not re-establish the shooting bracket".into()))
}

/// Shoots from `w0` on `grid` and classifies the outcome.
pub fn classify_shot(
    spec: &NonlinearitySpec,
    mu: f64,
    w0: f64,
    grid: &RadialGrid,
    options: &ShootingOptions,
) -> Result<Shot> {
    if !(w0 > 0.0 && mu > 0.0) {
        return Err(Error::Domain(format!("need w0 > 0 and μ > 0, got w0 = {w0}, μ = {mu}")));
    }
    let s = Shooter::new(spec, mu);
    Ok(s.clamped(w0, grid, 0, [w0, 0.0], options.rtol, Mode::Classify(options.converged_fraction))?.shot)
}

/// Smallest sampled `s` with `G(s) > μs²/2`.
fn well_exit(spec: &NonlinearitySpec, mu: f64) -> Option<f64> {
    Sampling { per_decade: 50, ..Sampling::default() }
        .points()
        .into_iter()
        .find(|&s| spec.cap_g(s) - 0.5 * mu * s * s > 0.0)
}

pub fn solve_ground_state(spec: &NonlinearitySpec, mu: f64, options: &ShootingOptions) -> Result<GroundStateSolution> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::Domain(format!("μ must be positive, got {mu}")));
    }
    let sh = Shooter::new(spec, mu);
    const COARSE: f64 = 1e-10;
    let decide = |w: f64| sh.free(w, COARSE, Mode::Decide, None);

    let mut lower =
        well_exit(spec, mu).ok_or_else(|| Error::NoBracket(format!("G(s) ≤ μs²/2 on every sampled s (μ = {mu})")))?;
    let mut tries = 0;
    while decide(lower)?.shot != Shot::Undershoot {
        lower *= 0.5;
        tries += 1;
        if tries > 60 {
            return Err(Error::NoBracket("no undershooting height found".into()));
        }
    }
    let mut upper = 2.0 * lower;
    loop {
        if upper > options.height_cap {
            return Err(Error::NoBracket(format!("no overshoot below w0 = {} (μ = {mu})", options.height_cap)));
        }
        if decide(upper)?.shot == Shot::Overshoot {
            break;
        }
        upper *= 2.0;
    }

    // coarse scan for every sign change of the classifier
    let n = options.scan_points.max(2);
    let heights: Vec<f64> = (0..=n).map(|i| lower * (upper / lower).powf(i as f64 / n as f64)).collect();
    let shots: Vec<Shot> = heights.par_iter().map(|&w| decide(w).map(|t| t.shot)).collect::<Result<_>>()?;
    let brackets: Vec<[f64; 2]> = heights
        .windows(2)
        .zip(shots.windows(2))
        .filter(|(_, s)| s[0] == Shot::Undershoot && s[1] != Shot::Undershoot)
        .map(|(h, _)| [h[0], h[1]])
        .collect();
    let [mut lo, mut hi] =
        *brackets.first().ok_or_else(|| Error::NoBracket("height scan found no transition".into()))?;

    while (hi - lo) > COARSE * hi {
        let mid = 0.5 * (lo + hi);
        match decide(mid)?.shot {
            Shot::Undershoot => lo = mid,
            _ => hi = mid,
        }
    }
    let lo_run = decide(lo)?;
    let hi_run = decide(hi)?;
    let w0 = 0.5 * (lo + hi);
    let kappa = sh.kappa();
    let r_event = lo_run.event_radius.min(hi_run.event_radius);
    let r_half = lo_run.half_radius.or(hi_run.half_radius).unwrap_or(1.0 / kappa);
    let r_max = r_event + 25.0 / kappa;
    let wanted = (r_max * options.nodes_per_half_width / r_half).ceil() as usize;
    let k = (wanted.max(options.min_intervals) + 1) & !1;
    if k > options.max_intervals {
        return Err(Error::Resolution(format!(
            "profile needs {k} intervals (cap {}): R_max = {r_max:.3}, half-width {r_half:.3e}",
            options.max_intervals
        )));
    }
    let grid = Arc::new(RadialGrid::uniform(spec.dim(), r_max, k)?);

    // fine pass: bisect the height on the grid, then keep re-bisecting the
    // slope wherever the two bracketing shots separate, until the profile is
    // small enough for the linear tail
    let nodes = grid.nodes();
    let last = grid.len() - 1;
    let height = |w: f64| sh.clamped(w, &grid, 0, [w, 0.0], options.rtol, Mode::Decide);
    let ((lo, lo_t), (hi, hi_t)) = establish(&height, w0 * (1.0 - 1e-7), w0 * (1.0 + 1e-7), 1e-7 * w0)?;
    let (lo, mut under, hi, mut over) = bisect(height, (lo, lo_t), (hi, hi_t))?;
    let w0 = 0.5 * (lo + hi);
    let mut profile_nodes: Vec<State> = Vec::with_capacity(grid.len());
    let mut start = 0;
    let mut stages = 0;
    let cut = loop {
        let len = under.nodes.len().min(over.nodes.len());
        let mut c = 0;
        for i in 1..len {
            let (a, b) = (under.nodes[i], over.nodes[i]);
            let w = 0.5 * (a[0] + b[0]);
            if (a[0] - b[0]).abs() > 1e-6 * w || w <= 0.0 || a[1] >= 0.0 || b[1] >= 0.0 {
                break;
            }
            c = i;
        }
        let from = if start == 0 { 0 } else { 1 };
        for i in from..=c {
            let (a, b) = (under.nodes[i], over.nodes[i]);
            profile_nodes.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
        }
        let cut = start + c;
        let [w_c, _] = *profile_nodes.last().unwrap();
        let linear = spec.g(w_c).abs() <= 1e-6 * mu * w_c;
        if cut == last || linear || w_c <= 1e-13 * w0 {
            break cut;
        }
        stages += 1;
        if c == 0 || stages > 64 {
            return Err(Error::Resolution(format!("shots separate at r = {:.3e} and cannot be continued", nodes[cut])));
        }
        start = cut;
        let (su, so) = (under.nodes[c][1], over.nodes[c][1]);
        let slope = |s: f64| sh.clamped(w_c, &grid, start, [w_c, s], options.rtol, Mode::Decide);
        let (u, o) = establish(&slope, su, so, 1e-12 * su.abs())?;
        let (_, ut, _, ot) = bisect(slope, u, o)?;
        under = ut;
        over = ot;
    };
    let r_cut = nodes[cut];
    let w_cut = profile_nodes[cut][0];
    let tail = TailModel { amplitude: 1.0, rate: kappa }
        .refit(r_cut, spec.dim(), w_cut)
        .ok_or_else(|| Error::Resolution("tail fit failed".into()))?;
    let mut values = Vec::with_capacity(grid.len());
    let mut slopes = Vec::with_capacity(grid.len());
    for (i, &r) in nodes.iter().enumerate() {
        if i <= cut {
            values.push(profile_nodes[i][0]);
            slopes.push(profile_nodes[i][1]);
        } else {
            values.push(tail.eval(r, spec.dim()));
            slopes.push(tail.derivative(r, spec.dim()));
        }
    }
    if values.windows(2).any(|v| !(v[1] < v[0]) || v[1] <= 0.0) {
        return Err(Error::Resolution("profile is not positive and decreasing".into()));
    }
    let profile = RadialFunction::new(grid.clone(), values)?.with_derivative(slopes)?.with_tail(tail)?;
    let diagnostics = Diagnostics {
        nehari_residual: 0.0,
        pohozaev_residual: 0.0,
        boundary_value: *profile.values().last().unwrap(),
        bisection_width: (hi - lo) / w0,
        cut_radius: r_cut,
        multiple_brackets: brackets.len() > 1,
        brackets,
    };
    let mut sol = GroundStateSolution { spec: spec.clone(), mu, w0, profile, diagnostics };
    let (nehari, pohozaev) = residuals(&sol)?;
    sol.diagnostics.nehari_residual = nehari;
    sol.diagnostics.pohozaev_residual = pohozaev;
    Ok(sol)
}

/// `ω₁`, the ground state of `−Δω + ω = |ω|^{p−1}ω` in dimension `dim`; solved once per process.
pub fn critical_ground_state(dim: usize) -> Result<Arc<GroundStateSolution>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GroundStateSolution>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(sol) = cache.lock().unwrap().get(&dim) {
        return Ok(sol.clone());
    }
    let sol = Arc::new(solve_ground_state(&NonlinearitySpec::critical(dim)?, 1.0, &ShootingOptions::default())?);
    cache.lock().unwrap().insert(dim, sol.clone());
    Ok(sol)
}

/// The critical mass `m₁ = ½‖ω₁‖₂²`.
pub fn critical_mass(dim: usize) -> Result<f64> {
    critical_ground_state(dim)?.mass()
}

fn residuals(sol: &GroundStateSolution) -> Result<(f64, f64)> {
    let w = &sol.profile;
    let n = sol.spec.dim() as f64;
    let grad = w.grad_norm_sq()?;
    let l2 = 2.0 * w.mass()?;
    let gw = w.integrate(|u| sol.spec.g(u) * u)?;
    let big_g = w.integrate(|u| sol.spec.cap_g(u))?;
    let scale = sol.mu * l2;
    let nehari = (grad + sol.mu * l2 - gw).abs() / scale;
    let pohozaev = (0.5 * (n - 2.0) * grad + n * (0.5 * sol.mu * l2 - big_g)).abs() / scale;
    Ok((nehari, pohozaev))
}
