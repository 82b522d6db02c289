//! The nonlinearity `g(s) = |s|^{p−1}s + h(s)`, its primitives, the ratio
//! `ρ(s) = H(s)/(s²/2)` and sampled checkers for the structural hypotheses.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::quad;

/// Every hypothesis report carries this label: sampling is evidence, not proof.
pub const EVIDENCE: &str = "numerical evidence";

/// Which pointwise quantity [`NonlinearitySpec::eval`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Which {
    #[serde(rename = "g")]
    SmallG,
    #[serde(rename = "G")]
    BigG,
    #[serde(rename = "h")]
    SmallH,
    #[serde(rename = "H")]
    BigH,
    #[serde(rename = "rho")]
    Rho,
}

/// The perturbation `h` on `s ≥ 0`; odd extension is implied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Perturbation {
    /// `h(s) = −θ s^q`, `1 < q < p`.
    Soave { theta: f64, q: f64 },
    /// `h(s) = c s^a / (1 + s^{a−b})`, `a > p`, `0 < b < 1`.
    Saturated { c: f64, a: f64, b: f64 },
    /// Sample points `[s, h(s)]` starting at `[0, 0]`, monotone cubic in between.
    Tabulated { points: Vec<[f64; 2]> },
    /// `h(s) = α s³/(1 + s²)`, so `h(s)/s → α` and `ρ → α`.
    LinearDrift { alpha: f64 },
    /// `h(s) = −k s² e^{−s}`.
    ExpQuadratic { k: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Family {
    PurePower { q: f64 },
    CriticalPerturbed { h: Perturbation },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum FamilyTag {
    PurePower,
    CriticalPerturbed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    #[serde(rename = "N")]
    n: usize,
    family: FamilyTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    h: Option<Perturbation>,
}

/// A validated nonlinearity in dimension `N`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct NonlinearitySpec {
    dim: usize,
    family: Family,
    table: Option<Arc<MonotoneCubic>>,
}

impl PartialEq for NonlinearitySpec {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.family == other.family
    }
}

impl TryFrom<RawSpec> for NonlinearitySpec {
    type Error = Error;
    fn try_from(raw: RawSpec) -> Result<Self> {
        match (raw.family, raw.q, raw.h) {
            (FamilyTag::PurePower, Some(q), None) => Self::pure_power(raw.n, q),
            (FamilyTag::PurePower, None, None) => Self::critical(raw.n),
            (FamilyTag::CriticalPerturbed, None, Some(h)) => Self::perturbed(raw.n, h),
            (FamilyTag::PurePower, _, Some(_)) => Err(Error::Config("pure_power takes `q`, not `h`".into())),
            (FamilyTag::CriticalPerturbed, _, None) => Err(Error::Config("critical_perturbed needs `h`".into())),
            (FamilyTag::CriticalPerturbed, Some(_), Some(_)) => {
                Err(Error::Config("critical_perturbed fixes the power at p; drop `q`".into()))
            }
        }
    }
}

impl From<NonlinearitySpec> for RawSpec {
    fn from(s: NonlinearitySpec) -> Self {
        match s.family {
            Family::PurePower { q } => RawSpec { n: s.dim, family: FamilyTag::PurePower, q: Some(q), h: None },
            Family::CriticalPerturbed { h } => {
                RawSpec { n: s.dim, family: FamilyTag::CriticalPerturbed, q: None, h: Some(h) }
            }
        }
    }
}

/// `p = 1 + 4/N`.
pub fn critical_exponent(dim: usize) -> f64 {
    1.0 + 4.0 / dim as f64
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::Config(format!("N must be at least 2, got {dim}")));
    }
    Ok(())
}

fn saturated_primitive(c: f64, a: f64, b: f64, s: f64) -> f64 {
    let f = move |t: f64| c * t.powf(a) / (1.0 + t.powf(a - b));
    const RTOL: f64 = 1e-13;
    if s <= 1.0 {
        return quad::integrate(f, 0.0, s, RTOL, 0.0);
    }
    quad::integrate(f, 0.0, 1.0, RTOL, 0.0)
        + quad::integrate(
            |x: f64| {
                let t = x.exp();
                f(t) * t
            },
            0.0,
            s.ln(),
            RTOL,
            0.0,
        )
}

/// Five-point Gauss–Legendre; exact to ~(Δ/a)¹⁰ on short gaps away from 0.
fn gauss5(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const X: [f64; 3] = [0.0, 0.538_469_310_105_683_1, 0.906_179_845_938_664];
    const W: [f64; 3] = [0.568_888_888_888_888_9, 0.478_628_670_499_366_5, 0.236_926_885_056_189_08];
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    h * (W[0] * f(c) + W[1] * (f(c - h * X[1]) + f(c + h * X[1])) + W[2] * (f(c - h * X[2]) + f(c + h * X[2])))
}

impl NonlinearitySpec {
    pub fn pure_power(dim: usize, q: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(q.is_finite() && q > 1.0) {
            return Err(Error::Config(format!("pure power needs q > 1, got {q}")));
        }
        Ok(Self { dim, family: Family::PurePower { q }, table: None })
    }

    /// `g(s) = |s|^{p−1}s` with `p = 1 + 4/N`.
    pub fn critical(dim: usize) -> Result<Self> {
        Self::pure_power(dim, critical_exponent(dim))
    }

    pub fn perturbed(dim: usize, h: Perturbation) -> Result<Self> {
        check_dim(dim)?;
        let p = critical_exponent(dim);
        let bad = |m: String| Err(Error::Config(m));
        let mut table = None;
        match &h {
            Perturbation::Soave { theta, q } => {
                if !(*theta > 0.0 && theta.is_finite()) || !(*q > 1.0 && *q < p) {
                    return bad(format!("soave needs θ > 0 and 1 < q < p = {p}"));
                }
            }
            Perturbation::Saturated { c, a, b } => {
                if !(*c > 0.0 && c.is_finite()) || !(*a > p && a.is_finite()) || !(*b > 0.0 && *b < 1.0) {
                    return bad(format!("saturated needs c > 0, a > p = {p}, 0 < b < 1"));
                }
            }
            Perturbation::Tabulated { points } => {
                if points.len() < 2 || points[0] != [0.0, 0.0] {
                    return bad("tabulated h needs at least two points starting at [0, 0]".into());
                }
                let xs = points.iter().map(|p| p[0]).collect();
                let ys = points.iter().map(|p| p[1]).collect();
                table = Some(Arc::new(MonotoneCubic::new(xs, ys).map_err(|e| Error::Config(e.to_string()))?));
            }
            Perturbation::LinearDrift { alpha } => {
                if !alpha.is_finite() {
                    return bad("linear_drift needs a finite α".into());
                }
            }
            Perturbation::ExpQuadratic { k } => {
                if !k.is_finite() {
                    return bad("exp_quadratic needs a finite k".into());
                }
            }
        }
        Ok(Self { dim, family: Family::CriticalPerturbed { h }, table })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn family(&self) -> &Family {
        &self.family
    }
    /// The L²-critical exponent `p = 1 + 4/N`.
    pub fn p(&self) -> f64 {
        critical_exponent(self.dim)
    }
    /// The power of a pure family, or the perturbation power of a Soave family.
    pub fn q(&self) -> Option<f64> {
        match &self.family {
            Family::PurePower { q } => Some(*q),
            Family::CriticalPerturbed { h: Perturbation::Soave { q, .. } } => Some(*q),
            _ => None,
        }
    }
    /// True for `g(s) = |s|^{p−1}s` exactly.
    pub fn is_pure_critical(&self) -> bool {
        matches!(self.family, Family::PurePower { q } if q == self.p())
    }

    fn h_pos(&self, s: f64) -> f64 {
        match &self.family {
            Family::PurePower { .. } => 0.0,
            Family::CriticalPerturbed { h } => match h {
                Perturbation::Soave { theta, q } => -theta * s.powf(*q),
                Perturbation::Saturated { c, a, b } => c * s.powf(*a) / (1.0 + s.powf(a - b)),
                Perturbation::Tabulated { .. } => self.table.as_ref().and_then(|t| t.eval(s)).unwrap_or(f64::NAN),
                Perturbation::LinearDrift { alpha } => alpha * s * s * s / (1.0 + s * s),
                Perturbation::ExpQuadratic { k } => -k * s * s * (-s).exp(),
            },
        }
    }

    fn cap_h_pos(&self, s: f64) -> f64 {
        match &self.family {
            Family::PurePower { .. } => 0.0,
            Family::CriticalPerturbed { h } => match h {
                Perturbation::Soave { theta, q } => -theta * s.powf(q + 1.0) / (q + 1.0),
                Perturbation::Saturated { c, a, b } => saturated_primitive(*c, *a, *b, s),
                Perturbation::Tabulated { .. } => self.table.as_ref().and_then(|t| t.integral(s)).unwrap_or(f64::NAN),
                Perturbation::LinearDrift { alpha } => {
                    let s2 = s * s;
                    alpha * 0.5 * (s2 - s2.ln_1p())
                }
                Perturbation::ExpQuadratic { k } => {
                    // −k(2 − e^{−s}(s² + 2s + 2)), written to avoid cancellation for small s
                    if s < 0.05 {
                        let mut term = s * s * s / 3.0;
                        let mut sum = 0.0;
                        for n in 0..12 {
                            sum += term;
                            term *= -s * (n as f64 + 3.0) / ((n as f64 + 1.0) * (n as f64 + 4.0));
                        }
                        -k * sum
                    } else {
                        -k * (2.0 - (-s).exp() * (s * s + 2.0 * s + 2.0))
                    }
                }
            },
        }
    }

    /// `g(s)`; NaN outside a tabulated range (quadrature turns that into an error).
    pub fn g(&self, s: f64) -> f64 {
        let a = s.abs();
        let core = match &self.family {
            Family::PurePower { q } => a.powf(*q),
            Family::CriticalPerturbed { .. } => a.powf(self.p()) + self.h_pos(a),
        };
        if s < 0.0 {
            -core
        } else {
            core
        }
    }

    /// `G(s) = ∫₀ˢ g`.
    pub fn cap_g(&self, s: f64) -> f64 {
        let a = s.abs();
        match &self.family {
            Family::PurePower { q } => a.powf(q + 1.0) / (q + 1.0),
            Family::CriticalPerturbed { .. } => {
                let p = self.p();
                a.powf(p + 1.0) / (p + 1.0) + self.cap_h_pos(a)
            }
        }
    }

    /// `G` at many points. Quadrature-backed primitives are accumulated
    /// over the sorted arguments, one short integral per gap.
    pub fn cap_g_batch(&self, values: &[f64]) -> Vec<f64> {
        let Family::CriticalPerturbed { h: Perturbation::Saturated { c, a, b } } = &self.family else {
            return values.iter().map(|&v| self.cap_g(v)).collect();
        };
        let (c, a, b) = (*c, *a, *b);
        let f = move |t: f64| c * t.powf(a) / (1.0 + t.powf(a - b));
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&i, &j| values[i].abs().total_cmp(&values[j].abs()));
        let p = self.p();
        let mut out = vec![0.0; values.len()];
        let (mut at, mut acc) = (0.0, 0.0);
        for i in order {
            let s = values[i].abs();
            if s > at {
                acc += if at > 0.0 && s - at <= 0.02 * at {
                    gauss5(&f, at, s)
                } else if at > 0.0 && s - at <= 0.25 * at {
                    quad::integrate(f, at, s, 1e-13, 0.0)
                } else {
                    saturated_primitive(c, a, b, s) - saturated_primitive(c, a, b, at)
                };
                at = s;
            }
            out[i] = s.powf(p + 1.0) / (p + 1.0) + acc;
        }
        out
    }

    pub fn h(&self, s: f64) -> f64 {
        let v = self.h_pos(s.abs());
        if s < 0.0 {
            -v
        } else {
            v
        }
    }

    pub fn cap_h(&self, s: f64) -> f64 {
        self.cap_h_pos(s.abs())
    }

    /// `g(s) − |s|^{p−1}s`; differs from `h` only for pure powers with `q ≠ p`.
    pub fn effective_h(&self, s: f64) -> f64 {
        let p = self.p();
        self.g(s) - s.abs().powf(p).copysign(s)
    }

    /// `G(s) − |s|^{p+1}/(p+1)`.
    pub fn effective_cap_h(&self, s: f64) -> f64 {
        let p = self.p();
        self.cap_g(s) - s.abs().powf(p + 1.0) / (p + 1.0)
    }

    pub fn rho(&self, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Err(Error::Domain("ρ is undefined at 0; use classify_alpha or a limit".into()));
        }
        Ok(self.cap_h(s) / (0.5 * s * s))
    }

    /// Checked pointwise evaluation.
    pub fn eval(&self, which: Which, s: f64) -> Result<f64> {
        if !s.is_finite() {
            return Err(Error::Domain(format!("non-finite argument {s}")));
        }
        let v = match which {
            Which::SmallG => self.g(s),
            Which::BigG => self.cap_g(s),
            Which::SmallH => self.h(s),
            Which::BigH => self.cap_h(s),
            Which::Rho => self.rho(s)?,
        };
        if v.is_nan() {
            return Err(Error::HypothesisViolation(format!("s = {s} lies outside the tabulated range")));
        }
        Ok(v)
    }

    fn sample_range(&self, opts: &Sampling) -> Vec<f64> {
        let upper = self.table.as_ref().map(|t| t.range().1).unwrap_or(f64::INFINITY);
        opts.points().into_iter().filter(|&s| s <= upper).collect()
    }
}

/// Log-spaced sampling of `s ∈ [10^{min_exp}, 10^{max_exp}]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sampling {
    pub min_exp: i32,
    pub max_exp: i32,
    pub per_decade: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Self { min_exp: -8, max_exp: 8, per_decade: 400 }
    }
}

impl Sampling {
    pub fn points(&self) -> Vec<f64> {
        let n = (self.max_exp - self.min_exp) as usize * self.per_decade;
        (0..=n).map(|i| 10f64.powf(self.min_exp as f64 + i as f64 / self.per_decade as f64)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
    fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }
}

/// Largest sampled value of a ratio within one decade `[10^k, 10^{k+1})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecadeRow {
    pub decade: i32,
    pub value: f64,
}

/// A sampled limit at one end of `(0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndVerdict {
    pub end: String,
    pub verdict: Verdict,
    pub decades: Vec<DecadeRow>,
}

/// Upper end `s₀` of the strict-positivity interval `(0, s₀]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    Finite(f64),
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub name: String,
    pub verdict: Verdict,
    pub label: String,
    pub min_value: Option<f64>,
    pub min_location: Option<f64>,
    pub ends: Vec<EndVerdict>,
    pub s0: Option<Threshold>,
    pub sign_change: Option<f64>,
    pub sampling: Sampling,
}

impl HypothesisReport {
    fn new(name: &str, verdict: Verdict, sampling: Sampling) -> Self {
        Self {
            name: name.into(),
            verdict,
            label: EVIDENCE.into(),
            min_value: None,
            min_location: None,
            ends: Vec::new(),
            s0: None,
            sign_change: None,
            sampling,
        }
    }
}

/// `lim_{s→∞} ρ(s)` classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum AlphaClass {
    Finite(f64),
    Zero,
    NegInfinity,
    PosInfinity,
}

fn decade_table(samples: &[f64], ratio: impl Fn(f64) -> f64) -> Vec<DecadeRow> {
    let mut rows: Vec<DecadeRow> = Vec::new();
    for &s in samples {
        let k = s.log10().floor() as i32;
        let v = ratio(s);
        match rows.last_mut() {
            Some(row) if row.decade == k => {
                if v.is_nan() || v > row.value {
                    row.value = v;
                }
            }
            _ => rows.push(DecadeRow { decade: k, value: v }),
        }
    }
    // the final sample opens a decade of its own; fold it back
    if rows.len() >= 2 && samples.last().map(|s| s.log10().fract() == 0.0).unwrap_or(false) {
        let last = rows.pop().unwrap();
        let prev = rows.last_mut().unwrap();
        prev.value = prev.value.max(last.value);
    }
    rows
}

/// Three consecutive decades whose maxima shrink toward the end (listed inner → outer).
fn shrinks_toward_end(rows: &[DecadeRow]) -> Verdict {
    if rows.len() < 3 {
        return Verdict::Inconclusive;
    }
    if rows.iter().any(|r| !r.value.is_finite()) {
        return Verdict::Fail;
    }
    if rows.iter().all(|r| r.value == 0.0) {
        return Verdict::Pass;
    }
    if rows.windows(2).all(|w| w[1].value < w[0].value) {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn end_verdicts(name: &str, rows: &[DecadeRow]) -> (EndVerdict, EndVerdict) {
    let n = rows.len();
    let low: Vec<DecadeRow> = rows.iter().take(3.min(n)).rev().copied().collect();
    let high: Vec<DecadeRow> = rows.iter().skip(n.saturating_sub(3)).copied().collect();
    (
        EndVerdict { end: format!("{name}: s→0"), verdict: shrinks_toward_end(&low), decades: rows.to_vec() },
        EndVerdict { end: format!("{name}: s→∞"), verdict: shrinks_toward_end(&high), decades: Vec::new() },
    )
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd)
}

impl NonlinearitySpec {
    /// `(g1)`: `h(s)/|s|^{p−1}s → 0` at 0 and `h(s)/s → 0` at ∞.
    pub fn check_g1(&self, opts: &Sampling) -> HypothesisReport {
        let samples = self.sample_range(opts);
        let p = self.p();
        let zero = decade_table(&samples, |s| (self.h_pos(s) / s.powf(p)).abs());
        let inf = decade_table(&samples, |s| (self.h_pos(s) / s).abs());
        let (mut at0, _) = end_verdicts("h/s^p", &zero);
        let (_, mut at_inf) = end_verdicts("h/s", &inf);
        at0.decades = zero;
        at_inf.decades = inf;
        let mut r = HypothesisReport::new("(g1)", at0.verdict.and(at_inf.verdict), *opts);
        r.ends = vec![at0, at_inf];
        r
    }

    /// `(1.18)`: `ρ(s) = o(|s|^{p−1})` as `s → 0`.
    pub fn check_rho_small(&self, opts: &Sampling) -> HypothesisReport {
        let samples = self.sample_range(opts);
        let p = self.p();
        let rows = decade_table(&samples, |s| (self.cap_h_pos(s) / (0.5 * s * s) / s.powf(p - 1.0)).abs());
        let (mut at0, _) = end_verdicts("ρ/s^{p−1}", &rows);
        at0.decades = rows;
        let mut r = HypothesisReport::new("(1.18)", at0.verdict, *opts);
        r.ends = vec![at0];
        r
    }

    /// Minimum of `expr/scale` over the samples, with the location and the raw value there.
    fn sampled_min(&self, samples: &[f64], expr: impl Fn(f64) -> (f64, f64)) -> (f64, f64, f64, Vec<(f64, f64)>) {
        let mut best = (f64::INFINITY, f64::NAN, f64::NAN);
        let mut normalized = Vec::with_capacity(samples.len());
        for &s in samples {
            let (v, scale) = expr(s);
            let n = if scale > 0.0 { v / scale } else { v };
            normalized.push((s, n));
            if n.is_nan() || n < best.0 {
                best = (n, s, v);
            }
        }
        (best.0, best.1, best.2, normalized)
    }

    fn locate_sign_change(&self, normalized: &[(f64, f64)], expr: impl Fn(f64) -> f64) -> Option<f64> {
        let k = normalized.windows(2).position(|w| (w[0].1 >= 0.0) != (w[1].1 >= 0.0))?;
        let (mut a, mut b) = (normalized[k].0, normalized[k + 1].0);
        let sa = expr(a) >= 0.0;
        for _ in 0..100 {
            let m = (a * b).sqrt();
            if (expr(m) >= 0.0) == sa {
                a = m;
            } else {
                b = m;
            }
        }
        Some((a * b).sqrt())
    }

    /// `(g3)`: `NG(s) − ((N−2)/2) g(s)s ≥ 0`.
    pub fn check_g3(&self, opts: &Sampling) -> HypothesisReport {
        let n = self.dim as f64;
        let samples = self.sample_range(opts);
        let expr = |s: f64| n * self.cap_g(s) - 0.5 * (n - 2.0) * self.g(s) * s;
        let (min_n, at, raw, normalized) = self
            .sampled_min(&samples, |s| (expr(s), n * self.cap_g(s).abs() + 0.5 * (n - 2.0) * (self.g(s) * s).abs()));
        let verdict = if min_n.is_nan() {
            Verdict::Inconclusive
        } else if min_n >= -1e-12 {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        let mut r = HypothesisReport::new("(g3)", verdict, *opts);
        r.min_value = Some(raw);
        r.min_location = Some(at);
        if verdict == Verdict::Fail {
            r.sign_change = self.locate_sign_change(&normalized, expr);
        }
        r
    }

    /// `(ρ1)` in the form `2H(s) − h(s)s ≥ 0`, strictly on some `(0, s₀]`.
    pub fn check_rho1(&self, opts: &Sampling) -> HypothesisReport {
        let samples = self.sample_range(opts);
        let expr = |s: f64| 2.0 * self.cap_h_pos(s) - self.h_pos(s) * s;
        let (min_n, at, raw, normalized) = self.sampled_min(&samples, |s| {
            let scale = 2.0 * self.cap_h_pos(s).abs() + (self.h_pos(s) * s).abs();
            (expr(s), scale)
        });
        const STRICT: f64 = 1e-12;
        let run = normalized.iter().take_while(|(_, v)| *v > STRICT).count();
        let s0 = match run {
            0 => None,
            k if k == normalized.len() => Some(Threshold::Unbounded),
            k => Some(Threshold::Finite(normalized[k - 1].0)),
        };
        let verdict = if min_n.is_nan() {
            Verdict::Inconclusive
        } else if min_n >= -STRICT && s0.is_some() {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        let mut r = HypothesisReport::new("(ρ1)", verdict, *opts);
        r.min_value = Some(raw);
        r.min_location = Some(at);
        r.s0 = s0;
        if min_n < -STRICT {
            r.sign_change = self.locate_sign_change(&normalized, expr);
        }
        r
    }

    /// `(g4)`: `N ∈ {3, 4}` and `g > 0` on the sampled half-line.
    pub fn check_g4(&self, opts: &Sampling) -> HypothesisReport {
        let samples = self.sample_range(opts);
        let (min_n, at, raw, _) = self.sampled_min(&samples, |s| (self.g(s), s.powf(self.p())));
        let verdict = if !(3..=4).contains(&self.dim) || !(min_n > 0.0) { Verdict::Fail } else { Verdict::Pass };
        let mut r = HypothesisReport::new("(g4)", verdict, *opts);
        r.min_value = Some(raw);
        r.min_location = Some(at);
        r
    }

    /// The hypothesis of the existence corollary: `h(s) ≥ 0` for `s ≥ 0`.
    pub fn check_cor15_bound(&self, opts: &Sampling) -> HypothesisReport {
        let samples = self.sample_range(opts);
        let (min_n, at, raw, _) = self.sampled_min(&samples, |s| (self.h_pos(s), s.powf(self.p())));
        let verdict = if min_n.is_nan() {
            Verdict::Inconclusive
        } else if min_n >= -1e-14 {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        let mut r = HypothesisReport::new("g ≥ |s|^{p−1}s", verdict, *opts);
        r.min_value = Some(raw);
        r.min_location = Some(at);
        r
    }

    /// `A` with `|h(s)| ≤ A|s|` and `|H(s)| ≤ As²`: 1.05 × the refined sampled supremum.
    pub fn estimate_a(&self, opts: &Sampling) -> Result<f64> {
        if matches!(self.family, Family::PurePower { .. }) {
            return Ok(0.0);
        }
        let ratio = |s: f64| (self.h_pos(s).abs() / s).max(self.cap_h_pos(s).abs() / (s * s));
        let samples = self.sample_range(opts);
        let rows = decade_table(&samples, ratio);
        if rows.iter().any(|r| !r.value.is_finite()) {
            return Err(Error::HypothesisViolation("h/s or H/s² is not finite on the sampled range".into()));
        }
        let grows = |end: &[DecadeRow]| {
            end.len() == 3 && end.windows(2).all(|w| w[1].value > w[0].value) && end[2].value > 1.01 * end[0].value
        };
        let n = rows.len();
        let top = &rows[n.saturating_sub(3)..];
        let bottom: Vec<DecadeRow> = rows.iter().take(3).rev().copied().collect();
        if grows(top) || grows(&bottom) {
            return Err(Error::HypothesisViolation(
                "h(s)/s is unbounded on the sampled decades; no growth constant A exists".into(),
            ));
        }
        let (i, best) =
            samples
                .iter()
                .map(|&s| ratio(s))
                .enumerate()
                .fold((0, 0.0), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        if best == 0.0 {
            return Ok(0.0);
        }
        let lo = samples[i.saturating_sub(1)].ln();
        let hi = samples[(i + 1).min(samples.len() - 1)].ln();
        let refined = golden_max(|x| ratio(x.exp()), lo, hi);
        Ok(1.05 * best.max(refined))
    }

    /// `α = lim_{s→∞} ρ(s)` from the last five decades, Aitken-accelerated.
    pub fn classify_alpha(&self, opts: &Sampling) -> Result<AlphaClass> {
        let top =
            self.table.as_ref().map(|t| t.range().1).unwrap_or(10f64.powi(opts.max_exp)).min(10f64.powi(opts.max_exp));
        let rho: Vec<f64> = (0..5)
            .map(|k| self.cap_h_pos(top * 10f64.powi(k - 4)) / (0.5 * (top * 10f64.powi(k - 4)).powi(2)))
            .collect();
        if rho.iter().any(|v| !v.is_finite()) {
            return Err(Error::Inconclusive("ρ is not finite on the sampled tail".into()));
        }
        let scale = rho.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return Ok(AlphaClass::Zero);
        }
        let d: Vec<f64> = rho.windows(2).map(|w| w[1] - w[0]).collect();
        if d.iter().all(|x| x.abs() <= 1e-14 * scale) {
            return Ok(if rho[4].abs() <= 1e-12 * scale { AlphaClass::Zero } else { AlphaClass::Finite(rho[4]) });
        }
        let same_sign = d.windows(2).all(|w| w[0] * w[1] > 0.0);
        if !same_sign {
            return Err(Error::Inconclusive("ρ oscillates over the sampled decades".into()));
        }
        let growing = d.windows(2).all(|w| w[1].abs() > w[0].abs());
        if growing {
            return Ok(if d[3] < 0.0 { AlphaClass::NegInfinity } else { AlphaClass::PosInfinity });
        }
        let (d1, d2) = (d[2], d[3]);
        let alpha = if (d2 - d1).abs() > 0.0 { rho[4] - d2 * d2 / (d2 - d1) } else { rho[4] };
        if alpha.abs() <= 1e-6 * scale {
            Ok(AlphaClass::Zero)
        } else {
            Ok(AlphaClass::Finite(alpha))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn soave() -> NonlinearitySpec {
        NonlinearitySpec::perturbed(2, Perturbation::Soave { theta: 0.5, q: 1.5 }).unwrap()
    }
    fn saturated() -> NonlinearitySpec {
        NonlinearitySpec::perturbed(2, Perturbation::Saturated { c: 1.0, a: 4.0, b: 0.5 }).unwrap()
    }
    fn exp_quadratic() -> NonlinearitySpec {
        NonlinearitySpec::perturbed(2, Perturbation::ExpQuadratic { k: 1.0 }).unwrap()
    }
    fn coarse() -> Sampling {
        Sampling { per_decade: 40, ..Sampling::default() }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let s = NonlinearitySpec::from_json(
            r#"{"N":2,"family":"critical_perturbed","h":{"kind":"soave","theta":0.5,"q":1.5}}"#,
        )
        .unwrap();
        assert_eq!(s, soave());
        assert_eq!(NonlinearitySpec::from_json(&s.to_json()).unwrap(), s);
        let pure = NonlinearitySpec::from_json(r#"{"N":3,"family":"pure_power","q":3}"#).unwrap();
        assert_eq!(pure.q(), Some(3.0));
        for bad in [
            r#"{"N":2,"family":"pure_power","q":3,"extra":1}"#,
            r#"{"N":2,"family":"critical_perturbed","h":{"kind":"soave","theta":0.5,"q":1.5,"z":0}}"#,
            r#"{"N":2,"family":"critical_perturbed","h":{"kind":"soave","theta":0.5,"q":3.5}}"#,
            r#"{"N":1,"family":"pure_power","q":3}"#,
            r#"{"N":2,"family":"critical_perturbed"}"#,
        ] {
            assert!(NonlinearitySpec::from_json(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn pure_power_primitives() {
        let s = NonlinearitySpec::pure_power(3, 2.5).unwrap();
        assert!((s.cap_g(1.7) - 1.7f64.powf(3.5) / 3.5).abs() < 1e-14);
        assert_eq!(s.cap_h(1.7), 0.0);
        assert_eq!(s.h(-0.3), 0.0);
    }

    #[test]
    fn soave_rho_closed_form() {
        let s = soave();
        for x in [0.1f64, 1.0, 7.0] {
            let expected = -2.0 * 0.5 / 2.5 * x.powf(0.5);
            assert!((s.rho(x).unwrap() - expected).abs() < 1e-14 * expected.abs());
        }
        assert!(matches!(s.rho(0.0), Err(Error::Domain(_))));
        assert!(matches!(s.eval(Which::Rho, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn saturated_primitive_matches_series_and_asymptotics() {
        let s = saturated();
        // small s: H ≈ s⁵/5 − s^{8.5}/8.5
        let x: f64 = 1e-2;
        let approx = x.powi(5) / 5.0 - x.powf(8.5) / 8.5;
        assert!((s.cap_h(x) - approx).abs() < 1e-12 * approx);
        // derivative of H is h
        for x in [0.3, 1.0, 2.5, 40.0, 1e4] {
            let d = 1e-6 * x;
            let fd = (s.cap_h(x + d) - s.cap_h(x - d)) / (2.0 * d);
            assert!((fd - s.h(x)).abs() < 1e-6 * s.h(x).abs(), "x={x}");
        }
    }

    #[test]
    fn batched_primitive_matches_pointwise() {
        let s = saturated();
        let xs: Vec<f64> =
            (0..4000).map(|i| 3.0 * (-(i as f64) / 400.0).exp() * if i % 7 == 0 { -1.0 } else { 1.0 }).collect();
        for (x, g) in xs.iter().zip(s.cap_g_batch(&xs)) {
            assert!((g - s.cap_g(*x)).abs() < 1e-12 * s.cap_g(*x).max(1e-300), "{x}");
        }
    }

    #[test]
    fn tabulated_refuses_extrapolation() {
        let pts: Vec<[f64; 2]> = (0..=20).map(|i| [i as f64 * 0.5, -(i as f64 * 0.5).powi(2) * 0.1]).collect();
        let s = NonlinearitySpec::perturbed(2, Perturbation::Tabulated { points: pts }).unwrap();
        assert!(s.eval(Which::SmallH, 3.0).is_ok());
        assert!(matches!(s.eval(Which::BigH, 11.0), Err(Error::HypothesisViolation(_))));
        let hh = s.eval(Which::BigH, 10.0).unwrap();
        assert!((hh + 0.1 * 1000.0 / 3.0).abs() < 1e-2);
    }

    #[test]
    fn growth_constant() {
        assert_eq!(NonlinearitySpec::critical(2).unwrap().estimate_a(&coarse()).unwrap(), 0.0);
        assert!(matches!(soave().estimate_a(&coarse()), Err(Error::HypothesisViolation(_))));
        let a = saturated().estimate_a(&Sampling::default()).unwrap();
        // oracle: brute-force maximum of h/s on a fine linear grid around the peak
        let s = saturated();
        let brute =
            (1..200000).map(|i| i as f64 * 1e-4).map(|x| (s.h(x) / x).max(s.cap_h(x) / (x * x))).fold(0.0, f64::max);
        assert!((a / 1.05 - brute).abs() < 1e-6 * brute);
    }

    #[test]
    fn g1_verdicts() {
        let pure = NonlinearitySpec::critical(2).unwrap().check_g1(&coarse());
        assert_eq!(pure.verdict, Verdict::Pass);
        let sat = saturated().check_g1(&coarse());
        assert_eq!(sat.verdict, Verdict::Pass);
        assert_eq!(sat.label, EVIDENCE);
        let so = soave().check_g1(&coarse());
        assert_eq!(so.ends[1].verdict, Verdict::Fail);
        assert_eq!(so.verdict, Verdict::Fail);
    }

    #[test]
    fn g3_verdicts() {
        assert_eq!(NonlinearitySpec::critical(3).unwrap().check_g3(&coarse()).verdict, Verdict::Pass);
        // N = 2 with G ≥ 0
        assert_eq!(saturated().check_g3(&coarse()).verdict, Verdict::Pass);
        let strong = NonlinearitySpec::perturbed(3, Perturbation::Soave { theta: 5.0, q: 1.5 }).unwrap();
        let r = strong.check_g3(&coarse());
        assert_eq!(r.verdict, Verdict::Fail);
        // sign change of 3G − ½gs: s^{p−q}·(3/(p+1) − ½) = θ(3/(q+1) − ½)
        let p = 7.0 / 3.0;
        let root = (5.0f64 * (3.0 / 2.5 - 0.5) / (3.0 / (p + 1.0) - 0.5)).powf(1.0 / (p - 1.5));
        assert!((r.sign_change.unwrap() - root).abs() < 1e-9 * root);
        assert!(r.min_location.unwrap() < root);
    }

    #[test]
    fn rho1_verdicts() {
        let so = soave().check_rho1(&coarse());
        assert_eq!(so.verdict, Verdict::Pass);
        assert_eq!(so.s0, Some(Threshold::Unbounded));
        let pure = NonlinearitySpec::critical(2).unwrap().check_rho1(&coarse());
        assert_eq!(pure.verdict, Verdict::Fail);
        assert_eq!(saturated().check_rho1(&coarse()).verdict, Verdict::Fail);
        // 2H − hs for h = −s²e^{−s}: ≈ s³/3 near 0, → −4 at ∞
        let eq = exp_quadratic().check_rho1(&coarse());
        assert_eq!(eq.verdict, Verdict::Fail);
        let change = eq.sign_change.unwrap();
        let f = |s: f64| -4.0 + 2.0 * (-s).exp() * (s * s + 2.0 * s + 2.0) + s.powi(3) * (-s).exp();
        assert!(f(change * 0.999) > 0.0 && f(change * 1.001) < 0.0);
        assert!(matches!(eq.s0, Some(Threshold::Finite(x)) if x < change));
    }

    #[test]
    fn rho_small_verdicts() {
        assert_eq!(NonlinearitySpec::critical(2).unwrap().check_rho_small(&coarse()).verdict, Verdict::Pass);
        assert_eq!(saturated().check_rho_small(&coarse()).verdict, Verdict::Pass);
        assert_eq!(soave().check_rho_small(&coarse()).verdict, Verdict::Fail);
    }

    #[test]
    fn alpha_classes() {
        let o = coarse();
        assert_eq!(NonlinearitySpec::critical(2).unwrap().classify_alpha(&o).unwrap(), AlphaClass::Zero);
        assert_eq!(soave().classify_alpha(&o).unwrap(), AlphaClass::NegInfinity);
        assert_eq!(saturated().classify_alpha(&o).unwrap(), AlphaClass::Zero);
        let drift = NonlinearitySpec::perturbed(2, Perturbation::LinearDrift { alpha: -1.0 }).unwrap();
        match drift.classify_alpha(&o).unwrap() {
            AlphaClass::Finite(a) => assert!((a + 1.0).abs() < 1e-9, "{a}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn g4_and_cor15() {
        let o = coarse();
        assert_eq!(NonlinearitySpec::critical(3).unwrap().check_g4(&o).verdict, Verdict::Pass);
        assert_eq!(NonlinearitySpec::critical(2).unwrap().check_g4(&o).verdict, Verdict::Fail);
        assert_eq!(NonlinearitySpec::critical(2).unwrap().check_cor15_bound(&o).verdict, Verdict::Pass);
        assert_eq!(saturated().check_cor15_bound(&o).verdict, Verdict::Pass);
        assert_eq!(soave().check_cor15_bound(&o).verdict, Verdict::Fail);
    }

    #[test]
    fn pure_power_g3_expression_is_algebraic() {
        for dim in [2usize, 3, 4] {
            let s = NonlinearitySpec::critical(dim).unwrap();
            let n = dim as f64;
            let p = s.p();
            for x in [1e-3, 0.5, 2.0, 30.0] {
                let lhs = n * s.cap_g(x) - 0.5 * (n - 2.0) * s.g(x) * x;
                let rhs = 2.0 / (n + 2.0) * x.powf(p + 1.0);
                assert!((lhs - rhs).abs() < 1e-13 * rhs);
            }
        }
    }

    fn families() -> Vec<NonlinearitySpec> {
        vec![
            NonlinearitySpec::critical(2).unwrap(),
            NonlinearitySpec::pure_power(3, 2.2).unwrap(),
            soave(),
            saturated(),
            exp_quadratic(),
            NonlinearitySpec::perturbed(3, Perturbation::LinearDrift { alpha: 0.7 }).unwrap(),
        ]
    }

    proptest! {
        #[test]
        fn g_is_odd_and_primitives_even(idx in 0usize..6, s in 1e-3f64..50.0) {
            let f = &families()[idx];
            prop_assert_eq!(f.g(-s), -f.g(s));
            prop_assert_eq!(f.cap_g(-s), f.cap_g(s));
            prop_assert_eq!(f.h(-s), -f.h(s));
        }

        #[test]
        fn primitive_derivatives(idx in 0usize..6, s in 1e-2f64..20.0) {
            let f = &families()[idx];
            let d = 1e-5 * s;
            let dg = (f.cap_g(s + d) - f.cap_g(s - d)) / (2.0 * d);
            prop_assert!((dg - f.g(s)).abs() <= 1e-6 * f.g(s).abs().max(1e-8));
            let dh = (f.cap_h(s + d) - f.cap_h(s - d)) / (2.0 * d);
            prop_assert!((dh - f.h(s)).abs() <= 1e-6 * f.h(s).abs().max(1e-8));
        }

        #[test]
        fn rho_derivative_identity(idx in 0usize..6, s in 5e-2f64..20.0) {
            // H − ½hs = −¼ρ′s³
            let f = &families()[idx];
            let d = 1e-4 * s;
            let drho = (f.rho(s + d).unwrap() - f.rho(s - d).unwrap()) / (2.0 * d);
            let lhs = f.cap_h(s) - 0.5 * f.h(s) * s;
            let rhs = -0.25 * drho * s * s * s;
            let scale = f.cap_h(s).abs() + (f.h(s) * s).abs();
            prop_assert!((lhs - rhs).abs() <= 1e-6 * scale.max(1e-12));
        }
    }
}
