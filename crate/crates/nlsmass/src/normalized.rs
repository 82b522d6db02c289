//! Prescribed-mass solutions: closed-form rescaling away from the critical
//! power, and at `p = 1 + 4/N` a sweep of the level curve
//! `b(λ) = a(e^λ) − e^λ m₁` with root-finding on the mass residual.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{critical_identity_from, psi_mu_from, CriticalIdentity, Moments};
use crate::grid::RadialFunction;
use crate::nonlinearity::{Family, HypothesisReport, NonlinearitySpec, Sampling, Verdict, EVIDENCE};
use crate::shooting::{solve_ground_state, GroundStateSolution, ShootingOptions};

pub use crate::functionals::{d_of_m_probe, DProbe, DTrend};

/// Runs `f` on a pool sized by `NLSMASS_THREADS` when set, else rayon's default.
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    match std::env::var("NLSMASS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

/// Closed-form `μ` and the rescaled profile for `q ≠ p`.
#[derive(Debug, Clone)]
pub struct PowerSolution {
    pub mu: f64,
    pub profile: RadialFunction,
    pub mass: f64,
    pub mass_residual: f64,
}

/// `μ = (m/ℳ(w_{q,1}))^{2(q−1)/(N(p−q))}` and `u = w_{q,μ}`.
pub fn solve_prescribed_mass_power(
    spec: &NonlinearitySpec,
    m: f64,
    options: &ShootingOptions,
) -> Result<PowerSolution> {
    let q = match spec.family() {
        Family::PurePower { q } => *q,
        _ => return Err(Error::NotApplicable("closed-form masses need a pure power".into())),
    };
    let n = spec.dim() as f64;
    let p = spec.p();
    if !(m > 0.0) {
        return Err(Error::Domain(format!("mass must be positive, got {m}")));
    }
    if (q - p).abs() < 1e-12 {
        return Err(Error::CriticalCase(
            "at q = p the mass does not depend on μ: only m = m₁ is attained; use the critical solver".into(),
        ));
    }
    if spec.dim() >= 3 && q >= (n + 2.0) / (n - 2.0) {
        return Err(Error::Domain(format!("q = {q} is not Sobolev-subcritical in N = {n}")));
    }
    let w1 = solve_ground_state(spec, 1.0, options)?;
    let m_one = w1.mass()?;
    let mu = (m / m_one).powf(2.0 * (q - 1.0) / (n * (p - q)));
    let profile = w1.profile.power_rescale(mu, q)?;
    let mass = profile.mass()?;
    Ok(PowerSolution { mu, profile, mass, mass_residual: (mass - m).abs() / m })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub lambda: f64,
    pub mu: f64,
    pub w0: Option<f64>,
    pub mass: Option<f64>,
    pub a_mu: Option<f64>,
    pub b_lambda: Option<f64>,
    pub nehari: Option<f64>,
    pub pohozaev: Option<f64>,
    pub identity: Option<CriticalIdentity>,
    /// Why the ground-state solve failed, when it did.
    pub error: Option<String>,
}

impl CurveSample {
    fn solve(
        spec: &NonlinearitySpec,
        m1: f64,
        lambda: f64,
        options: &ShootingOptions,
    ) -> (Self, Option<GroundStateSolution>) {
        let mu = lambda.exp();
        let mut s = CurveSample {
            lambda,
            mu,
            w0: None,
            mass: None,
            a_mu: None,
            b_lambda: None,
            nehari: None,
            pohozaev: None,
            identity: None,
            error: None,
        };
        let solved = solve_ground_state(spec, mu, options).and_then(|sol| {
            let m = Moments::of(&sol.profile, spec)?;
            Ok((sol, m))
        });
        match solved {
            Ok((sol, m)) => {
                let a = psi_mu_from(&m, mu);
                s.w0 = Some(sol.w0);
                s.mass = Some(0.5 * m.l2);
                s.a_mu = Some(a);
                s.b_lambda = Some(a - mu * m1);
                s.nehari = Some(sol.diagnostics.nehari_residual);
                s.pohozaev = Some(sol.diagnostics.pohozaev_residual);
                s.identity = Some(critical_identity_from(&m, spec.dim()));
                (s, Some(sol))
            }
            Err(e) => {
                s.error = Some(e.to_string());
                (s, None)
            }
        }
    }
}

/// Sampled `λ ↦ (M(v_μ), a(μ), b(λ))`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MassLevelCurve {
    pub spec: NonlinearitySpec,
    pub m1: f64,
    pub samples: Vec<CurveSample>,
}

#[derive(Serialize)]
struct CurveRow {
    lambda: f64,
    mu: f64,
    mass: Option<f64>,
    a_mu: Option<f64>,
    b_lambda: Option<f64>,
    nehari: Option<f64>,
    pohozaev: Option<f64>,
}

impl MassLevelCurve {
    fn solved(&self) -> impl Iterator<Item = &CurveSample> {
        self.samples.iter().filter(|s| s.b_lambda.is_some())
    }

    /// The estimate of `b̲ = inf_λ b(λ)` and where it is attained.
    pub fn b_min(&self) -> Option<(f64, f64)> {
        self.solved().map(|s| (s.lambda, s.b_lambda.unwrap())).min_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn max_abs_b(&self) -> f64 {
        self.solved().map(|s| s.b_lambda.unwrap().abs()).fold(0.0, f64::max)
    }

    /// Whether the sampled `a(μ)` increases strictly with `μ`.
    pub fn a_increasing(&self) -> bool {
        let a: Vec<f64> = self.solved().map(|s| s.a_mu.unwrap()).collect();
        a.windows(2).all(|w| w[1] > w[0])
    }

    pub fn failures(&self) -> usize {
        self.samples.len() - self.solved().count()
    }

    pub fn sample_at(&self, lambda: f64) -> Option<&CurveSample> {
        self.samples.iter().find(|s| (s.lambda - lambda).abs() < 1e-12)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for s in &self.samples {
            w.serialize(CurveRow {
                lambda: s.lambda,
                mu: s.mu,
                mass: s.mass,
                a_mu: s.a_mu,
                b_lambda: s.b_lambda,
                nehari: s.nehari,
                pohozaev: s.pohozaev,
            })?;
        }
        w.flush()?;
        Ok(())
    }
}

fn lambdas(range: (f64, f64), count: usize) -> Result<Vec<f64>> {
    if count < 2 || !(range.1 > range.0) {
        return Err(Error::Domain(format!("need count ≥ 2 and an increasing λ range, got {range:?}, {count}")));
    }
    Ok((0..count).map(|i| range.0 + (range.1 - range.0) * i as f64 / (count - 1) as f64).collect())
}

/// Ground states at `count` equally spaced `λ` in `range`; failed solves are recorded, not fatal.
pub fn sample_level_curve(
    spec: &NonlinearitySpec,
    m1: f64,
    range: (f64, f64),
    count: usize,
    options: &ShootingOptions,
) -> Result<MassLevelCurve> {
    let ls = lambdas(range, count)?;
    let samples = with_pool(|| ls.par_iter().map(|&l| CurveSample::solve(spec, m1, l, options).0).collect());
    Ok(MassLevelCurve { spec: spec.clone(), m1, samples })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NormalizedOptions {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub count: usize,
    /// Required `|M − m₁|/m₁` at a reported solution.
    pub mass_tol: f64,
    /// Required Nehari and Pohozaev residuals.
    pub residual_tol: f64,
    pub shooting: ShootingOptions,
}

impl Default for NormalizedOptions {
    fn default() -> Self {
        Self {
            lambda_min: -8.0,
            lambda_max: 8.0,
            count: 65,
            mass_tol: 1e-6,
            residual_tol: 1e-6,
            shooting: ShootingOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedSolution {
    pub lambda: f64,
    pub mu: f64,
    pub w0: f64,
    pub mass: f64,
    pub mass_residual: f64,
    /// `|∂_λI| = e^λ|½‖u‖₂² − m₁|`.
    pub d_lambda_i: f64,
    pub nehari: f64,
    pub pohozaev: f64,
    pub positive: bool,
    pub decreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSummary {
    pub count: usize,
    pub failures: usize,
    pub b_min: Option<f64>,
    pub b_min_lambda: Option<f64>,
    pub max_abs_b: f64,
    pub a_increasing: bool,
    pub mass_min: Option<f64>,
    pub mass_max: Option<f64>,
}

impl CurveSummary {
    pub fn of(curve: &MassLevelCurve) -> Self {
        let masses: Vec<f64> = curve.samples.iter().filter_map(|s| s.mass).collect();
        let b = curve.b_min();
        Self {
            count: curve.samples.len(),
            failures: curve.failures(),
            b_min: b.map(|x| x.1),
            b_min_lambda: b.map(|x| x.0),
            max_abs_b: curve.max_abs_b(),
            a_increasing: curve.a_increasing(),
            mass_min: masses.iter().copied().reduce(f64::min),
            mass_max: masses.iter().copied().reduce(f64::max),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExistenceReport {
    pub label: String,
    pub m1: f64,
    pub hypotheses: Vec<HypothesisReport>,
    pub curve: CurveSummary,
    pub solutions: Vec<NormalizedSolution>,
    pub found: bool,
    /// Every sample has mass `m₁`: the pure-power continuum.
    pub degenerate_continuum: bool,
    /// Closest sample when nothing was found: `(λ, M − m₁)`.
    pub closest: Option<(f64, f64)>,
    #[serde(skip)]
    pub profiles: Vec<RadialFunction>,
    #[serde(skip)]
    pub samples: Vec<CurveSample>,
}

fn accept(sol: &GroundStateSolution, m1: f64, options: &NormalizedOptions) -> Result<Option<NormalizedSolution>> {
    let mass = sol.mass()?;
    let residual = (mass - m1).abs() / m1;
    let v = sol.profile.values();
    let positive = v.iter().all(|&x| x > 0.0);
    let decreasing = v.windows(2).all(|w| w[1] < w[0]);
    let d = &sol.diagnostics;
    let ok = residual < options.mass_tol
        && d.nehari_residual < options.residual_tol
        && d.pohozaev_residual < options.residual_tol
        && positive
        && decreasing;
    Ok(ok.then(|| NormalizedSolution {
        lambda: sol.lambda(),
        mu: sol.mu,
        w0: sol.w0,
        mass,
        mass_residual: residual,
        d_lambda_i: sol.mu * (mass - m1).abs(),
        nehari: d.nehari_residual,
        pohozaev: d.pohozaev_residual,
        positive,
        decreasing,
    }))
}

/// Illinois regula falsi on `λ ↦ M(v_{e^λ}) − m₁` inside a sign-change bracket.
fn refine_root(
    spec: &NonlinearitySpec,
    m1: f64,
    (mut a, mut fa): (f64, f64),
    (mut b, mut fb): (f64, f64),
    options: &NormalizedOptions,
) -> Result<GroundStateSolution> {
    let mass_at = |l: f64| -> Result<(GroundStateSolution, f64)> {
        let sol = solve_ground_state(spec, l.exp(), &options.shooting)?;
        let f = sol.mass()? - m1;
        Ok((sol, f))
    };
    let mut side = 0;
    let mut best: Option<(GroundStateSolution, f64)> = None;
    for _ in 0..80 {
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c > a.min(b) && c < a.max(b) { c } else { 0.5 * (a + b) };
        let (sol, fc) = mass_at(c)?;
        let done = fc.abs() < 0.25 * options.mass_tol * m1 || (b - a).abs() < 1e-13;
        if best.as_ref().map(|(_, f)| fc.abs() < f.abs()).unwrap_or(true) {
            best = Some((sol, fc));
        }
        if done {
            break;
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Ok(best.expect("at least one iterate").0)
}

/// Samples the curve, checks the existence hypotheses and refines every mass crossing.
pub fn solve_normalized_critical(
    spec: &NonlinearitySpec,
    m1: f64,
    options: &NormalizedOptions,
) -> Result<ExistenceReport> {
    if !(m1 > 0.0) {
        return Err(Error::Domain("m₁ must be positive".into()));
    }
    let sampling = Sampling::default();
    let hypotheses = vec![
        spec.check_g1(&sampling),
        spec.check_g3(&sampling),
        spec.check_g4(&sampling),
        spec.check_cor15_bound(&sampling),
    ];
    let ls = lambdas((options.lambda_min, options.lambda_max), options.count)?;
    let solved: Vec<(CurveSample, Option<GroundStateSolution>)> =
        with_pool(|| ls.par_iter().map(|&l| CurveSample::solve(spec, m1, l, &options.shooting)).collect());
    let curve = MassLevelCurve { spec: spec.clone(), m1, samples: solved.iter().map(|s| s.0.clone()).collect() };
    let summary = CurveSummary::of(&curve);

    let residuals: Vec<(f64, f64, Option<&GroundStateSolution>)> =
        solved.iter().filter_map(|(s, sol)| s.mass.map(|m| (s.lambda, m - m1, sol.as_ref()))).collect();
    let degenerate = !residuals.is_empty()
        && residuals.len() == curve.samples.len()
        && residuals.iter().all(|r| r.1.abs() < options.mass_tol * m1);

    let mut sols = Vec::new();
    let mut profiles = Vec::new();
    if degenerate {
        let mid = residuals[residuals.len() / 2].2.unwrap();
        if let Some(s) = accept(mid, m1, options)? {
            sols.push(s);
            profiles.push(mid.profile.clone());
        }
    } else {
        let mut brackets = Vec::new();
        for (i, r) in residuals.iter().enumerate() {
            if r.1.abs() < 0.25 * options.mass_tol * m1 {
                brackets.push((i, None));
            } else if let Some(next) = residuals.get(i + 1) {
                if r.1 * next.1 < 0.0 && next.1.abs() >= 0.25 * options.mass_tol * m1 {
                    brackets.push((i, Some(i + 1)));
                }
            }
        }
        let found: Vec<Result<GroundStateSolution>> = with_pool(|| {
            brackets
                .par_iter()
                .map(|&(i, j)| match j {
                    None => Ok(residuals[i].2.unwrap().clone()),
                    Some(j) => refine_root(
                        spec,
                        m1,
                        (residuals[i].0, residuals[i].1),
                        (residuals[j].0, residuals[j].1),
                        options,
                    ),
                })
                .collect()
        });
        for sol in found {
            let sol = sol?;
            if let Some(s) = accept(&sol, m1, options)? {
                sols.push(s);
                profiles.push(sol.profile);
            }
        }
    }
    let closest = residuals.iter().min_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).map(|r| (r.0, r.1));
    Ok(ExistenceReport {
        label: EVIDENCE.into(),
        m1,
        hypotheses,
        curve: summary,
        found: !sols.is_empty(),
        solutions: sols,
        degenerate_continuum: degenerate,
        closest,
        profiles,
        samples: curve.samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionSample {
    pub lambda: f64,
    pub mass: f64,
    pub r1: f64,
    pub r2: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonexistenceCertificate {
    pub label: String,
    pub m1: f64,
    pub rho1: HypothesisReport,
    /// Reported but not required: the obstruction argument only uses `(ρ1)`.
    pub rho_small: HypothesisReport,
    pub samples: Vec<ObstructionSample>,
    pub failures: usize,
    pub all_r2_positive: bool,
    pub all_r1_nonnegative: bool,
    /// Largest `|r1 + r2| / ‖∇u‖₂²`; zero at exact solutions.
    pub max_identity_residual: f64,
    /// `M − m₁` keeps one sign and never comes within the solver tolerance of zero.
    pub mass_avoids_m1: bool,
    pub min_mass_gap: f64,
    pub issued: bool,
}

/// Sweeps ground states and records the obstruction `r1 + r2 = 0`, `r2 > 0` at each.
pub fn certify_nonexistence(
    spec: &NonlinearitySpec,
    m1: f64,
    options: &NormalizedOptions,
) -> Result<NonexistenceCertificate> {
    let sampling = Sampling::default();
    let rho1 = spec.check_rho1(&sampling);
    let rho_small = spec.check_rho_small(&sampling);
    if rho1.verdict != Verdict::Pass {
        return Err(Error::NotApplicable(format!(
            "(ρ1) is not satisfied on the samples (min of 2H − hs = {:?} at s = {:?})",
            rho1.min_value, rho1.min_location
        )));
    }
    let curve =
        sample_level_curve(spec, m1, (options.lambda_min, options.lambda_max), options.count, &options.shooting)?;
    let samples: Vec<ObstructionSample> = curve
        .samples
        .iter()
        .filter_map(|s| {
            let id = s.identity?;
            Some(ObstructionSample { lambda: s.lambda, mass: s.mass?, r1: id.r1, r2: id.r2, total: id.total })
        })
        .collect();
    if samples.is_empty() {
        return Err(Error::EmptyInput("no ground state could be computed on the λ range".into()));
    }
    let all_r2_positive = samples.iter().all(|s| s.r2 > 0.0);
    let all_r1_nonnegative = samples.iter().all(|s| s.r1 >= -1e-8 * s.mass);
    let max_identity_residual =
        samples.iter().map(|s| s.total.abs() / (s.r1.abs() + s.r2.abs()).max(f64::MIN_POSITIVE)).fold(0.0, f64::max);
    let gaps: Vec<f64> = samples.iter().map(|s| s.mass - m1).collect();
    let same_sign = gaps.iter().all(|g| *g > 0.0) || gaps.iter().all(|g| *g < 0.0);
    let min_mass_gap = gaps.iter().map(|g| g.abs()).fold(f64::INFINITY, f64::min);
    let mass_avoids_m1 = same_sign && min_mass_gap > options.mass_tol * m1;
    Ok(NonexistenceCertificate {
        label: EVIDENCE.into(),
        m1,
        issued: all_r2_positive && mass_avoids_m1,
        rho1,
        rho_small,
        failures: curve.failures(),
        samples,
        all_r2_positive,
        all_r1_nonnegative,
        max_identity_residual,
        mass_avoids_m1,
        min_mass_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlinearity::Perturbation;

    const M1: f64 = 5.850448262280896;

    #[test]
    fn closed_form_masses() {
        let s = NonlinearitySpec::pure_power(3, 3.0).unwrap();
        let o = ShootingOptions::default();
        let base = solve_ground_state(&s, 1.0, &o).unwrap().mass().unwrap();
        let same = solve_prescribed_mass_power(&s, base, &o).unwrap();
        assert!((same.mu - 1.0).abs() < 1e-12);
        let half = solve_prescribed_mass_power(&s, 0.5 * base, &o).unwrap();
        assert!((half.mu - 4.0).abs() < 1e-10);
        assert!(half.mass_residual < 1e-6);
        let crit = NonlinearitySpec::critical(3).unwrap();
        assert!(matches!(solve_prescribed_mass_power(&crit, 1.0, &o), Err(Error::CriticalCase(_))));
    }

    #[test]
    fn pure_power_curve_is_flat_and_degenerate() {
        let s = NonlinearitySpec::critical(2).unwrap();
        let o = NormalizedOptions { count: 9, ..Default::default() };
        let r = solve_normalized_critical(&s, M1, &o).unwrap();
        assert!(r.degenerate_continuum && r.found);
        assert!(r.curve.max_abs_b < 1e-6 * M1, "{}", r.curve.max_abs_b);
        assert!(r.curve.a_increasing);
        assert_eq!(r.label, EVIDENCE);
        assert!(matches!(certify_nonexistence(&s, M1, &o), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn curve_csv_has_the_documented_columns() {
        let s = NonlinearitySpec::critical(2).unwrap();
        let c = sample_level_curve(&s, M1, (-1.0, 1.0), 3, &ShootingOptions::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("curve.csv");
        c.write_csv(&p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("lambda,mu,mass,a_mu,b_lambda,nehari,pohozaev\n"));
        assert_eq!(text.lines().count(), 4);
        for s in &c.samples {
            assert!(s.b_lambda.unwrap() >= -s.mu * M1);
        }
    }

    #[test]
    fn saturated_power_has_a_root() {
        let s = NonlinearitySpec::perturbed(2, Perturbation::Saturated { c: 1.0, a: 4.0, b: 0.5 }).unwrap();
        let o = NormalizedOptions { count: 17, ..Default::default() };
        let r = solve_normalized_critical(&s, M1, &o).unwrap();
        assert!(r.found, "{:?}", r.curve);
        for sol in &r.solutions {
            assert!(sol.mass_residual < 1e-6 && sol.d_lambda_i < 1e-6 * sol.mu * M1);
        }
        assert!(matches!(certify_nonexistence(&s, M1, &o), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn soave_obstruction() {
        let s = NonlinearitySpec::perturbed(2, Perturbation::Soave { theta: 0.5, q: 1.5 }).unwrap();
        let o = NormalizedOptions { count: 9, ..Default::default() };
        let c = certify_nonexistence(&s, M1, &o).unwrap();
        assert!(c.issued, "{c:?}");
        assert!(c.all_r2_positive && c.mass_avoids_m1);
        assert!(c.max_identity_residual < 1e-5, "{}", c.max_identity_residual);
        let r = solve_normalized_critical(&s, M1, &o).unwrap();
        assert!(!r.found && r.closest.is_some());
    }
}
