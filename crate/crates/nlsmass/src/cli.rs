//! Run configuration, orchestration and report emission behind the `nlsmass` binary.
//!
//! Every command writes its artifacts plus a `report.json` into the output
//! directory. Apart from `elapsed_ms`, everything written is a deterministic
//! function of the configuration.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::augmented::{descent_flow, AugmentedPoint, FlowOptions};
use crate::error::{Error, Result};
use crate::functionals::{
    critical_identity_from, d_of_m_probe, decay_report, gn_constant, gn_quotient, pohozaev_from, psi_mu_from,
    scaling_law_check, DTrend, FunctionalContext, IdentityReport, Moments,
};
use crate::grid::{read_radial_csv, write_radial_csv, RadialGrid};
use crate::nonlinearity::{Family, NonlinearitySpec, Sampling};
use crate::normalized::{
    certify_nonexistence, sample_level_curve, solve_normalized_critical, with_pool, MassLevelCurve, NormalizedOptions,
};
use crate::paths::{
    optimal_path_profile, power_ray_profile, zeta0_segment_profile, PathKind, PathProfile, Zeta0Params,
};
use crate::plot::{emit_plot, PlotStyle, Reference};
use crate::profiles::random_profile;
use crate::shooting::{critical_ground_state, solve_ground_state, ShootingOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    GroundState,
    MassCurve,
    BLambda,
    SolveNormalized,
    CheckExistence,
    CheckNonexistence,
    VerifyIdentities,
    Flow,
    Path,
    DOfM,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::GroundState => "ground-state",
            Command::MassCurve => "mass-curve",
            Command::BLambda => "b-lambda",
            Command::SolveNormalized => "solve-normalized",
            Command::CheckExistence => "check-existence",
            Command::CheckNonexistence => "check-nonexistence",
            Command::VerifyIdentities => "verify-identities",
            Command::Flow => "flow",
            Command::Path => "path",
            Command::DOfM => "d-of-m",
        }
    }
}

/// Parameters only some commands read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommandParams {
    /// Frequency for `ground-state`, `verify-identities` and the optimal path.
    pub mu: f64,
    /// Multiplier `λ` for `flow` and the ray/ζ₀ paths.
    pub lambda: f64,
    /// File name for the `ground-state` profile, relative to the output directory.
    pub solution: Option<PathBuf>,
    /// `m / m₁` for `d-of-m`.
    pub mass_ratio: f64,
    pub mu_sweep: Vec<f64>,
    pub steps: usize,
    pub step: f64,
    /// Profile CSV (with sidecar) to start the flow from; `start_scale·w_μ` otherwise.
    pub start: Option<PathBuf>,
    pub start_scale: f64,
    pub path_kind: PathKind,
    pub t_max: f64,
    pub lambda0: f64,
    /// Seeded random profiles for the Gagliardo–Nirenberg bound.
    pub random_profiles: usize,
    pub plot: bool,
}

impl Default for CommandParams {
    fn default() -> Self {
        Self {
            mu: 1.0,
            lambda: 0.0,
            solution: None,
            mass_ratio: 1.0,
            mu_sweep: (-3..=6).map(|k| 10f64.powi(k)).collect(),
            steps: 200,
            step: 0.5,
            start: None,
            start_scale: 1.2,
            path_kind: PathKind::Optimal,
            t_max: 2.0,
            lambda0: -1.0,
            random_profiles: 200,
            plot: true,
        }
    }
}

fn default_tol() -> f64 {
    1e-6
}
fn default_lambda_min() -> f64 {
    -8.0
}
fn default_lambda_max() -> f64 {
    8.0
}
fn default_samples() -> usize {
    65
}
fn default_seed() -> u64 {
    20240601
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub spec: NonlinearitySpec,
    #[serde(default)]
    pub shooting: ShootingOptions,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_lambda_min")]
    pub lambda_min: f64,
    #[serde(default = "default_lambda_max")]
    pub lambda_max: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub params: CommandParams,
}

impl RunConfig {
    pub fn new(spec: NonlinearitySpec) -> Self {
        Self {
            spec,
            shooting: ShootingOptions::default(),
            tol: default_tol(),
            lambda_min: default_lambda_min(),
            lambda_max: default_lambda_max(),
            samples: default_samples(),
            seed: default_seed(),
            out: None,
            params: CommandParams::default(),
        }
    }

    /// Accepts a full configuration or a bare nonlinearity spec.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let cfg = if value.get("spec").is_some() {
            serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?
        } else {
            Self::new(serde_json::from_value(value).map_err(|e| Error::Config(format!("spec: {e}")))?)
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if !(self.lambda_min.is_finite() && self.lambda_max.is_finite() && self.lambda_min < self.lambda_max) {
            return bad(format!("need lambda_min < lambda_max, got [{}, {}]", self.lambda_min, self.lambda_max));
        }
        if self.samples < 2 {
            return bad(format!("samples must be at least 2, got {}", self.samples));
        }
        let p = &self.params;
        if !(p.mu > 0.0 && p.mu.is_finite()) {
            return bad(format!("mu must be positive, got {}", p.mu));
        }
        if !(p.mass_ratio > 0.0) || p.mu_sweep.iter().any(|m| !(*m > 0.0)) {
            return bad("mass_ratio and mu_sweep entries must be positive".into());
        }
        if !(p.step > 0.0) || !(p.t_max > 0.0) || !(p.start_scale > 0.0) {
            return bad("step, t_max and start_scale must be positive".into());
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON of everything except the output directory.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(&Self { out: None, ..self.clone() }).expect("config serializes");
        Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("nlsmass-out"))
    }

    fn normalized_options(&self) -> NormalizedOptions {
        NormalizedOptions {
            lambda_min: self.lambda_min,
            lambda_max: self.lambda_max,
            count: self.samples,
            mass_tol: self.tol,
            residual_tol: self.tol,
            shooting: self.shooting,
        }
    }
}

/// A verdict with the number it was decided on and the tolerance it was held to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, pass: value <= tolerance }
    }

    /// A yes/no condition, recorded as value 1 or 0 with zero tolerance.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self { name: name.into(), value: if ok { 1.0 } else { 0.0 }, tolerance: 0.0, pass: ok }
    }

    pub fn from_identity(r: &IdentityReport) -> Self {
        Self { name: r.name.clone(), value: r.residual, tolerance: r.tolerance, pass: r.pass }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub command: Command,
    pub config_hash: String,
    pub elapsed_ms: u128,
    pub verdicts: Vec<Check>,
    /// File names relative to the output directory.
    pub artifacts: Vec<String>,
    pub details: serde_json::Value,
}

impl RunReport {
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|c| c.pass)
    }
}

struct Sink {
    dir: PathBuf,
    artifacts: Vec<String>,
    plot: bool,
}

impl Sink {
    fn path(&mut self, name: &str) -> PathBuf {
        self.artifacts.push(name.to_string());
        self.dir.join(name)
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let path = self.path(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    fn svg(&mut self, name: &str, curve: &[(f64, f64)], style: PlotStyle) -> Result<()> {
        if self.plot {
            let path = self.path(name);
            emit_plot(curve, &style, &path)?;
        }
        Ok(())
    }

    fn profile_csv(&mut self, name: &str, profile: &PathProfile) -> Result<()> {
        let path = self.path(name);
        profile.write_csv(std::fs::File::create(path)?)
    }
}

struct Outcome {
    verdicts: Vec<Check>,
    details: serde_json::Value,
}

/// Runs `command`, writes its artifacts and `report.json` into the output directory.
pub fn run(command: Command, config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let started = Instant::now();
    let dir = config.out_dir();
    std::fs::create_dir_all(&dir)?;
    let mut sink = Sink { dir, artifacts: Vec::new(), plot: config.params.plot };
    let outcome = with_pool(|| dispatch(command, config, &mut sink))?;
    let report = RunReport {
        command,
        config_hash: config.hash(),
        elapsed_ms: started.elapsed().as_millis(),
        verdicts: outcome.verdicts,
        artifacts: sink.artifacts.clone(),
        details: outcome.details,
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    std::fs::write(sink.dir.join("report.json"), text)?;
    Ok(report)
}

fn dispatch(command: Command, cfg: &RunConfig, sink: &mut Sink) -> Result<Outcome> {
    match command {
        Command::GroundState => ground_state(cfg, sink),
        Command::MassCurve => level_curve(cfg, sink, false),
        Command::BLambda => level_curve(cfg, sink, true),
        Command::SolveNormalized => solve_normalized(cfg, sink),
        Command::CheckExistence => check_existence(cfg, sink),
        Command::CheckNonexistence => check_nonexistence(cfg, sink),
        Command::VerifyIdentities => verify_identities(cfg, sink),
        Command::Flow => flow(cfg, sink),
        Command::Path => path(cfg, sink),
        Command::DOfM => d_of_m(cfg, sink),
    }
}

fn m1_for(spec: &NonlinearitySpec) -> Result<f64> {
    Ok(critical_ground_state(spec.dim())?.mass()?)
}

fn critical_family(spec: &NonlinearitySpec) -> bool {
    spec.is_pure_critical() || matches!(spec.family(), Family::CriticalPerturbed { .. })
}

fn ground_state(cfg: &RunConfig, sink: &mut Sink) -> Result<Outcome> {
    let mu = cfg.params.mu;
    let sol = solve_ground_state(&cfg.spec, mu, &cfg.shooting)?;
    let name = cfg.params.solution.clone().unwrap_or_else(|| PathBuf::from("ground_state.csv"));
    let csv_path = sink.path(&name.to_string_lossy());
    let side = write_radial_csv(&sol.profile, Some(mu), &csv_path)?;
    sink.artifacts.push(name.with_extension("json").to_string_lossy().into_owned());
    debug_assert!(side.ends_with(name.with_extension("json")));

    let m = Moments::of(&sol.profile, &cfg.spec)?;
    let d = &sol.diagnostics;
    let v = sol.profile.values();
    let positive = v.iter().all(|&x| x > 0.0);
    let decreasing = v.windows(2).all(|w| w[1] < w[0]);
    let verdicts = vec![
        Check::at_most("nehari residual", d.nehari_residual, cfg.tol),
        Check::at_most("pohozaev residual", d.pohozaev_residual, cfg.tol),
        Check::holds("positive", positive),
        Check::holds("decreasing", decreasing),
    ];
    let details = serde_json::json!({
        "mu": mu,
        "lambda": sol.lambda(),
        "w0": sol.w0,
        "mass": 0.5 * m.l2,
        "grad_norm_sq": m.grad,
        "psi_mu": psi_mu_from(&m, mu),
        "grid": { "N": sol.profile.dim(), "R_max": sol.profile.grid().r_max(), "K": sol.profile.grid().intervals() },
        "diagnostics": d,
    });
    Ok(Outcome { verdicts, details })
}

fn level_curve(cfg: &RunConfig, sink: &mut Sink, b_lambda: bool) -> Result<Outcome> {
    let m1 = m1_for(&cfg.spec)?;
    let curve = sample_level_curve(&cfg.spec, m1, (cfg.lambda_min, cfg.lambda_max), cfg.samples, &cfg.shooting)?;
    let path = sink.path("curve.csv");
    curve.write_csv(&path)?;
    emit_curve_plot(&curve, sink, b_lambda)?;
    let summary = crate::normalized::CurveSummary::of(&curve);
    let mut verdicts = vec![Check::at_most("failed samples", curve.failures() as f64, 0.0)];
    if b_lambda && cfg.spec.is_pure_critical() {
        verdicts.push(Check::at_most("max |b(λ)| / m₁", curve.max_abs_b() / m1, cfg.tol));
    }
    if b_lambda {
        verdicts.push(Check::holds("a(μ) increasing", curve.a_increasing()));
    }
    Ok(Outcome { verdicts, details: serde_json::json!({ "m1": m1, "summary": summary }) })
}

fn emit_curve_plot(curve: &MassLevelCurve, sink: &mut Sink, b_lambda: bool) -> Result<()> {
    let pick = |f: fn(&crate::normalized::CurveSample) -> Option<f64>| -> Vec<(f64, f64)> {
        curve.samples.iter().map(|s| (s.lambda, f(s).unwrap_or(f64::NAN))).collect()
    };
    if b_lambda {
        let style = PlotStyle {
            title: "b(λ) = a(e^λ) − e^λ m₁".into(),
            x_label: "λ".into(),
            y_label: "b(λ)".into(),
            reference: Some(Reference { label: "0".into(), y: 0.0 }),
        };
        sink.svg("b_lambda.svg", &pick(|s| s.b_lambda), style)
    } else {
        let style = PlotStyle {
            title: "mass of the ground state".into(),
            x_label: "λ".into(),
            y_label: "M(w_μ)".into(),
            reference: Some(Reference { label: "m₁".into(), y: curve.m1 }),
        };
        sink.svg("mass_curve.svg", &pick(|s| s.mass), style)
    }
}

fn solve_normalized(cfg: &RunConfig, sink: &mut Sink) -> Result<Outcome> {
    let m1 = m1_for(&cfg.spec)?;
    let report = solve_normalized_critical(&cfg.spec, m1, &cfg.normalized_options())?;
    sink.json("existence.json", &report)?;
    let curve = MassLevelCurve { spec: cfg.spec.clone(), m1, samples: report.samples.clone() };
    let path = sink.path("curve.csv");
    curve.write_csv(&path)?;
    emit_curve_plot(&curve, sink, false)?;
    for (i, (s, u)) in report.solutions.iter().zip(&report.profiles).enumerate() {
        let name = format!("solution_{i}.csv");
        let path = sink.path(&name);
        write_radial_csv(u, Some(s.mu), &path)?;
        sink.artifacts.push(format!("solution_{i}.json"));
    }
    let mut verdicts = vec![Check::holds("solution found", report.found)];
    for s in &report.solutions {
        verdicts.push(Check::at_most(format!("mass residual at λ = {:.6}", s.lambda), s.mass_residual, cfg.tol));
        verdicts.push(Check::at_most(format!("nehari residual at λ = {:.6}", s.lambda), s.nehari, cfg.tol));
        verdicts.push(Check::at_most(format!("pohozaev residual at λ = {:.6}", s.lambda), s.pohozaev, cfg.tol));
    }
    let details = serde_json::json!({
        "m1": m1,
        "roots": report.solutions.iter().map(|s| s.lambda).collect::<Vec<_>>(),
        "degenerate_continuum": report.degenerate_continuum,
        "closest": report.closest,
    });
    Ok(Outcome { verdicts, details })
}

fn check_existence(cfg: &RunConfig, sink: &mut Sink) -> Result<Outcome> {
    let sampling = Sampling::default();
    let spec = &cfg.spec;
    let g1 = spec.check_g1(&sampling);
    let g3 = spec.check_g3(&sampling);
    let g4 = spec.check_g4(&sampling);
    let cor = spec.check_cor15_bound(&sampling);
    let rho_small = spec.check_rho_small(&sampling);
    let rho1 = spec.check_rho1(&sampling);
    let a = spec.estimate_a(&sampling).ok();
    let alpha = spec.classify_alpha(&sampling).ok();
    let g2 = g3.verdict.passed() || g4.verdict.passed();
    let theorem = g1.verdict.passed() && g2;
    let corollary = g1.verdict.passed() && cor.verdict.passed();
    let reports = vec![g1, g3, g4, cor, rho_small, rho1];
    sink.json("hypotheses.json", &reports)?;
    let verdicts = vec![
        Check::holds("(g1)", reports[0].verdict.passed()),
        Check::holds("(g2) via (g3) or (g4)", g2),
        Check::holds("existence hypotheses: (g1) and (g2), or (g1) and g(s) ≥ s^p", theorem || corollary),
    ];
    let details = serde_json::json!({
        "existence_predicted": theorem || corollary,
        "via_g2": theorem,
        "via_power_bound": corollary,
        "growth_constant_a": a,
        "alpha": alpha,
        "verdicts": reports.iter().map(|r| (r.name.clone(), r.verdict)).collect::<Vec<_>>(),
    });
    Ok(Outcome { verdicts, details })
}

fn check_nonexistence(cfg: &RunConfig, sink: &mut Sink) -> Result<Outcome> {
    let m1 = m1_for(&cfg.spec)?;
    let cert = certify_nonexistence(&cfg.spec, m1, &cfg.normalized_options())?;
    sink.json("certificate.json", &cert)?;
    let min_r1 = cert.samples.iter().map(|s| s.r1 / s.mass).fold(f64::INFINITY, f64::min);
    let verdicts = vec![
        Check::holds("(ρ1)", cert.rho1.verdict.passed()),
        Check::holds("r2 > 0 at every ground state", cert.all_r2_positive),
        Check::holds("mass avoids m₁", cert.mass_avoids_m1),
        Check::at_most("max |r1 + r2| / (|r1| + |r2|)", cert.max_identity_residual, cfg.tol),
        Check::at_most("−min r1 / M", -min_r1, 1e-8),
        Check::holds("certificate issued", cert.issued),
    ];
    let details = serde_json::json!({
        "m1": m1,
        "issued": cert.issued,
        "min_mass_gap": cert.min_mass_gap,
        "failures": cert.failures,
    });
    Ok(Outcome { verdicts, details })
}

fn verify_identities(cfg: &RunConfig, sink: &mut Sink) -> Result<Outcome> {
    let spec = &cfg.spec;
    let mu = cfg.params.mu;
    let tol = cfg.tol;
    let n = spec.dim() as f64;
    let sol = solve_ground_state(spec, mu, &cfg.shooting)?;
    let u = &sol.profile;
    let m = Moments::of(u, spec)?;
    let scale = mu * m.l2;

    let mut reports = vec![
        IdentityReport::new("nehari: ‖∇u‖² + μ‖u‖² = ∫g(u)u", m.grad + mu * m.l2, m.gu, scale, tol),
        IdentityReport::new("pohozaev: P(λ, u) = 0", pohozaev_from(&m, mu, spec.dim()), 0.0, scale, tol),
    ];
    if critical_family(spec) {
        let id = critical_identity_from(&m, spec.dim());
        reports.push(IdentityReport::new(
            "critical identity: r1 + r2 = 0",
            id.r1 + id.r2,
            0.0,
            id.r1.abs() + id.r2.abs() + m.grad,
            tol,
        ));
    }
    let mut details = serde_json::Map::new();
    if spec.is_pure_critical() {
        let m1 = m1_for(spec)?;
        let psi = psi_mu_from(&m, mu);
        reports.push(IdentityReport::new("‖∇w‖² = Nμm₁", m.grad, n * mu * m1, 0.0, tol));
        reports.push(IdentityReport::new("‖w‖_{p+1}^{p+1} = (N+2)μm₁", m.lp, (n + 2.0) * mu * m1, 0.0, tol));
        reports.push(IdentityReport::new("Ψ₀μ(w) = μm₁", psi, mu * m1, 0.0, tol));
        reports.push(IdentityReport::new("M(w) = m₁", 0.5 * m.l2, m1, 0.0, tol));
        let c_gn = gn_constant(m1, spec.dim());
        reports.push(IdentityReport::new("GN quotient of w = C_GN", gn_quotient(u)?, c_gn, 0.0, tol));
        let grid = std::sync::Arc::new(RadialGrid::uniform(spec.dim(), 30.0, 4096)?);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut worst: f64 = 0.0;
        for _ in 0..cfg.params.random_profiles {
            let v = random_profile(&mut rng, grid.clone(), false)?;
            worst = worst.max(gn_quotient(&v)?);
        }
        reports.push(IdentityReport::at_least(
            format!("GN bound over {} seeded random profiles", cfg.params.random_profiles),
            c_gn,
            worst,
            c_gn,
            tol,
        ));
        details.insert("m1".into(), m1.into());
        details.insert("c_gn".into(), c_gn.into());
    }
    if spec.dim() == 2 {
        let decay = decay_report(u)?;
        details.insert("decay".into(), serde_json::to_value(&decay)?);
    }
    let mut verdicts: Vec<Check> = reports.iter().map(Check::from_identity).collect();
    if let Some(decay) = details.get("decay").and_then(|d| d.get("pass")).and_then(|p| p.as_bool()) {
        verdicts.push(Check::holds("radial decay bound r|u|³ ≤ (3/2π)‖u‖₄²‖∇u‖₂", decay));
    }
    if let Family::PurePower { q } = spec.family() {
        if (q - spec.p()).abs() > 1e-12 {
            let scaling = scaling_law_check(spec, &[0.25, 0.5, 1.0, 2.0, 4.0], 1e-4)?;
            let path = sink.path("scaling.csv");
            let mut w = csv::Writer::from_path(path)?;
            for row in &scaling.rows {
                w.serialize(row)?;
            }
            w.flush()?;
            reports.push(scaling.mass_slope.clone());
            verdicts.push(Check::from_identity(&scaling.mass_slope));
            for r in scaling.energy_slope.iter().chain(&scaling.energy_ratio) {
                reports.push(r.clone());
                verdicts.push(Check::from_identity(r));
            }
        }
    }
    sink.json("identities.json", &reports)?;
    details.insert("mu".into(), mu.into());
    details.insert("w0".into(), sol.w0.into());
    Ok(Outcome { verdicts, details: details.into() })
}

fn flow(cfg: &RunConfig, sink: &mut Sink) -> Result<Outcome> {
    let p = &cfg.params;
    let ctx = FunctionalContext::with_critical_mass(cfg.spec.clone(), p.lambda)?;
    let u0 = match &p.start {
        Some(path) => read_radial_csv(path)?.0,
        None => solve_ground_state(&cfg.spec, p.lambda.exp(), &cfg.shooting)?.profile.scale(p.start_scale),
    };
    let opts = FlowOptions { step: p.step, n_steps: p.steps, ..FlowOptions::default() };
    let outcome = descent_flow(&AugmentedPoint::new(0.0, p.lambda, u0)?, &ctx, &opts)?;
    let path = sink.path("trajectory.csv");
    outcome.write_csv(std::fs::File::create(path)?)?;
    let j = outcome.j_values();
    sink.svg(
        "flow.svg",
        &j.iter().enumerate().map(|(i, &v)| (i as f64, v)).collect::<Vec<_>>(),
        PlotStyle { title: "descent flow".into(), x_label: "step".into(), y_label: "J".into(), reference: None },
    )?;
    let rise = j.windows(2).map(|w| (w[1] - w[0]) / (1.0 + w[0].abs())).fold(0.0, f64::max);
    let first = outcome.trajectory.first().map(|s| s.record.pspc).unwrap_or(f64::NAN);
    let last = outcome.trajectory.last().map(|s| s.record.pspc).unwrap_or(f64::NAN);
    let verdicts = vec![
        Check::at_most("largest relative increase of J", rise, 0.0),
        Check::at_most("final / initial PSPC magnitude", last / first, 0.1),
    ];
    let end = &outcome.end;
    let details = serde_json::json!({
        "stop": outcome.stop,
        "steps": outcome.trajectory.len().saturating_sub(1),
        "initial": outcome.trajectory.first().map(|s| s.record),
        "final": outcome.trajectory.last().map(|s| s.record),
        "end": { "theta": end.theta, "lambda": end.lambda },
    });
    Ok(Outcome { verdicts, details })
}

fn path(cfg: &RunConfig, sink: &mut Sink) -> Result<Outcome> {
    let p = &cfg.params;
    let spec = &cfg.spec;
    let (profile, verdicts, details) = match p.path_kind {
        PathKind::Ray => {
            let ctx = FunctionalContext::with_critical_mass(spec.clone(), p.lambda)?;
            let prof = power_ray_profile(&ctx, p.t_max)?;
            let scale = ctx.mu() * ctx.m1;
            let verdicts = vec![Check::at_most("|max along the ray| / (μm₁)", prof.max.abs() / scale, cfg.tol)];
            let details = serde_json::json!({ "lambda": p.lambda, "argmax": prof.argmax, "max": prof.max });
            (prof, verdicts, details)
        }
        PathKind::Zeta0 => {
            let ctx = FunctionalContext::with_critical_mass(spec.clone(), p.lambda)?;
            let lambdas: Vec<f64> = (0..cfg.samples)
                .map(|i| cfg.lambda_min + (cfg.lambda_max - cfg.lambda_min) * i as f64 / (cfg.samples - 1) as f64)
                .collect();
            let params = Zeta0Params::search(spec, ctx.m1, p.lambda0, &lambdas)?;
            let seg = zeta0_segment_profile(&ctx, p.lambda, &params)?;
            let verdicts = vec![
                Check::holds("Ψ_μ(ζ₀) below the barrier −2Am₁ − 1", seg.barrier_ok),
                Check::holds("M(ζ₀) > m₁", seg.mass_ok),
            ];
            let details = serde_json::json!({
                "params": params,
                "lambda": seg.lambda,
                "endpoint_psi": seg.endpoint_psi,
                "endpoint_mass": seg.endpoint_mass,
                "barrier": seg.barrier,
                "max": seg.profile.max,
            });
            (seg.profile, verdicts, details)
        }
        PathKind::Optimal => {
            let sol = solve_ground_state(spec, p.mu, &cfg.shooting)?;
            let path = optimal_path_profile(&sol)?;
            let mut verdicts = vec![
                Check::at_most("L(γ(1))", path.endpoint, 0.0),
                Check::at_most(
                    "|max along γ − L(u₀)| / |L(u₀)|",
                    (path.profile.max - path.level).abs() / path.level.abs(),
                    cfg.tol,
                ),
            ];
            if let crate::paths::PathShape::ThreePiece { plateau_deviation, .. } = path.shape {
                verdicts.push(Check::at_most("plateau deviation", plateau_deviation, 1e-8));
            }
            verdicts.push(Check::holds("sign conditions of the construction", path.well_formed(1e-8)));
            let details = serde_json::json!({
                "mu": path.mu,
                "level": path.level,
                "endpoint": path.endpoint,
                "max": path.profile.max,
                "shape": path.shape,
            });
            (path.profile, verdicts, details)
        }
    };
    sink.profile_csv("path.csv", &profile)?;
    let curve: Vec<(f64, f64)> = profile.t.iter().copied().zip(profile.values.iter().copied()).collect();
    let reference = match p.path_kind {
        PathKind::Optimal => {
            details.get("level").and_then(|v| v.as_f64()).map(|y| Reference { label: "L(u₀)".into(), y })
        }
        _ => Some(Reference { label: "0".into(), y: 0.0 }),
    };
    sink.svg(
        "path.svg",
        &curve,
        PlotStyle { title: "energy along the path".into(), x_label: "t".into(), y_label: "L".into(), reference },
    )?;
    Ok(Outcome { verdicts, details })
}

fn d_of_m(cfg: &RunConfig, sink: &mut Sink) -> Result<Outcome> {
    let spec = &cfg.spec;
    let omega1 = critical_ground_state(spec.dim())?;
    let m1 = omega1.mass()?;
    let m = cfg.params.mass_ratio * m1;
    let probe = d_of_m_probe(&omega1.profile, spec, m1, m, &cfg.params.mu_sweep)?;
    sink.json("d_of_m.json", &probe)?;
    let mut verdicts = vec![Check::from_identity(&probe.witness)];
    if cfg.params.mass_ratio <= 1.0 {
        verdicts.push(Check::from_identity(&IdentityReport::at_least("inf ℐ ≥ 0", probe.infimum, 0.0, 1.0, cfg.tol)));
    } else {
        verdicts.push(Check::holds("ℐ(sω_μ) → −∞ along the sweep", probe.trend == DTrend::NegInfinity));
    }
    let details = serde_json::json!({ "m": m, "m1": m1, "infimum": probe.infimum, "trend": probe.trend });
    Ok(Outcome { verdicts, details })
}
