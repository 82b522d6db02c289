//! Acceptance suite: one line per criterion.
//!
//! Runs without the libtest harness so each criterion prints exactly one
//! PASS/FAIL line. Criteria listed in `KNOWN_RED` are implemented at full
//! strength and currently fail for reasons recorded in the project notes;
//! they are reported as FAIL but do not fail the run unless
//! `ACCEPTANCE_STRICT=1` is set. Any other failure exits non-zero.

use std::sync::Arc;
use std::time::Instant;

use nlsmass::augmented::{descent_flow, j_eval, upsilon, AugmentedPoint, FlowOptions};
use nlsmass::functionals::{
    gn_constant, gn_quotient, pohozaev_p, psi0_mu, scaling_law_check, FunctionalContext, Moments,
};
use nlsmass::grid::RadialGrid;
use nlsmass::nonlinearity::{NonlinearitySpec, Perturbation, Sampling};
use nlsmass::normalized::{
    certify_nonexistence, d_of_m_probe, sample_level_curve, solve_normalized_critical, NormalizedOptions,
};
use nlsmass::paths::{optimal_path_profile, PathShape};
use nlsmass::profiles::random_profile;
use nlsmass::shooting::{critical_ground_state, solve_ground_state, ShootingOptions};
use nlsmass::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Frozen reference values for N = 2, from an independent high-resolution shooting run.
const W0_N2: f64 = 2.2062008645930478;
const M1_N2: f64 = 5.850448262280896;

const KNOWN_RED: [usize; 3] = [6, 8, 11];

/// `(passed, detail)`; a library error counts as a failure.
type Outcome = nlsmass::Result<(bool, String)>;

fn check(ok: bool, detail: String) -> Outcome {
    Ok((ok, detail))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn saturated() -> NonlinearitySpec {
    NonlinearitySpec::perturbed(2, Perturbation::Saturated { c: 1.0, a: 4.0, b: 0.5 }).unwrap()
}

fn c1_ground_state_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for dim in [2usize, 3] {
        let w = critical_ground_state(dim)?;
        let ctx = FunctionalContext::with_critical_mass(w.spec.clone(), 0.0)?;
        let m = Moments::of(&w.profile, &w.spec)?;
        let m1 = 0.5 * m.l2;
        let n = dim as f64;
        let errs = [rel(m.grad, n * m1), rel(m.lp, (n + 2.0) * m1), rel(psi0_mu(&w.profile, &ctx)?, m1)];
        let e = errs.iter().copied().fold(0.0, f64::max);
        worst = worst.max(e);
        detail.push(format!("N={dim} max rel err {e:.1e}"));
        if dim == 2 {
            let oracle = rel(m1, M1_N2).max(rel(w.w0, W0_N2));
            worst = worst.max(oracle);
            detail.push(format!("m₁, w(0) vs reference {oracle:.1e}"));
        }
    }
    check(worst < 1e-6, detail.join("; "))
}

fn c2_scaling_laws() -> Outcome {
    let mus = [0.25, 0.5, 1.0, 2.0, 4.0];
    let r = scaling_law_check(&NonlinearitySpec::pure_power(3, 3.0).unwrap(), &mus, 1e-4)?;
    let ratio = r.energy_ratio.as_ref().expect("q ≠ p has an energy ratio");
    let slope_err = (r.mass_slope.left + 0.5).abs();
    let ratio_err = (ratio.left - 1.0).abs();
    let crit = scaling_law_check(&NonlinearitySpec::critical(3).unwrap(), &mus, 1e-6)?;
    let flat = crit.mass_slope.left.abs();
    check(
        slope_err < 1e-4 && ratio_err < 1e-4 && flat < 1e-6,
        format!("(3,3) slope {:+.8} ratio {:.8}; q=p slope {flat:.1e}", r.mass_slope.left, ratio.left),
    )
}

fn c3_gagliardo_nirenberg() -> Outcome {
    let w = critical_ground_state(2)?;
    let m1 = w.mass()?;
    let c = gn_constant(m1, 2);
    let at_w = rel(gn_quotient(&w.profile)?, c);
    let grid = Arc::new(RadialGrid::uniform(2, 30.0, 4096).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let u = random_profile(&mut rng, grid.clone(), false)?;
        worst = worst.max(gn_quotient(&u)?);
    }
    check(
        at_w < 1e-6 && worst <= c * (1.0 + 1e-6),
        format!("quotient(ω₁) rel err {at_w:.1e}; max over 200 profiles {:.6}·C_GN", worst / c),
    )
}

fn c4_pohozaev() -> Outcome {
    // residual of every converged solve across three families and the λ range
    let specs = [NonlinearitySpec::critical(2).unwrap(), NonlinearitySpec::critical(3).unwrap(), saturated()];
    let mut worst: f64 = 0.0;
    let mut solves = 0;
    for spec in &specs {
        for k in -4..=4 {
            let sol = solve_ground_state(spec, (2.0 * k as f64).exp(), &ShootingOptions::default())?;
            worst = worst.max(sol.diagnostics.pohozaev_residual);
            solves += 1;
        }
    }
    // ∂_θJ against central differences at a point that is not a solution
    let ctx = FunctionalContext::with_critical_mass(saturated(), 0.5)?;
    let u = critical_ground_state(2)?.profile.scale(0.9);
    let theta = 0.2;
    let at = |t: f64| j_eval(&AugmentedPoint::new(t, 0.5, u.clone()).unwrap(), &ctx).unwrap();
    let p = pohozaev_p(&u.rescaled(theta)?, &ctx)?;
    let err = |h: f64| ((at(theta + h) - at(theta - h)) / (2.0 * h) - p).abs();
    let (e1, e2, e3) = (err(0.2), err(0.1), err(0.05));
    let (r1, r2) = (e1 / e2, e2 / e3);
    check(
        worst < 1e-6 && (r1 - 4.0).abs() <= 0.5 && (r2 - 4.0).abs() <= 0.5,
        format!("max |P|/(μ‖u‖²) {worst:.1e} over {solves} solves; FD ratios {r1:.3}, {r2:.3}"),
    )
}

fn c5_level_curve_degeneracy() -> Outcome {
    let curve = sample_level_curve(
        &NonlinearitySpec::critical(2).unwrap(),
        M1_N2,
        (-8.0, 8.0),
        65,
        &ShootingOptions::default(),
    )?;
    let b = curve.max_abs_b();
    check(
        curve.failures() == 0 && b < 1e-6 * M1_N2,
        format!("max |b| = {b:.2e} = {:.1e}·m₁ over 65 samples", b / M1_N2),
    )
}

fn c6_level_curve_tails() -> Outcome {
    let curve = sample_level_curve(&saturated(), M1_N2, (-8.0, 8.0), 5, &ShootingOptions::default())?;
    let b = |l: f64| curve.sample_at(l).and_then(|s| s.b_lambda).map(f64::abs).unwrap_or(f64::NAN);
    let (bm8, bm4, b4, b8) = (b(-8.0), b(-4.0), b(4.0), b(8.0));
    let cap = 0.1 * M1_N2;
    let ok = bm8 < bm4 && b8 < b4 && [bm8, bm4, b4, b8].iter().all(|v| *v < cap);
    check(ok, format!("|b| at −8,−4,4,8: {bm8:.2e}, {bm4:.2e}, {b4:.3}, {b8:.3}; cap 0.1·m₁ = {cap:.3}"))
}

fn c7_critical_existence() -> Outcome {
    let r = solve_normalized_critical(&saturated(), M1_N2, &NormalizedOptions::default())?;
    let good = r
        .solutions
        .iter()
        .find(|s| s.mass_residual < 1e-6 && s.positive && s.decreasing && s.nehari < 1e-6 && s.pohozaev < 1e-6);
    match good {
        Some(s) => check(
            true,
            format!(
                "λ* = {:.8}, |M−m₁|/m₁ {:.1e}, Nehari {:.1e}, Pohozaev {:.1e}",
                s.lambda, s.mass_residual, s.nehari, s.pohozaev
            ),
        ),
        None => check(false, format!("no admissible root; closest {:?}", r.closest)),
    }
}

fn c8_nonexistence() -> Outcome {
    let spec = NonlinearitySpec::perturbed(2, Perturbation::Soave { theta: 0.5, q: 1.5 }).unwrap();
    let rho1 = spec.check_rho1(&Sampling::default()).verdict.passed();
    let cert = certify_nonexistence(&spec, M1_N2, &NormalizedOptions::default())?;
    let max_mass = cert.samples.iter().map(|s| s.mass).fold(f64::NEG_INFINITY, f64::max);
    let min_r1 = cert.samples.iter().map(|s| s.r1).fold(f64::INFINITY, f64::min);
    let below = cert.failures == 0 && max_mass < 0.99 * M1_N2;
    let ok = rho1 && below && min_r1 >= -1e-8 && cert.all_r2_positive && cert.issued;
    check(
        ok,
        format!(
            "(ρ1) {rho1}; max M/m₁ {:.5} (need < 0.99); min r1 {min_r1:.3e}; r2 > 0 {}; certificate {}",
            max_mass / M1_N2,
            cert.all_r2_positive,
            cert.issued
        ),
    )
}

fn c9_d_of_m() -> Outcome {
    let w = critical_ground_state(2)?;
    let sweep: Vec<f64> = (-3..=6).map(|k| 10f64.powi(k)).collect();
    let at = d_of_m_probe(&w.profile, &w.spec, M1_N2, M1_N2, &sweep)?;
    let above = d_of_m_probe(&w.profile, &w.spec, M1_N2, 4.0 * M1_N2, &sweep)?;
    let deep = above.samples.iter().any(|s| s[1] < -1e6);
    check(
        at.infimum >= -1e-6 && deep && at.witness.pass && above.witness.pass,
        format!("inf at m₁ {:+.1e}; inf at 4m₁ {:.3e}", at.infimum, above.infimum),
    )
}

fn c10_augmented_invariances() -> Outcome {
    let ctx = FunctionalContext::with_critical_mass(NonlinearitySpec::critical(2).unwrap(), 0.3)?;
    let w = critical_ground_state(2)?.profile.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let grid = Arc::new(RadialGrid::uniform(2, 30.0, 8192).unwrap());
    let mut points =
        vec![AugmentedPoint::new(0.0, 0.3, w.clone()).unwrap(), AugmentedPoint::new(0.4, 0.3, w.scale(1.3)).unwrap()];
    for _ in 0..3 {
        let u = random_profile(&mut rng, grid.clone(), true)?;
        points.push(AugmentedPoint::new(rng.gen_range(-0.5..0.5), 0.3, u).unwrap());
    }
    let mut dilation: f64 = 0.0;
    let mut abs_err: f64 = 0.0;
    for pt in &points {
        let j = j_eval(pt, &ctx)?;
        for tau in [-1.0, -0.5, 0.5, 1.0] {
            let jt = j_eval(&pt.act(tau)?, &ctx)?;
            dilation = dilation.max((jt - j).abs() / (1.0 + j.abs()));
        }
        let signed = AugmentedPoint::new(pt.theta, pt.lambda, pt.u.scale(-1.0)).unwrap();
        abs_err = abs_err.max((j_eval(&upsilon(&signed), &ctx).unwrap() - j_eval(&signed, &ctx).unwrap()).abs());
    }
    let mut sandwich_ok = true;
    for _ in 0..100 {
        let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
        let g = Arc::new(RadialGrid::uniform(dim, 30.0, 2048).unwrap());
        let u = random_profile(&mut rng, g, false)?;
        let theta: f64 = rng.gen_range(-2.0..2.0);
        let e = u.h1_norms()?.e;
        let et = u.e_theta_norm(theta)?;
        let k = (0.5 * dim as f64 * theta.abs()).exp();
        sandwich_ok &= et >= e / k * (1.0 - 1e-12) && et <= e * k * (1.0 + 1e-12);
    }
    check(
        dilation < 5e-6 && abs_err < 1e-10 && sandwich_ok,
        format!("max |J∘Φ_τ − J|/(1+|J|) {dilation:.1e}; |J∘Υ − J| {abs_err:.1e}; sandwich on 100 draws {sandwich_ok}"),
    )
}

fn c11_descent_telemetry() -> Outcome {
    let ctx = FunctionalContext::with_critical_mass(NonlinearitySpec::critical(2).unwrap(), 0.0)?;
    let w = critical_ground_state(2)?.profile.scale(1.2);
    let start = AugmentedPoint::new(0.0, 0.0, w).unwrap();
    match descent_flow(&start, &ctx, &FlowOptions::default()) {
        Ok(out) => {
            let j = out.j_values();
            let monotone = j.windows(2).all(|p| p[1] <= p[0]);
            let r = out.records();
            let ratio = r.last().unwrap().pspc / r[0].pspc;
            check(
                monotone && out.trajectory.len() == 201 && ratio < 0.1,
                format!("J non-increasing {monotone}; {} steps; PSPC ratio {ratio:.3e}", out.trajectory.len() - 1),
            )
        }
        Err(Error::Stall { step, record }) => check(
            false,
            format!(
                "flow stalled at step {step} with J = {:.3e}, PSPC = {:.3e}: J is unbounded below",
                record.j, record.pspc
            ),
        ),
        Err(e) => Err(e),
    }
}

fn c12_optimal_paths() -> Outcome {
    let three = optimal_path_profile(&*critical_ground_state(3)?)?;
    let m1_3 = critical_ground_state(3).unwrap().mass().unwrap();
    let e3 = rel(three.profile.max, m1_3);
    let two = optimal_path_profile(&*critical_ground_state(2)?)?;
    let plateau = match two.shape {
        PathShape::ThreePiece { plateau_deviation, .. } => plateau_deviation,
        _ => f64::NAN,
    };
    check(
        e3 < 1e-6 && plateau < 1e-8 && two.endpoint < 0.0,
        format!("N=3 max vs a(1) {e3:.1e}; N=2 plateau {plateau:.1e}, endpoint L {:.3}", two.endpoint),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("ground-state identity suite", c1_ground_state_identities),
        ("scaling laws", c2_scaling_laws),
        ("Gagliardo–Nirenberg constant", c3_gagliardo_nirenberg),
        ("Pohozaev residuals and θ-derivative", c4_pohozaev),
        ("level-curve degeneracy, pure power", c5_level_curve_degeneracy),
        ("level-curve tails, saturated", c6_level_curve_tails),
        ("critical-mass existence, saturated", c7_critical_existence),
        ("non-existence, Soave", c8_nonexistence),
        ("d(m) dichotomy", c9_d_of_m),
        ("augmented-space invariances", c10_augmented_invariances),
        ("descent telemetry", c11_descent_telemetry),
        ("optimal mountain-pass paths", c12_optimal_paths),
    ];
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let only: Option<usize> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut regressions = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if only.is_some_and(|k| k != n) {
            continue;
        }
        let t = Instant::now();
        let outcome = match std::panic::catch_unwind(f) {
            Ok(Ok(v)) => v,
            Ok(Err(e)) => (false, format!("error: {e}")),
            Err(_) => (false, "panicked".into()),
        };
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            (true, d) => println!("criterion {n:>2} PASS  {name}: {d} [{secs:.1}s]"),
            (false, d) => {
                let known = KNOWN_RED.contains(&n);
                println!("criterion {n:>2} FAIL  {name}: {d} [{secs:.1}s]{}", if known { " (known)" } else { "" });
                if strict || !known {
                    regressions.push(n);
                }
            }
        }
    }
    if !regressions.is_empty() {
        eprintln!("unexpected failures: {regressions:?}");
        std::process::exit(1);
    }
}
