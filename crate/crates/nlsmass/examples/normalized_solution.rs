//! A positive solution with mass exactly m₁ for g(s) = s³ + s⁴/(1 + s^{3.5}) in 2-D.

use nlsmass::nonlinearity::{NonlinearitySpec, Perturbation};
use nlsmass::normalized::{solve_normalized_critical, NormalizedOptions};
use nlsmass::shooting::critical_mass;

pub fn main() -> nlsmass::Result<()> {
    let spec = NonlinearitySpec::perturbed(2, Perturbation::Saturated { c: 1.0, a: 4.0, b: 0.5 })?;
    let m1 = critical_mass(2)?;
    let report = solve_normalized_critical(&spec, m1, &NormalizedOptions::default())?;
    for h in &report.hypotheses {
        println!("{:<14} {:?}", h.name, h.verdict);
    }
    println!("mass range on the sweep: {:?} .. {:?} (m₁ = {m1:.10})", report.curve.mass_min, report.curve.mass_max);
    for s in &report.solutions {
        println!(
            "λ* = {:.10}  μ* = {:.8}  |M − m₁|/m₁ = {:.1e}  nehari {:.1e}  pohozaev {:.1e}  positive {}  decreasing {}",
            s.lambda, s.mu, s.mass_residual, s.nehari, s.pohozaev, s.positive, s.decreasing
        );
    }
    if !report.found {
        println!("no root; closest sample {:?}", report.closest);
    }
    Ok(())
}
