//! Sample the structural hypotheses on g for the built-in perturbation families.

use nlsmass::nonlinearity::{NonlinearitySpec, Perturbation, Sampling};

pub fn main() -> nlsmass::Result<()> {
    let families = [
        ("saturated c=1 a=4 b=0.5", Perturbation::Saturated { c: 1.0, a: 4.0, b: 0.5 }),
        ("soave θ=0.5 q=1.5", Perturbation::Soave { theta: 0.5, q: 1.5 }),
        ("linear drift α=0.3", Perturbation::LinearDrift { alpha: 0.3 }),
        ("exp-quadratic k=1", Perturbation::ExpQuadratic { k: 1.0 }),
    ];
    let sampling = Sampling::default();
    println!("{:<26} {:>6} {:>6} {:>6} {:>8} {:>6} {:>6}", "h", "(g1)", "(g3)", "(g4)", "g ≥ s^p", "(ρ1)", "ρ→0");
    for (name, h) in families {
        let spec = NonlinearitySpec::perturbed(2, h)?;
        let v = |r: nlsmass::nonlinearity::HypothesisReport| format!("{:?}", r.verdict).to_lowercase();
        println!(
            "{:<26} {:>6} {:>6} {:>6} {:>8} {:>6} {:>6}",
            name,
            v(spec.check_g1(&sampling)),
            v(spec.check_g3(&sampling)),
            v(spec.check_g4(&sampling)),
            v(spec.check_cor15_bound(&sampling)),
            v(spec.check_rho1(&sampling)),
            v(spec.check_rho_small(&sampling)),
        );
        if let Ok(alpha) = spec.classify_alpha(&sampling) {
            println!("{:<26} lim ρ(s) as s → ∞: {alpha:?}", "");
        }
    }
    Ok(())
}
