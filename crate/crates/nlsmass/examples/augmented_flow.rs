//! The augmented functional J(θ, λ, u) = I(λ, u(e^{−θ}·)): its dilation
//! invariance, the Pohozaev derivative, and a short descent flow with
//! PSPC telemetry.

use nlsmass::augmented::{descent_flow, dj, j_eval, upsilon, AugmentedPoint, FlowOptions};
use nlsmass::functionals::{pohozaev_p, FunctionalContext};
use nlsmass::nonlinearity::NonlinearitySpec;
use nlsmass::shooting::critical_ground_state;

pub fn main() -> nlsmass::Result<()> {
    let ctx = FunctionalContext::with_critical_mass(NonlinearitySpec::critical(2)?, 0.0)?;
    let w = critical_ground_state(2)?.profile.clone();
    let pt = AugmentedPoint::new(0.3, 0.0, w.scale(0.9))?;
    let j = j_eval(&pt, &ctx)?;
    for tau in [-1.0, -0.5, 0.5, 1.0] {
        println!("J(Φ_τ η) − J(η) at τ = {tau:+}: {:+.2e}", j_eval(&pt.act(tau)?, &ctx)? - j);
    }
    println!("J(Υη) − J(η) = {:+.2e}", j_eval(&upsilon(&pt), &ctx)? - j);
    let d = dj(&pt, &ctx)?;
    println!("∂_θJ = {:+.10}, P(λ, u_θ) = {:+.10}", d.dtheta, pohozaev_p(&pt.physical()?, &ctx)?);

    let start = AugmentedPoint::new(0.0, 0.0, w.scale(1.2))?;
    let out = descent_flow(&start, &ctx, &FlowOptions { n_steps: 40, ..FlowOptions::default() })?;
    println!("{:>5} {:>14} {:>12} {:>12}", "step", "J", "|∂λJ|", "PSPC");
    for s in out.trajectory.iter().step_by(5) {
        println!("{:>5} {:>14.6e} {:>12.4e} {:>12.4e}", s.step, s.record.j, s.record.dlambda, s.record.pspc);
    }
    println!("stopped: {:?}", out.stop);
    Ok(())
}
