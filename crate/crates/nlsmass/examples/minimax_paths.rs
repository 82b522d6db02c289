//! Energy along mountain-pass paths: the ray t·ω_μ, the optimal path through
//! the ground state (dilation in N = 3, three pieces in N = 2) and the ζ₀
//! barrier map for a saturated perturbation.

use nlsmass::functionals::FunctionalContext;
use nlsmass::nonlinearity::{NonlinearitySpec, Perturbation};
use nlsmass::paths::{optimal_path_profile, power_ray_profile, zeta0_segment_profile, Zeta0Params};
use nlsmass::shooting::critical_ground_state;

pub fn main() -> nlsmass::Result<()> {
    let ctx = FunctionalContext::with_critical_mass(NonlinearitySpec::critical(2)?, 0.0)?;
    let ray = power_ray_profile(&ctx, 2.0)?;
    println!("ray, N = 2: max {:+.2e} at t = {:.6}", ray.max, ray.argmax);

    for dim in [3usize, 2] {
        let u0 = critical_ground_state(dim)?;
        let path = optimal_path_profile(&u0)?;
        println!(
            "optimal path, N = {dim}: level {:.12}, max {:.12}, endpoint {:.4}, well formed {}",
            path.level,
            path.profile.max,
            path.endpoint,
            path.well_formed(1e-8)
        );
        println!("  {:?}", path.shape);
    }

    let spec = NonlinearitySpec::perturbed(2, Perturbation::Saturated { c: 1.0, a: 4.0, b: 0.5 })?;
    let ctx = FunctionalContext::with_critical_mass(spec.clone(), 0.0)?;
    let lambdas = [-6.0, -3.0, -1.0, 0.0, 3.0];
    let params = Zeta0Params::search(&spec, ctx.m1, -1.0, &lambdas)?;
    println!("ζ₀: T₀ = {}, T₁ = {}, A = {:.4}, barrier {:.4}", params.t0, params.t1, params.a, params.barrier(ctx.m1));
    for l in [-6.0, 0.0] {
        let z = zeta0_segment_profile(&ctx, l, &params)?;
        println!(
            "  λ = {l:+}: max along t·ζ₀ = {:.6}, Ψ(ζ₀) = {:.3}, M(ζ₀)/m₁ = {:.3}",
            z.profile.max,
            z.endpoint_psi,
            z.endpoint_mass / ctx.m1
        );
    }
    Ok(())
}
