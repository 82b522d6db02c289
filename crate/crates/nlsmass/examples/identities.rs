//! The ground-state identity suite and the sharp Gagliardo–Nirenberg constant.

use std::sync::Arc;

use nlsmass::functionals::{critical_identity_from, gn_constant, gn_quotient, pohozaev_from, psi_mu_from, Moments};
use nlsmass::grid::RadialGrid;
use nlsmass::profiles::random_profile;
use nlsmass::shooting::critical_ground_state;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn main() -> nlsmass::Result<()> {
    for dim in [2usize, 3] {
        let w = critical_ground_state(dim)?;
        let n = dim as f64;
        let m = Moments::of(&w.profile, &w.spec)?;
        let m1 = 0.5 * m.l2;
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
        println!("N = {dim}: m₁ = {m1:.15}");
        println!("  ‖∇ω₁‖² / (N m₁)             − 1 = {:.1e}", rel(m.grad, n * m1));
        println!("  ‖ω₁‖_{{p+1}}^{{p+1}} / ((N+2) m₁) − 1 = {:.1e}", rel(m.lp, (n + 2.0) * m1));
        println!("  Ψ₀₁(ω₁) / m₁                − 1 = {:.1e}", rel(psi_mu_from(&m, 1.0), m1));
        println!("  P(0, ω₁) / ‖ω₁‖²               = {:.1e}", pohozaev_from(&m, 1.0, dim) / m.l2);
        let id = critical_identity_from(&m, dim);
        println!("  r1 = {:.1e}, r2 = {:.1e}", id.r1, id.r2);

        let c = gn_constant(m1, dim);
        println!("  C_GN = {c:.12}, quotient(ω₁) = {:.12}", gn_quotient(&w.profile)?);
        let grid = Arc::new(RadialGrid::uniform(dim, 30.0, 4096)?);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let worst = (0..200)
            .map(|_| gn_quotient(&random_profile(&mut rng, grid.clone(), false)?))
            .collect::<nlsmass::Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        println!("  largest quotient over 200 random profiles: {worst:.6} ({:.1}% of C_GN)", 100.0 * worst / c);
    }
    Ok(())
}
