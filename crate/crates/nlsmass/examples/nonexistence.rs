//! Soave-type defocusing perturbation: r2 > 0 at every ground state, so r1 < 0,
//! and Gagliardo–Nirenberg then keeps every mass strictly above m₁.

use nlsmass::nonlinearity::{NonlinearitySpec, Perturbation};
use nlsmass::normalized::{certify_nonexistence, NormalizedOptions};
use nlsmass::shooting::critical_mass;

pub fn main() -> nlsmass::Result<()> {
    let spec = NonlinearitySpec::perturbed(2, Perturbation::Soave { theta: 0.5, q: 1.5 })?;
    let m1 = critical_mass(2)?;
    let opts = NormalizedOptions { count: 17, ..NormalizedOptions::default() };
    let cert = certify_nonexistence(&spec, m1, &opts)?;
    println!("(ρ1): {:?}", cert.rho1.verdict);
    println!("{:>6} {:>12} {:>12} {:>12}", "λ", "M/m₁", "r1", "r2");
    for s in &cert.samples {
        println!("{:>6.2} {:>12.8} {:>12.4e} {:>12.4e}", s.lambda, s.mass / m1, s.r1, s.r2);
    }
    println!("largest |r1 + r2|/(|r1| + |r2|) = {:.1e}", cert.max_identity_residual);
    println!("mass gap ≥ {:.4}, r2 > 0 everywhere: {}", cert.min_mass_gap, cert.all_r2_positive);
    println!("certificate issued: {}", cert.issued);
    Ok(())
}
