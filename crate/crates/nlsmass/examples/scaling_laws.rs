//! Mass and energy scaling of w_{q,μ} in μ, fitted on a few solves.

use nlsmass::functionals::scaling_law_check;
use nlsmass::nonlinearity::NonlinearitySpec;

pub fn main() -> nlsmass::Result<()> {
    let mus = [0.25, 0.5, 1.0, 2.0, 4.0];
    for (dim, q) in [(3usize, 3.0), (3, 7.0 / 3.0), (2, 2.0), (2, 4.0)] {
        let r = scaling_law_check(&NonlinearitySpec::pure_power(dim, q)?, &mus, 1e-4)?;
        println!("N = {dim}, q = {q:.4}");
        println!("  d log M / d log μ = {:+.10} (expected {:+.10})", r.mass_slope.left, r.mass_slope.right);
        if let Some(e) = &r.energy_slope {
            println!("  d log|E| / d log μ = {:+.10} (expected {:+.10})", e.left, e.right);
        }
        if let Some(e) = &r.energy_ratio {
            println!("  E/(μM)             = {:+.10} (expected {:+.10})", e.left, e.right);
        }
    }
    Ok(())
}
