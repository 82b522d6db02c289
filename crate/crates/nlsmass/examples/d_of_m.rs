//! d(m) = inf ℐ along s·ω_μ: zero at m = m₁, unbounded below past it.

use nlsmass::normalized::d_of_m_probe;
use nlsmass::shooting::critical_ground_state;

pub fn main() -> nlsmass::Result<()> {
    let w = critical_ground_state(2)?;
    let m1 = w.mass()?;
    let sweep: Vec<f64> = (-3..=6).map(|k| 10f64.powi(k)).collect();
    for ratio in [0.5, 1.0, 1.5, 4.0] {
        let probe = d_of_m_probe(&w.profile, &w.spec, m1, ratio * m1, &sweep)?;
        println!(
            "m = {ratio} m₁: inf = {:+.4e}, trend {:?}, witness residual {:.1e}",
            probe.infimum, probe.trend, probe.witness.residual
        );
    }
    Ok(())
}
