//! Shoot for the ground state of −Δw + μw = |w|^{p−1}w and write it to disk.
//!
//! cargo run --release --example ground_state -- [N] [mu]

use nlsmass::grid::{read_radial_csv, write_radial_csv};
use nlsmass::nonlinearity::NonlinearitySpec;
use nlsmass::shooting::{solve_ground_state, ShootingOptions};

pub fn main() -> nlsmass::Result<()> {
    let mut args = std::env::args().skip(1);
    let dim: usize = args.next().map(|s| s.parse().expect("N")).unwrap_or(2);
    let mu: f64 = args.next().map(|s| s.parse().expect("mu")).unwrap_or(1.0);

    let spec = NonlinearitySpec::critical(dim)?;
    let sol = solve_ground_state(&spec, mu, &ShootingOptions::default())?;
    let d = &sol.diagnostics;
    println!("N = {dim}, μ = {mu}");
    println!("  w(0)          = {:.15}", sol.w0);
    println!("  mass ½‖w‖²    = {:.15}", sol.mass()?);
    println!("  nehari resid. = {:.2e}", d.nehari_residual);
    println!("  pohozaev res. = {:.2e}", d.pohozaev_residual);
    println!("  grid          = R_max {:.1}, K {}", sol.profile.grid().r_max(), sol.profile.grid().intervals());
    println!("  tail starts   = r {:.2}", d.cut_radius);

    let dir = std::env::temp_dir().join("nlsmass-ground-state");
    std::fs::create_dir_all(&dir)?;
    let csv = dir.join("w.csv");
    write_radial_csv(&sol.profile, Some(mu), &csv)?;
    let (back, side) = read_radial_csv(&csv)?;
    assert_eq!(back.values(), sol.profile.values());
    println!("wrote {} (sidecar μ = {:?}); values round-trip exactly", csv.display(), side.mu);
    Ok(())
}
