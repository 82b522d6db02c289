//! Drive the command layer from code: configure, run, inspect the report.

use nlsmass::cli::{run, Command, RunConfig};

pub fn main() -> nlsmass::Result<()> {
    let mut cfg = RunConfig::from_json(r#"{ "spec": { "N": 3, "family": "pure_power" }, "params": { "mu": 2.0 } }"#)?;
    cfg.out = Some(std::env::temp_dir().join("nlsmass-run-report"));
    for command in [Command::VerifyIdentities, Command::Path] {
        let report = run(command, &cfg)?;
        println!("{} (config {}…):", command.name(), &report.config_hash[..12]);
        for c in &report.verdicts {
            println!(
                "  [{}] {} = {:.2e} (tol {:.0e})",
                if c.pass { "ok" } else { "FAIL" },
                c.name,
                c.value,
                c.tolerance
            );
        }
        println!("  artifacts: {}", report.artifacts.join(", "));
    }
    Ok(())
}
