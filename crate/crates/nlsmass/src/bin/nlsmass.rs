use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nlsmass::cli::{run, Command, RunConfig};
use nlsmass::nonlinearity::NonlinearitySpec;
use nlsmass::paths::PathKind;
use nlsmass::Result;

/// Ground states and normalized solutions of NLS at the L²-critical power.
///
/// Without --config the spec is the pure critical power in N = 2.
#[derive(Parser)]
#[command(name = "nlsmass", version)]
struct Cli {
    /// Run configuration, or a bare nonlinearity spec, as JSON.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; a `.csv` path names the ground-state file inside its parent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda_min: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda_max: Option<f64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Skip SVG output.
    #[arg(long, global = true)]
    no_plot: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Mu {
    #[arg(long)]
    mu: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Ray,
    Zeta0,
    Optimal,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve −Δw + μw = g(w) for the positive radial ground state.
    GroundState(Mu),
    /// Sample λ ↦ M(w_{e^λ}).
    MassCurve,
    /// Sample λ ↦ b(λ) = a(e^λ) − e^λ m₁.
    BLambda,
    /// Find λ with M(w_{e^λ}) = m₁.
    SolveNormalized,
    /// Sample the existence hypotheses on g.
    CheckExistence,
    /// Certify that no positive solution has mass m₁.
    CheckNonexistence,
    /// Nehari, Pohozaev and ground-state identities.
    VerifyIdentities(Mu),
    /// Descent flow in the augmented space.
    Flow {
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        step: Option<f64>,
        /// Start profile CSV (with its sidecar); defaults to 1.2·w_μ.
        #[arg(long)]
        start: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
    },
    /// Energy along a mountain-pass path.
    Path {
        #[arg(long, value_enum, default_value = "optimal")]
        kind: Kind,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
    },
    /// Probe d(m) along the dilation family of ω₁.
    DOfM {
        /// m / m₁
        #[arg(long)]
        mass_ratio: Option<f64>,
    },
}

fn configure(cli: &Cli) -> Result<(Command, RunConfig)> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::new(NonlinearitySpec::critical(2)?),
    };
    if let Some(out) = &cli.out {
        if out.extension().is_some_and(|e| e == "csv") {
            cfg.params.solution = out.file_name().map(PathBuf::from);
            cfg.out = Some(
                out.parent().map(PathBuf::from).filter(|p| !p.as_os_str().is_empty()).unwrap_or_else(|| ".".into()),
            );
        } else {
            cfg.out = Some(out.clone());
        }
    }
    macro_rules! set {
        ($src:expr => $dst:expr) => {
            if let Some(v) = $src {
                $dst = v;
            }
        };
    }
    set!(cli.tol => cfg.tol);
    set!(cli.lambda_min => cfg.lambda_min);
    set!(cli.lambda_max => cfg.lambda_max);
    set!(cli.samples => cfg.samples);
    set!(cli.seed => cfg.seed);
    if cli.no_plot {
        cfg.params.plot = false;
    }
    let p = &mut cfg.params;
    let command = match &cli.command {
        Cmd::GroundState(m) => {
            set!(m.mu => p.mu);
            Command::GroundState
        }
        Cmd::MassCurve => Command::MassCurve,
        Cmd::BLambda => Command::BLambda,
        Cmd::SolveNormalized => Command::SolveNormalized,
        Cmd::CheckExistence => Command::CheckExistence,
        Cmd::CheckNonexistence => Command::CheckNonexistence,
        Cmd::VerifyIdentities(m) => {
            set!(m.mu => p.mu);
            Command::VerifyIdentities
        }
        Cmd::Flow { steps, step, start, lambda } => {
            set!(*steps => p.steps);
            set!(*step => p.step);
            set!(*lambda => p.lambda);
            if start.is_some() {
                p.start = start.clone();
            }
            Command::Flow
        }
        Cmd::Path { kind, mu, lambda, t_max } => {
            p.path_kind = match kind {
                Kind::Ray => PathKind::Ray,
                Kind::Zeta0 => PathKind::Zeta0,
                Kind::Optimal => PathKind::Optimal,
            };
            set!(*mu => p.mu);
            set!(*lambda => p.lambda);
            set!(*t_max => p.t_max);
            Command::Path
        }
        Cmd::DOfM { mass_ratio } => {
            set!(*mass_ratio => p.mass_ratio);
            Command::DOfM
        }
    };
    cfg.validate()?;
    Ok((command, cfg))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure(&cli).and_then(|(command, cfg)| {
        let report = run(command, &cfg)?;
        Ok((report, cfg.out_dir()))
    });
    match result {
        Ok((report, dir)) => {
            for c in &report.verdicts {
                println!(
                    "{:4}  {}  (value {:.3e}, tolerance {:.1e})",
                    if c.pass { "ok" } else { "FAIL" },
                    c.name,
                    c.value,
                    c.tolerance
                );
            }
            println!("{} artifacts in {} ({} ms)", report.artifacts.len() + 1, dir.display(), report.elapsed_ms);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("nlsmass: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
