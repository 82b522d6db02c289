//! λ ↦ M(w_{e^λ}) and b(λ) for the pure power and a saturated perturbation,
//! with SVG plots. At the critical power the mass curve is flat at m₁ and
//! b ≡ 0; the perturbation bends both.

use nlsmass::nonlinearity::{NonlinearitySpec, Perturbation};
use nlsmass::normalized::sample_level_curve;
use nlsmass::plot::{emit_plot, PlotStyle, Reference};
use nlsmass::shooting::{critical_mass, ShootingOptions};

pub fn main() -> nlsmass::Result<()> {
    let m1 = critical_mass(2)?;
    let dir = std::env::temp_dir().join("nlsmass-mass-curve");
    std::fs::create_dir_all(&dir)?;
    let specs = [
        ("power", NonlinearitySpec::critical(2)?),
        ("saturated", NonlinearitySpec::perturbed(2, Perturbation::Saturated { c: 1.0, a: 4.0, b: 0.5 })?),
    ];
    for (name, spec) in specs {
        let curve = sample_level_curve(&spec, m1, (-8.0, 8.0), 33, &ShootingOptions::default())?;
        println!(
            "{name}: max |b| = {:.3e}, b_min = {:?}, a increasing = {}",
            curve.max_abs_b(),
            curve.b_min(),
            curve.a_increasing()
        );
        for s in curve.samples.iter().step_by(4) {
            println!(
                "  λ = {:+5.1}  M = {:.8}  b = {:+.6e}",
                s.lambda,
                s.mass.unwrap_or(f64::NAN),
                s.b_lambda.unwrap_or(f64::NAN)
            );
        }
        curve.write_csv(&dir.join(format!("{name}.csv")))?;
        let points = |f: fn(&nlsmass::normalized::CurveSample) -> Option<f64>| {
            curve.samples.iter().map(|s| (s.lambda, f(s).unwrap_or(f64::NAN))).collect::<Vec<_>>()
        };
        emit_plot(
            &points(|s| s.mass),
            &PlotStyle {
                title: format!("mass curve, {name}"),
                x_label: "λ".into(),
                y_label: "M".into(),
                reference: Some(Reference { label: "m₁".into(), y: m1 }),
            },
            &dir.join(format!("{name}_mass.svg")),
        )?;
        emit_plot(
            &points(|s| s.b_lambda),
            &PlotStyle {
                title: format!("b(λ), {name}"),
                x_label: "λ".into(),
                y_label: "b".into(),
                reference: Some(Reference { label: "0".into(), y: 0.0 }),
            },
            &dir.join(format!("{name}_b.svg")),
        )?;
    }
    println!("CSV and SVG files in {}", dir.display());
    Ok(())
}
