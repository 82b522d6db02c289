//! Static SVG line plots.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// A labelled horizontal line (the `m₁` level of a mass curve, the zero of `b(λ)`).
#[derive(Debug, Clone, PartialEq)]
pub struct Reference {
    pub label: String,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlotStyle {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub reference: Option<Reference>,
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let r = raw / mag;
    mag * if r < 1.5 {
        1.0
    } else if r < 3.5 {
        2.0
    } else if r < 7.5 {
        5.0
    } else {
        10.0
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders `curve` (non-finite points break the line) as an SVG document.
pub fn render_svg(curve: &[(f64, f64)], style: &PlotStyle) -> Result<String> {
    let finite: Vec<(f64, f64)> = curve.iter().copied().filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    if finite.is_empty() {
        return Err(Error::EmptyInput("nothing to plot".into()));
    }
    let (mut x0, mut x1) = finite.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (mut y0, mut y1) = finite.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    if let Some(r) = &style.reference {
        y0 = y0.min(r.y);
        y1 = y1.max(r.y);
    }
    for (lo, hi) in [(&mut x0, &mut x1), (&mut y0, &mut y1)] {
        if *hi - *lo <= 1e-12 * (1.0 + lo.abs().max(hi.abs())) {
            let pad = 0.5 * (1.0 + lo.abs());
            *lo -= pad;
            *hi += pad;
        } else {
            let pad = 0.05 * (*hi - *lo);
            *lo -= pad;
            *hi += pad;
        }
    }
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let py = |y: f64| H - BOTTOM - (y - y0) / (y1 - y0) * (H - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(&style.title)
    );
    let (bx, by) = (LEFT, H - BOTTOM);
    let _ = writeln!(s, r#"<path d="M{bx} {TOP} V{by} H{}" stroke="black" fill="none"/>"#, W - RIGHT);

    for (lo, hi, horizontal) in [(x0, x1, true), (y0, y1, false)] {
        let step = nice_step(hi - lo);
        let mut t = (lo / step).ceil() * step;
        while t <= hi {
            let label = format!("{}", (t / step).round() * step);
            let label = if label.len() > 8 { format!("{t:.2e}") } else { label };
            if horizontal {
                let x = px(t);
                let _ = writeln!(s, r#"<line x1="{x:.1}" y1="{by}" x2="{x:.1}" y2="{}" stroke="black"/>"#, by + 5.0);
                let _ = writeln!(s, r#"<text x="{x:.1}" y="{}" text-anchor="middle">{label}</text>"#, by + 18.0);
            } else {
                let y = py(t);
                let _ = writeln!(s, r#"<line x1="{}" y1="{y:.1}" x2="{bx}" y2="{y:.1}" stroke="black"/>"#, bx - 5.0);
                let _ = writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">{label}</text>"#, bx - 8.0, y + 4.0);
            }
            t += step;
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        H - 10.0,
        escape(&style.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        (TOP + H - BOTTOM) / 2.0,
        escape(&style.y_label)
    );
    if let Some(r) = &style.reference {
        let y = py(r.y);
        let _ = writeln!(
            s,
            r##"<line x1="{bx}" y1="{y:.1}" x2="{}" y2="{y:.1}" stroke="#c03030" stroke-dasharray="6 4"/>"##,
            W - RIGHT
        );
        let _ = writeln!(
            s,
            r##"<text x="{}" y="{:.1}" text-anchor="end" fill="#c03030">{}</text>"##,
            W - RIGHT - 4.0,
            y - 4.0,
            escape(&r.label)
        );
    }
    let mut d = String::new();
    let mut pen_down = false;
    for &(x, y) in curve {
        if !(x.is_finite() && y.is_finite()) {
            pen_down = false;
            continue;
        }
        let _ = write!(d, "{}{:.2} {:.2} ", if pen_down { "L" } else { "M" }, px(x), py(y));
        pen_down = true;
    }
    let _ = writeln!(s, r##"<path d="{}" stroke="#1f4e9c" stroke-width="1.5" fill="none"/>"##, d.trim_end());
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_plot(curve: &[(f64, f64)], style: &PlotStyle, path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(curve, style)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_curve_is_rejected() {
        assert!(matches!(render_svg(&[], &PlotStyle::default()), Err(Error::EmptyInput(_))));
        assert!(matches!(render_svg(&[(f64::NAN, 1.0)], &PlotStyle::default()), Err(Error::EmptyInput(_))));
    }

    #[test]
    fn flat_curve_sits_on_its_reference() {
        let curve: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 0.0)).collect();
        let style = PlotStyle { reference: Some(Reference { label: "0".into(), y: 0.0 }), ..PlotStyle::default() };
        let svg = render_svg(&curve, &style).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        let y_ref = H - BOTTOM - 0.5 * (H - TOP - BOTTOM);
        assert!(svg.contains(&format!("y1=\"{y_ref:.1}\"")));
        assert!(svg.contains(&format!("M{:.2} {y_ref:.2}", LEFT + (0.0 + 0.2) / 4.4 * (W - LEFT - RIGHT))));
    }

    #[test]
    fn gaps_break_the_line() {
        let curve = [(0.0, 1.0), (1.0, 2.0), (2.0, f64::NAN), (3.0, 1.5)];
        let svg = render_svg(&curve, &PlotStyle::default()).unwrap();
        let path = svg.lines().find(|l| l.contains("#1f4e9c")).unwrap();
        assert_eq!(path.matches('M').count(), 2);
    }

    #[test]
    fn text_is_escaped() {
        let style = PlotStyle { title: "a<b & c".into(), ..PlotStyle::default() };
        assert!(render_svg(&[(0.0, 0.0), (1.0, 1.0)], &style).unwrap().contains("a&lt;b &amp; c"));
    }
}
