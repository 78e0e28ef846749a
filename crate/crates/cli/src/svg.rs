//! Static SVG figure of a generating curve.

use std::fmt::Write;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 640.0;
const MARGIN: f64 = 32.0;

/// The curve `(f(t), t)`, its mirror `(−f(t), t)`, and the circles at
/// heights `±z` drawn edge-on as dashed segments.
pub fn profile_figure(a: f64, points: &[(f64, f64)], z: Option<f64>) -> String {
    let f_max = points.iter().map(|p| p.1).fold(a, f64::max);
    let t_max = points
        .iter()
        .map(|p| p.0.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let sx = (WIDTH / 2.0 - MARGIN) / f_max;
    let sy = (HEIGHT / 2.0 - MARGIN) / t_max;
    let px = |x: f64| WIDTH / 2.0 + sx * x;
    let py = |t: f64| HEIGHT / 2.0 - sy * t;
    let line = |sign: f64| {
        points
            .iter()
            .map(|&(t, f)| format!("{:.3},{:.3}", px(sign * f), py(t)))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<title>generating curve, a = {a}</title>"#);
    let _ = writeln!(
        out,
        r##"<line x1="{0:.3}" y1="0" x2="{0:.3}" y2="{HEIGHT}" stroke="#bbbbbb" stroke-width="0.5"/>"##,
        px(0.0)
    );
    for sign in [1.0, -1.0] {
        let _ = writeln!(
            out,
            r##"<polyline fill="none" stroke="#1f4e9c" stroke-width="1.2" points="{}"/>"##,
            line(sign)
        );
    }
    if let Some(z) = z {
        let rz = radius_at(points, z);
        for h in [z, -z] {
            let _ = writeln!(
                out,
                r##"<line x1="{:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" stroke="#c0392b" stroke-width="1" stroke-dasharray="4 3"/>"##,
                px(-rz),
                px(rz),
                y = py(h)
            );
            let _ = writeln!(
                out,
                r##"<text x="{:.3}" y="{:.3}" font-size="11" fill="#c0392b">t = {:.6}</text>"##,
                px(rz) + 4.0,
                py(h) + 4.0,
                h
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// `f` at height `t` by linear interpolation of the sampled curve.
fn radius_at(points: &[(f64, f64)], t: f64) -> f64 {
    points
        .windows(2)
        .find(|w| w[0].0 <= t && t <= w[1].0)
        .map(|w| {
            let s = if w[1].0 > w[0].0 {
                (t - w[0].0) / (w[1].0 - w[0].0)
            } else {
                0.0
            };
            w[0].1 + s * (w[1].1 - w[0].1)
        })
        .unwrap_or_else(|| points.last().map_or(0.0, |p| p.1))
}
