//! Circle diagram in the `(a, c)` plane. Geometry is written in
//! mathematical coordinates; one top-level `scale(1,-1)` puts `c` upward.

use std::fmt::Write;

use hallbounds_core::bounds_hs::{hs_geometry, Boundary, HsBound, HsEvaluation};

const MARGIN: f64 = 0.1;
const WIDTH_PX: f64 = 640.0;

#[derive(Debug, Clone, Copy)]
struct Extent {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Extent {
    fn new() -> Self {
        Extent { x0: f64::INFINITY, x1: f64::NEG_INFINITY, y0: f64::INFINITY, y1: f64::NEG_INFINITY }
    }

    fn point(&mut self, x: f64, y: f64) {
        self.x(x);
        self.y(y);
    }

    fn x(&mut self, x: f64) {
        self.x0 = self.x0.min(x);
        self.x1 = self.x1.max(x);
    }

    fn y(&mut self, y: f64) {
        self.y0 = self.y0.min(y);
        self.y1 = self.y1.max(y);
    }

    fn padded(self) -> Self {
        let w = (self.x1 - self.x0).max(1e-9 * self.x1.abs().max(1.0));
        let h = (self.y1 - self.y0).max(1e-9 * self.y1.abs().max(1.0));
        Extent {
            x0: self.x0 - MARGIN * w,
            x1: self.x1 + MARGIN * w,
            y0: self.y0 - MARGIN * h,
            y1: self.y1 + MARGIN * h,
        }
    }
}

fn boundary(out: &mut String, b: &Boundary, class: &str, ext: &Extent) {
    match b {
        Boundary::Circle(d) => {
            let _ = writeln!(
                out,
                r#"    <circle class="{class}" cx="{}" cy="{}" r="{}"/>"#,
                d.center.0, d.center.1, d.radius
            );
        }
        Boundary::VerticalLine { a } => {
            let _ = writeln!(
                out,
                r#"    <line class="{class}" x1="{a}" y1="{}" x2="{a}" y2="{}"/>"#,
                ext.y0, ext.y1
            );
        }
    }
}

/// SVG 1.1 document: dashed phase circles, solid HS circles, markers at the
/// two phases and at `(a_Y, −c_Y)`, and ticks at the tangency points on the
/// `c` axis. When `a₁ = a₂` one pair of circles degenerates to a vertical line.
pub fn render_plot(eval: &HsEvaluation) -> String {
    let geom = hs_geometry(&eval.coefficients);
    let [p1, p2] = eval.phases;
    let points = [("phase-point", p1.a, p1.c), ("phase-point", p2.a, p2.c), ("y-point", eval.y.a_y, -eval.y.c_y)];
    let tangents: Vec<f64> = [eval.coefficients.plus, eval.coefficients.minus]
        .iter()
        .filter_map(|b| match b {
            HsBound::Disk(h) => Some(h.alpha),
            HsBound::HalfPlane { .. } => None,
        })
        .collect();

    let mut ext = Extent::new();
    for b in geom.phase.iter().chain(geom.hs.iter()) {
        match b {
            Boundary::Circle(d) => {
                ext.point(d.center.0 - d.radius, d.center.1 - d.radius);
                ext.point(d.center.0 + d.radius, d.center.1 + d.radius);
            }
            Boundary::VerticalLine { a } => ext.x(*a),
        }
    }
    for &(_, x, y) in &points {
        ext.point(x, y);
    }
    for &t in &tangents {
        ext.point(0.0, t);
    }
    let ext = ext.padded();
    let (w, h) = (ext.x1 - ext.x0, ext.y1 - ext.y0);
    let mark = 0.012 * w.max(h);
    let height_px = (WIDTH_PX * h / w).clamp(120.0, 4.0 * WIDTH_PX).round();

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH_PX}" height="{height_px}" viewBox="{} {} {w} {h}">"#,
        ext.x0, -ext.y1
    );
    out.push_str(
        "  <style>\n\
         \x20   * { vector-effect: non-scaling-stroke; fill: none; stroke-width: 1.5px; }\n\
         \x20   .axis { stroke: #999; stroke-width: 1px; }\n\
         \x20   .phase { stroke: #1f77b4; stroke-dasharray: 6 4; }\n\
         \x20   .hs { stroke: #d62728; }\n\
         \x20   .tangent { stroke: #2ca02c; stroke-width: 3px; }\n\
         \x20   .phase-point { stroke: #1f77b4; stroke-width: 2px; }\n\
         \x20   .y-point { stroke: #000; stroke-width: 2px; }\n\
         \x20 </style>\n",
    );
    let _ = writeln!(out, r#"  <g transform="scale(1,-1)">"#);
    let _ = writeln!(out, r#"    <line class="axis" x1="0" y1="{}" x2="0" y2="{}"/>"#, ext.y0, ext.y1);
    let _ = writeln!(out, r#"    <line class="axis" x1="{}" y1="0" x2="{}" y2="0"/>"#, ext.x0, ext.x1);
    for b in &geom.phase {
        boundary(&mut out, b, "phase", &ext);
    }
    for b in &geom.hs {
        boundary(&mut out, b, "hs", &ext);
    }
    for &t in &tangents {
        let _ = writeln!(out, r#"    <line class="tangent" x1="{}" y1="{t}" x2="{mark}" y2="{t}"/>"#, -mark);
    }
    for &(class, x, y) in &points {
        let _ = writeln!(
            out,
            r#"    <path class="{class}" d="M {} {} L {} {} M {} {} L {} {}"/>"#,
            x - mark,
            y - mark,
            x + mark,
            y + mark,
            x - mark,
            y + mark,
            x + mark,
            y - mark
        );
    }
    let _ = writeln!(out, "  </g>");
    let _ = writeln!(out, "</svg>");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use hallbounds_core::bounds_hs::evaluate_hs;
    use hallbounds_core::TIConductivity;

    fn ti(a: f64, b: f64, c: f64) -> TIConductivity {
        TIConductivity::new(a, b, c).unwrap()
    }

    #[test]
    fn generic_structure() {
        let e = evaluate_hs(0.5, ti(4.0, 2.0, 1.0), ti(1.0, 1.0, -0.5), ti(2.0, 1.3, 0.2), 1e-9).unwrap();
        let s = render_plot(&e);
        assert_eq!(s.matches("<circle").count(), 4);
        assert_eq!(s.matches("<path").count(), 3);
        assert_eq!(s.matches(r#"class="tangent""#).count(), 2);
        assert!(s.contains(r#"transform="scale(1,-1)""#));
    }

    #[test]
    fn degenerate_draws_vertical_lines() {
        let e = evaluate_hs(0.5, ti(2.0, 2.0, 1.0), ti(2.0, 1.0, -1.0), ti(2.0, 1.3, 0.1), 1e-9).unwrap();
        let s = render_plot(&e);
        assert_eq!(s.matches("<circle").count(), 2);
        assert_eq!(s.matches(r#"<line class="phase""#).count(), 1);
        assert_eq!(s.matches(r#"<line class="hs""#).count(), 1);
    }
}
