//! File emitters: SVG renderings of step domains and CSV tables.

use std::fmt::Write as _;

use abcf_core::attractor::{Component, Coord, StepDomain};
use abcf_core::measure::PiecewiseDensity;
use abcf_core::sofic::TransitionMatrix;

/// The rendered width and height of a domain picture, in pixels.
const SVG_SIZE: f64 = 640.0;
const SVG_PAD: f64 = 24.0;

fn finite_range(values: impl Iterator<Item = Coord>) -> (f64, f64, bool, bool) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut open_lo, mut open_hi) = (false, false);
    for c in values {
        match c {
            Coord::NegInf => open_lo = true,
            Coord::PosInf => open_hi = true,
            other => {
                let v = other.to_f64();
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    if !lo.is_finite() {
        lo = -1.0;
        hi = 1.0;
    }
    (lo, hi, open_lo, open_hi)
}

/// Renders the rectangles as an SVG picture.
///
/// Unbounded coordinates are clipped for display only; every rectangle
/// carries its exact corner values in a `<title>` element.
pub fn svg_of(domain: &StepDomain, caption: &str) -> String {
    // Clip unbounded sides a visible margin beyond the last finite level.
    let clipped = |lo: f64, hi: f64, open_lo: bool, open_hi: bool| {
        let span = (hi - lo).max(1.0);
        (
            if open_lo { lo - 0.15 * span } else { lo },
            if open_hi { hi + 0.15 * span } else { hi },
        )
    };
    let (u_lo, u_hi, u_open_lo, u_open_hi) = finite_range(
        domain
            .all_rects()
            .flat_map(|(r, _)| [r.u_lo.clone(), r.u_hi.clone()]),
    );
    let (u_min, u_max) = clipped(u_lo, u_hi, u_open_lo, u_open_hi);
    let (w_lo, w_hi, w_open_lo, w_open_hi) = finite_range(
        domain
            .all_rects()
            .flat_map(|(r, _)| [r.w_lo.clone(), r.w_hi.clone()]),
    );
    let (w_min, w_max) = clipped(w_lo, w_hi, w_open_lo, w_open_hi);
    let scale_x = (SVG_SIZE - 2.0 * SVG_PAD) / (u_max - u_min).max(1e-9);
    let scale_y = (SVG_SIZE - 2.0 * SVG_PAD) / (w_max - w_min).max(1e-9);
    let to_x = |u: f64| SVG_PAD + (u.clamp(u_min, u_max) - u_min) * scale_x;
    let to_y = |w: f64| SVG_SIZE - SVG_PAD - (w.clamp(w_min, w_max) - w_min) * scale_y;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {SVG_SIZE} {SVG_SIZE}\">"
    );
    let _ = writeln!(out, "  <!-- {caption} -->");
    let _ = writeln!(
        out,
        "  <rect x=\"0\" y=\"0\" width=\"{SVG_SIZE}\" height=\"{SVG_SIZE}\" fill=\"white\"/>"
    );
    for (rect, component) in domain.all_rects() {
        let fill = match component {
            Component::Upper => "#4e79a7",
            Component::Lower => "#e15759",
        };
        let x0 = to_x(rect.u_lo.to_f64());
        let x1 = to_x(rect.u_hi.to_f64());
        let y0 = to_y(rect.w_hi.to_f64());
        let y1 = to_y(rect.w_lo.to_f64());
        let _ = writeln!(
            out,
            "  <rect x=\"{:.3}\" y=\"{:.3}\" width=\"{:.3}\" height=\"{:.3}\" \
             fill=\"{fill}\" fill-opacity=\"0.65\" stroke=\"#333333\" stroke-width=\"0.7\">\
             <title>u in [{}, {}], w in [{}, {}]</title></rect>",
            x0,
            y0,
            (x1 - x0).max(0.0),
            (y1 - y0).max(0.0),
            rect.u_lo,
            rect.u_hi,
            rect.w_lo,
            rect.w_hi,
        );
    }
    out.push_str("</svg>\n");
    out
}

/// The transition matrix as a CSV table with labeled rows and columns.
pub fn matrix_csv(tm: &TransitionMatrix) -> String {
    let mut out = String::from("from\\to");
    for label in &tm.labels {
        let _ = write!(out, ",{label}");
    }
    out.push('\n');
    for (i, label) in tm.labels.iter().enumerate() {
        let _ = write!(out, "{label}");
        for j in 0..tm.size() {
            let _ = write!(out, ",{}", if tm.entry(i, j) { 1 } else { 0 });
        }
        out.push('\n');
    }
    out
}

/// The normalized density sampled on an even grid over `[a, b)`, as
/// `x,density` rows.
pub fn density_csv(dens: &PiecewiseDensity, a: f64, b: f64, points: usize) -> String {
    let mut out = String::from("x,density\n");
    for i in 0..points {
        let x = a + (b - a) * (i as f64 + 0.5) / points as f64;
        if let Ok(v) = dens.density_at(x) {
            let _ = writeln!(out, "{x:.9},{v:.12}");
        }
    }
    out
}
