//! SVG figure: the source domain with both level families, next to the
//! target annulus of every piece tiled by its shells.

use std::fmt::Write;

use crate::geometry::Point;
use crate::io::result::{PieceDocument, Polyline, ResultDocument};
use crate::mapper::Shell;

const PANEL: f64 = 400.0;
const MARGIN: f64 = 20.0;

/// Maps a box in the plane onto a panel, with `y` pointing up.
struct Frame {
    left: f64,
    min: Point,
    scale: f64,
}

impl Frame {
    fn fit(left: f64, min: Point, max: Point) -> Self {
        let span = (max.x - min.x).max(max.y - min.y).max(f64::MIN_POSITIVE);
        Self {
            left,
            min,
            scale: (PANEL - 2.0 * MARGIN) / span,
        }
    }

    fn centered(left: f64, radius: f64) -> Self {
        Self::fit(left, Point::new(-radius, -radius), Point::new(radius, radius))
    }

    fn x(&self, p: Point) -> f64 {
        self.left + MARGIN + (p.x - self.min.x) * self.scale
    }

    fn y(&self, p: Point) -> f64 {
        PANEL - MARGIN - (p.y - self.min.y) * self.scale
    }

    fn xy(&self, p: Point) -> String {
        format!("{:.2},{:.2}", self.x(p), self.y(p))
    }
}

fn polar(r: f64, phi: f64) -> Point {
    Point::new(r * phi.cos(), r * phi.sin())
}

fn bounds(pieces: &[PieceDocument]) -> (Point, Point) {
    let mut min = Point::new(f64::INFINITY, f64::INFINITY);
    let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pieces.iter().flat_map(|piece| &piece.positions) {
        min = Point::new(min.x.min(p.x), min.y.min(p.y));
        max = Point::new(max.x.max(p.x), max.y.max(p.y));
    }
    if !min.x.is_finite() {
        return (Point::new(0.0, 0.0), Point::new(1.0, 1.0));
    }
    (min, max)
}

/// Points closer than this many pixels to the previous kept point are dropped.
const MIN_STEP: f64 = 0.25;

fn polyline(out: &mut String, frame: &Frame, line: &Polyline, class: &str) {
    let mut kept: Vec<Point> = Vec::new();
    for (i, &p) in line.points.iter().enumerate() {
        let last = i + 1 == line.points.len();
        let near = kept
            .last()
            .is_some_and(|&q| (frame.x(p) - frame.x(q)).hypot(frame.y(p) - frame.y(q)) < MIN_STEP);
        if !near || last {
            kept.push(p);
        }
    }
    let points: Vec<String> = kept.iter().map(|&p| frame.xy(p)).collect();
    let tag = if line.closed { "polygon" } else { "polyline" };
    let _ = writeln!(out, r#"<{tag} class="{class}" points="{}"/>"#, points.join(" "));
}

/// Arc along radius `r` from `from` to `to`, split at the middle so that no
/// single arc exceeds half a turn.
fn arc(frame: &Frame, r: f64, from: f64, to: f64) -> String {
    let radius = r * frame.scale;
    let sweep = if to > from { 0 } else { 1 };
    let mid = 0.5 * (from + to);
    format!(
        "A {radius:.2} {radius:.2} 0 0 {sweep} {} A {radius:.2} {radius:.2} 0 0 {sweep} {}",
        frame.xy(polar(r, mid)),
        frame.xy(polar(r, to))
    )
}

fn shell(out: &mut String, frame: &Frame, s: &Shell) {
    let _ = writeln!(
        out,
        r#"<path class="shell" data-i="{}" data-j="{}" d="M {} L {} {} L {} {} Z"/>"#,
        s.index.i,
        s.index.j,
        frame.xy(polar(s.r_inner, s.phi_start)),
        frame.xy(polar(s.r_outer, s.phi_start)),
        arc(frame, s.r_outer, s.phi_start, s.phi_end),
        frame.xy(polar(s.r_inner, s.phi_end)),
        arc(frame, s.r_inner, s.phi_end, s.phi_start),
    );
}

fn circle(out: &mut String, frame: &Frame, r: f64, class: &str) {
    let c = Point::new(0.0, 0.0);
    let _ = writeln!(
        out,
        r#"<circle class="{class}" cx="{:.2}" cy="{:.2}" r="{:.2}"/>"#,
        frame.x(c),
        frame.y(c),
        r * frame.scale
    );
}

fn source_panel(out: &mut String, doc: &ResultDocument) {
    let (min, max) = bounds(&doc.pieces);
    let frame = Frame::fit(0.0, min, max);
    let _ = writeln!(out, r#"<g id="source">"#);
    for piece in &doc.pieces {
        let mut d = String::new();
        for cell in &piece.cells {
            let vs = cell.vertices();
            for (i, &v) in vs.iter().enumerate() {
                let cmd = if i == 0 { 'M' } else { 'L' };
                let _ = write!(d, "{cmd} {} ", frame.xy(piece.positions[v]));
            }
            d.push_str("Z ");
        }
        let _ = writeln!(out, r#"<path class="mesh" d="{}"/>"#, d.trim_end());
        for line in &piece.g_levels {
            polyline(out, &frame, line, "g-level");
        }
        for line in &piece.h_levels {
            polyline(out, &frame, line, "h-level");
        }
    }
    let _ = writeln!(out, "</g>");
}

fn target_panel(out: &mut String, index: usize, piece: &PieceDocument) {
    let target = &piece.target;
    let frame = Frame::centered(PANEL * (index + 1) as f64, target.outer_radius);
    let _ = writeln!(out, r#"<g id="target-{index}">"#);
    for cell in &piece.net_cells {
        shell(out, &frame, &cell.shell);
    }
    circle(out, &frame, target.inner_radius, "boundary");
    circle(out, &frame, target.outer_radius, "boundary");
    let _ = writeln!(out, "</g>");
}

/// Render `doc` as a standalone SVG document with one `class="shell"` path
/// per net cell.
pub fn to_svg(doc: &ResultDocument) -> String {
    let width = PANEL * (doc.pieces.len() + 1) as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{PANEL}" viewBox="0 0 {width} {PANEL}">"#
    );
    out.push_str(concat!(
        "<style>",
        ".mesh{fill:none;stroke:#bbb;stroke-width:0.4}",
        ".g-level{fill:none;stroke:#1f5fbf;stroke-width:0.8}",
        ".h-level{fill:none;stroke:#c0392b;stroke-width:0.8}",
        ".shell{fill:#f3e6c4;stroke:#555;stroke-width:0.4}",
        ".boundary{fill:none;stroke:#000;stroke-width:1}",
        "</style>\n"
    ));
    source_panel(&mut out, doc);
    for (i, piece) in doc.pieces.iter().enumerate() {
        target_panel(&mut out, i, piece);
    }
    out.push_str("</svg>\n");
    out
}
