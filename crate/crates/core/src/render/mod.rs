//! SVG figures: phase portraits, periodgons and bifurcation disks.
//!
//! Every figure is first built as a [`Scene`] in data coordinates and then
//! written into a fixed `1000 x 1000` view box with a 5% margin. Output depends
//! only on the inputs, byte for byte.

mod disk;
mod figure;
mod phase;

pub use disk::{bifurcation_disk, disk_scene, DiskOptions};
pub use figure::{periodgon_figure, periodgon_scene, PeriodgonOptions};
pub use phase::{phase_portrait, phase_scene, PhaseOptions};

use std::fmt::Write as _;

use num_complex::Complex64;

const VIEW: f64 = 1000.0;
const MARGIN: f64 = 0.05;

const PALETTE: [&str; 10] =
    ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2", "#bcbd22", "#7f7f7f"];

/// Fixed color of singular point `index`.
pub fn palette(index: usize) -> &'static str {
    PALETTE[index % PALETTE.len()]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Style {
    pub stroke: &'static str,
    pub fill: &'static str,
    /// Line width in view-box units.
    pub width: f64,
    pub dash: Option<&'static str>,
}

impl Style {
    pub fn line(stroke: &'static str, width: f64) -> Self {
        Self { stroke, fill: "none", width, dash: None }
    }

    pub fn filled(fill: &'static str) -> Self {
        Self { stroke: "#000000", fill, width: 1.0, dash: None }
    }

    pub fn dashed(mut self, pattern: &'static str) -> Self {
        self.dash = Some(pattern);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    Circle,
    Square,
    Diamond,
    Cross,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    /// One `<path>` with a sub-path per piece.
    Path { pieces: Vec<Vec<Complex64>>, closed: bool, style: Style },
    /// `size` is the half-width in view-box units.
    Point { at: Complex64, marker: Marker, size: f64, style: Style },
    Label { at: Complex64, text: String, size: f64, color: &'static str },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    /// Written as the group's `class`.
    pub name: String,
    pub items: Vec<Item>,
}

impl Layer {
    pub fn new(name: &str) -> Self {
        Self { name: name.to_string(), items: Vec::new() }
    }
}

impl Item {
    pub fn polyline(points: Vec<Complex64>, style: Style) -> Self {
        Item::Path { pieces: vec![points], closed: false, style }
    }

    pub fn polygon(points: Vec<Complex64>, style: Style) -> Self {
        Item::Path { pieces: vec![points], closed: true, style }
    }
}

/// Figure in data coordinates: `bounds = (xmin, ymin, xmax, ymax)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub bounds: (f64, f64, f64, f64),
    pub layers: Vec<Layer>,
}

impl Scene {
    pub fn new(bounds: (f64, f64, f64, f64)) -> Self {
        Self { bounds, layers: Vec::new() }
    }

    /// Square bounds centered at `c` with half-width `r`.
    pub fn centered(c: Complex64, r: f64) -> Self {
        Self::new((c.re - r, c.im - r, c.re + r, c.im + r))
    }

    pub fn layer(&self, name: &str) -> Option<&Layer> {
        self.layers.iter().find(|l| l.name == name)
    }

    /// Every coordinate is finite.
    pub fn is_finite(&self) -> bool {
        let (a, b, c, d) = self.bounds;
        let ok = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        [a, b, c, d].iter().all(|x| x.is_finite())
            && self.layers.iter().flat_map(|l| &l.items).all(|it| match it {
                Item::Path { pieces, .. } => pieces.iter().flatten().all(ok),
                Item::Point { at, .. } | Item::Label { at, .. } => ok(at),
            })
    }

    pub fn to_svg(&self) -> String {
        let map = Mapping::new(self.bounds);
        let mut out = String::new();
        let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{v}" height="{v}" viewBox="0 0 {v} {v}">"#,
            v = VIEW
        );
        let _ = writeln!(out, r##"<rect x="0" y="0" width="{v}" height="{v}" fill="#ffffff"/>"##, v = VIEW);
        let lo = MARGIN * VIEW;
        let side = VIEW - 2.0 * lo;
        let _ = writeln!(
            out,
            r#"<defs><clipPath id="plot"><rect x="{lo}" y="{lo}" width="{side}" height="{side}"/></clipPath></defs>"#
        );
        for layer in &self.layers {
            let _ = writeln!(out, r#"<g class="{}" clip-path="url(#plot)">"#, escape(&layer.name));
            for it in &layer.items {
                write_item(&mut out, &map, it);
            }
            out.push_str("</g>\n");
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Data to view box: uniform scale, `y` up.
struct Mapping {
    cx: f64,
    cy: f64,
    scale: f64,
}

impl Mapping {
    fn new((x0, y0, x1, y1): (f64, f64, f64, f64)) -> Self {
        let span = (x1 - x0).max(y1 - y0).max(1e-300);
        Self { cx: 0.5 * (x0 + x1), cy: 0.5 * (y0 + y1), scale: (1.0 - 2.0 * MARGIN) * VIEW / span }
    }

    fn apply(&self, z: Complex64) -> (f64, f64) {
        (0.5 * VIEW + (z.re - self.cx) * self.scale, 0.5 * VIEW - (z.im - self.cy) * self.scale)
    }
}

fn num(x: f64) -> String {
    let r = (x * 1000.0).round() / 1000.0;
    // Avoid "-0".
    format!("{}", if r == 0.0 { 0.0 } else { r })
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn style_attrs(s: &Style) -> String {
    let mut a = format!(r#"stroke="{}" fill="{}" stroke-width="{}""#, s.stroke, s.fill, num(s.width));
    if let Some(d) = s.dash {
        let _ = write!(a, r#" stroke-dasharray="{d}""#);
    }
    a
}

fn write_item(out: &mut String, map: &Mapping, it: &Item) {
    match it {
        Item::Path { pieces, closed, style } => {
            let mut d = String::new();
            for piece in pieces.iter().filter(|p| p.len() >= 2) {
                for (i, z) in piece.iter().enumerate() {
                    let (x, y) = map.apply(*z);
                    let sep = if d.is_empty() { "" } else { " " };
                    let _ = write!(d, "{sep}{}{} {}", if i == 0 { "M" } else { "L" }, num(x), num(y));
                }
                if *closed {
                    d.push_str(" Z");
                }
            }
            if d.is_empty() {
                return;
            }
            let _ = writeln!(out, r#"<path d="{d}" {} stroke-linejoin="round"/>"#, style_attrs(style));
        }
        Item::Point { at, marker, size, style } => {
            let (x, y) = map.apply(*at);
            let a = style_attrs(style);
            let _ = match marker {
                Marker::Circle => writeln!(out, r#"<circle cx="{}" cy="{}" r="{}" {a}/>"#, num(x), num(y), num(*size)),
                Marker::Square => writeln!(
                    out,
                    r#"<rect x="{}" y="{}" width="{}" height="{}" {a}/>"#,
                    num(x - size),
                    num(y - size),
                    num(2.0 * size),
                    num(2.0 * size)
                ),
                Marker::Diamond => writeln!(
                    out,
                    r#"<path d="M{} {} L{} {} L{} {} L{} {} Z" {a}/>"#,
                    num(x),
                    num(y - size),
                    num(x + size),
                    num(y),
                    num(x),
                    num(y + size),
                    num(x - size),
                    num(y)
                ),
                Marker::Cross => writeln!(
                    out,
                    r#"<path d="M{} {} L{} {} M{} {} L{} {}" {a}/>"#,
                    num(x - size),
                    num(y - size),
                    num(x + size),
                    num(y + size),
                    num(x - size),
                    num(y + size),
                    num(x + size),
                    num(y - size)
                ),
            };
        }
        Item::Label { at, text, size, color } => {
            let (x, y) = map.apply(*at);
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="{}" fill="{color}" text-anchor="middle" dominant-baseline="middle">{}</text>"#,
                num(x),
                num(y),
                num(*size),
                escape(text)
            );
        }
    }
}

/// Pieces of `points` worth drawing in the square of half-width `r` about `c`:
/// far points are pulled in radially to `3r` (keeping their direction), and
/// runs lying wholly outside the square are dropped.
pub(crate) fn clip_polyline(points: &[Complex64], c: Complex64, r: f64) -> Vec<Vec<Complex64>> {
    let far = 3.0 * r;
    let inside = |z: &Complex64| (z.re - c.re).abs() <= 1.05 * r && (z.im - c.im).abs() <= 1.05 * r;
    let mut out = Vec::new();
    let mut run: Vec<(Complex64, bool)> = Vec::new();
    let flush = |run: &mut Vec<(Complex64, bool)>, out: &mut Vec<Vec<Complex64>>| {
        let n = run.len();
        let mut piece = Vec::new();
        for i in 0..n {
            let keep = run[i].1 || (i > 0 && run[i - 1].1) || (i + 1 < n && run[i + 1].1);
            if keep {
                piece.push(run[i].0);
            } else if piece.len() >= 2 {
                out.push(std::mem::take(&mut piece));
            } else {
                piece.clear();
            }
        }
        if piece.len() >= 2 {
            out.push(piece);
        }
        run.clear();
    };
    for z in points {
        if !(z.re.is_finite() && z.im.is_finite()) {
            flush(&mut run, &mut out);
            continue;
        }
        let d = z - c;
        let z = if d.norm() > far { c + d * (far / d.norm()) } else { *z };
        run.push((z, inside(&z)));
    }
    flush(&mut run, &mut out);
    out
}
