use num_complex::Complex64;

use super::{palette, Item, Layer, Marker, Scene, Style};
use crate::periodgon::{horizontal_chords, Chord, Periodgon};

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodgonOptions {
    pub labels: bool,
    /// Overlay the horizontal interior chords.
    pub chords: bool,
    /// Extra chords to draw, e.g. those of another fiber rotation.
    pub extra_chords: Vec<Chord>,
}

impl Default for PeriodgonOptions {
    fn default() -> Self {
        Self { labels: true, chords: true, extra_chords: Vec::new() }
    }
}

/// Layers `edges` (one path per edge, colored by center), `vertices`, `labels`, `chords`.
pub fn periodgon_scene(p: &Periodgon, opts: &PeriodgonOptions) -> Scene {
    let v = p.vertex_points();
    let n = p.edges.len();
    let ends: Vec<(Complex64, Complex64)> = (0..n).map(|i| (v[i], v[i] + p.edges[i].nu())).collect();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for z in ends.iter().flat_map(|(a, b)| [*a, *b]) {
        x0 = x0.min(z.re);
        y0 = y0.min(z.im);
        x1 = x1.max(z.re);
        y1 = y1.max(z.im);
    }
    if !x0.is_finite() {
        (x0, y0, x1, y1) = (-1.0, -1.0, 1.0, 1.0);
    }
    let c = Complex64::new(0.5 * (x0 + x1), 0.5 * (y0 + y1));
    let half = 0.5 * (x1 - x0).max(y1 - y0);
    let half = if half > 0.0 { 1.15 * half } else { 1.0 };
    let mut scene = Scene::centered(c, half);

    let mut edges = Layer::new("edges");
    let mut labels = Layer::new("labels");
    for (e, &(a, b)) in p.edges.iter().zip(&ends) {
        edges.items.push(Item::polyline(vec![a, b], Style::line(palette(e.center_index), 4.0)));
        if opts.labels {
            // Outward normal for a counterclockwise chain, flipped for clockwise ones.
            let d = b - a;
            let len = d.norm().max(1e-300);
            let normal = Complex64::new(d.im, -d.re) / len * orientation(&v);
            labels.items.push(Item::Label {
                at: (a + b) * 0.5 + normal * (0.06 * half),
                text: format!("z{}", e.center_index),
                size: 28.0,
                color: palette(e.center_index),
            });
        }
    }

    let mut verts = Layer::new("vertices");
    for z in &v {
        verts.items.push(Item::Point { at: *z, marker: Marker::Circle, size: 5.0, style: Style::filled("#000000") });
    }

    let mut chords = Layer::new("chords");
    let mut list = if opts.chords { horizontal_chords(p).unwrap_or_default() } else { Vec::new() };
    list.extend(opts.extra_chords.iter().copied());
    for ch in list {
        let (i, j) = ch.vertices;
        if i < v.len() && j < v.len() {
            chords.items.push(Item::polyline(vec![v[i], v[j]], Style::line("#000000", 2.0).dashed("12 8")));
        }
    }

    scene.layers = vec![edges, chords, verts, labels];
    scene
}

/// `+1` for counterclockwise vertex order, `-1` otherwise.
fn orientation(v: &[Complex64]) -> f64 {
    let n = v.len();
    let area: f64 = (0..n).map(|i| v[i].re * v[(i + 1) % n].im - v[(i + 1) % n].re * v[i].im).sum();
    if area < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// SVG figure of the periodgon.
pub fn periodgon_figure(p: &Periodgon, opts: &PeriodgonOptions) -> String {
    periodgon_scene(p, opts).to_svg()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periodgon::Edge;

    fn chain(vs: &[(f64, f64)], centers: &[usize]) -> Periodgon {
        let edges = vs
            .iter()
            .zip(centers)
            .map(|(&vector, &center_index)| Edge { center_index, vector, access_angle: 0.0 })
            .collect();
        Periodgon::from_edges(edges, false)
    }

    #[test]
    fn square_with_horizontal_chord() {
        // Square 0 -> 1 -> 1+i -> i: the diagonals are not horizontal.
        let p = chain(&[(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)], &[0, 1, 2, 3]);
        let s = periodgon_scene(&p, &PeriodgonOptions::default());
        assert_eq!(s.layer("edges").unwrap().items.len(), 4);
        assert!(s.layer("chords").unwrap().items.is_empty());
        // Hexagon-like chain with a horizontal diagonal between vertices 0 and 3.
        let p = chain(&[(1.0, -1.0), (1.0, 0.0), (1.0, 1.0), (-1.0, 1.0), (-1.0, 0.0), (-1.0, -1.0)], &[0, 1, 2, 3, 4, 5]);
        let s = periodgon_scene(&p, &PeriodgonOptions::default());
        assert_eq!(s.layer("chords").unwrap().items.len(), 1);
        let svg = s.to_svg();
        assert!(svg.contains(r#"stroke-dasharray="12 8""#));
        for j in 0..6 {
            assert!(svg.contains(&format!(">z{j}</text>")));
        }
    }

    #[test]
    fn degenerate_chain_renders_collinear_segments() {
        // s = 1: one edge -nu0 ... k edges nu0/k back, all on a line.
        let k = 3;
        let mut vs = vec![(3.0, 0.0)];
        vs.extend(std::iter::repeat_n((-1.0, 0.0), k));
        let p = chain(&vs, &[0, 1, 2, 3]);
        let s = periodgon_scene(&p, &PeriodgonOptions::default());
        assert!(s.is_finite());
        for it in &s.layer("edges").unwrap().items {
            let Item::Path { pieces, .. } = it else { panic!() };
            assert!(pieces[0].iter().all(|z| z.im == 0.0));
        }
        assert_eq!(periodgon_figure(&p, &PeriodgonOptions::default()), s.to_svg());
    }
}
