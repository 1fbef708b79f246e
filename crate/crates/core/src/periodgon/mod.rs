//! Periodic domains, periodgons and their horizontal chords.
//!
//! The periodgon is the closed polygon whose edges are the periods
//! `nu_j = 2 pi i / P'(z_j)`, taken in the cyclic order in which the
//! periodic domains of the rotated fields touch infinity.

mod domain;
pub mod geometry;
mod sepal;

pub use domain::{domain_in, periodic_domain, periodic_domain_with, DomainOptions, PeriodicDomain, RayBoundary};
pub use sepal::{sepal_zones, sepal_zones_with, SepalOptions, SepalReport};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::flow::FlowContext;
use crate::scalar::{cis, wrap_angle};
use crate::Field;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Edge {
    pub center_index: usize,
    pub vector: (f64, f64),
    pub access_angle: f64,
}

impl Edge {
    pub fn nu(&self) -> Complex64 {
        Complex64::new(self.vector.0, self.vector.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct PeriodgonFlags {
    pub closed: bool,
    pub planar: bool,
    pub ambiguous_order: bool,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Periodgon {
    pub edges: Vec<Edge>,
    /// `vertices[i]` is the sum of the first `i` edges; `vertices[0] = 0`.
    pub vertices: Vec<(f64, f64)>,
    pub flags: PeriodgonFlags,
}

impl Periodgon {
    /// Assembles the chain from edges already in order.
    pub fn from_edges(edges: Vec<Edge>, ambiguous_order: bool) -> Self {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut pts = vec![acc];
        for e in &edges {
            acc += e.nu();
            pts.push(acc);
        }
        let max_nu = edges.iter().map(|e| e.nu().norm()).fold(0.0, f64::max);
        let closed = acc.norm() <= 1e-9 * max_nu;
        pts.pop();
        let planar = geometry::simple_chain(&pts, 1e-10 * geometry::diameter(&pts));
        Self {
            edges,
            vertices: pts.iter().map(|z| (z.re, z.im)).collect(),
            flags: PeriodgonFlags { closed, planar, ambiguous_order },
        }
    }

    pub fn vertex_points(&self) -> Vec<Complex64> {
        self.vertices.iter().map(|&(re, im)| Complex64::new(re, im)).collect()
    }

    pub fn diameter(&self) -> f64 {
        geometry::diameter(&self.vertex_points())
    }

    /// The same chain with every edge multiplied by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let v = e.nu() * c;
                Edge { vector: (v.re, v.im), ..*e }
            })
            .collect();
        Self::from_edges(edges, self.flags.ambiguous_order)
    }

    /// Sum of all edges.
    pub fn closure_defect(&self) -> f64 {
        self.edges.iter().map(|e| e.nu()).sum::<Complex64>().norm()
    }
}

/// Periodgon of a generic field. Only the boundary loops are needed for the order,
/// so the per-ray search is skipped.
pub fn build_periodgon(f: &Field) -> Result<Periodgon> {
    Ok(build_periodgon_with(f, &DomainOptions::default().loops_only())?.0)
}

/// Periodgon together with the periodic domains it was ordered by.
pub fn build_periodgon_with(f: &Field, opts: &DomainOptions) -> Result<(Periodgon, Vec<PeriodicDomain>)> {
    if f.near_parabolic() {
        return Err(Error::NearParabolic { discriminant: f.discriminant().norm() });
    }
    let base = FlowContext::new(*f, 0.0);
    if base.points.iter().any(|p| !p.is_simple()) {
        return Err(Error::NearParabolic { discriminant: f.discriminant().norm() });
    }
    let domains = (0..base.points.len()).map(|j| domain_in(&base, j, opts)).collect::<Result<Vec<_>>>()?;
    let mut edges: Vec<Edge> = domains
        .iter()
        .map(|d| {
            let nu = base.points[d.center_index].period.expect("simple point");
            Edge { center_index: d.center_index, vector: (nu.re, nu.im), access_angle: d.access_angle }
        })
        .collect();
    edges.sort_by(|a, b| a.access_angle.total_cmp(&b.access_angle).then(a.center_index.cmp(&b.center_index)));
    let ambiguous = domains.iter().any(|d| d.loop_count > 1);
    Ok((Periodgon::from_edges(edges, ambiguous), domains))
}

pub fn is_planar(p: &Periodgon) -> bool {
    p.flags.planar
}

/// Non-adjacent vertex pair `(i, j)`, `i < j`, and the vector `v_j - v_i`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Chord {
    pub vertices: (usize, usize),
    pub vector: (f64, f64),
}

impl Chord {
    pub fn vec(&self) -> Complex64 {
        Complex64::new(self.vector.0, self.vector.1)
    }
}

/// Vertex pairs whose segment lies in the closed polygon, boundary included.
pub fn interior_chords(p: &Periodgon) -> Result<Vec<Chord>> {
    if !p.flags.planar {
        return Err(Error::NonPlanar);
    }
    let v = p.vertex_points();
    let n = v.len();
    let diam = geometry::diameter(&v);
    let tol = 1e-10 * diam;
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (a, b) = (v[i], v[j]);
            if (b - a).norm() <= tol {
                continue;
            }
            let crosses = (0..n).any(|e| geometry::proper_crossing(a, b, v[e], v[(e + 1) % n], tol));
            if crosses {
                continue;
            }
            let inside = [0.25, 0.5, 0.75].iter().all(|s| geometry::inside_closed(a + (b - a) * *s, &v, tol));
            if inside {
                let d = b - a;
                out.push(Chord { vertices: (i, j), vector: (d.re, d.im) });
            }
        }
    }
    Ok(out)
}

/// Interior chords with zero imaginary part (within `1e-9` of the diameter).
pub fn horizontal_chords(p: &Periodgon) -> Result<Vec<Chord>> {
    let tol = 1e-9 * p.diameter();
    Ok(interior_chords(p)?.into_iter().filter(|c| c.vector.1.abs() <= tol).collect())
}

/// Interior chords and, for each, the `2k` rotations `alpha` in `[0, 2pi)` that make it
/// horizontal. The periodgon at rotation `alpha` is the one at `alpha = 0` multiplied by
/// `e^{i k alpha}`, so the condition is `k alpha = -arg(chord) (mod pi)`.
pub fn chord_alphas(p: &Periodgon, k: usize) -> Result<Vec<(Chord, Vec<f64>)>> {
    let kf = k as f64;
    Ok(interior_chords(p)?
        .into_iter()
        .map(|c| {
            let base = -c.vec().arg();
            let mut al: Vec<f64> =
                (0..2 * k).map(|m| wrap_angle((base + m as f64 * std::f64::consts::PI) / kf)).collect();
            al.sort_by(f64::total_cmp);
            (c, al)
        })
        .collect())
}

/// `e^{i k alpha}`, the factor relating periodgons along an `alpha`-fiber.
pub fn fiber_rotation(k: usize, alpha: f64) -> Complex64 {
    cis(k as f64 * alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(j: usize, re: f64, im: f64) -> Edge {
        Edge { center_index: j, vector: (re, im), access_angle: j as f64 }
    }

    #[test]
    fn square_has_two_diagonals() {
        let p = Periodgon::from_edges(
            vec![edge(0, 1.0, 0.0), edge(1, 0.0, 1.0), edge(2, -1.0, 0.0), edge(3, 0.0, -1.0)],
            false,
        );
        assert!(p.flags.closed && p.flags.planar);
        let c = interior_chords(&p).unwrap();
        assert_eq!(c.len(), 2);
        assert!(horizontal_chords(&p).unwrap().is_empty());
        // Rotating by -pi/4 makes the diagonal (0, 2) horizontal.
        let r = p.scaled(cis(-std::f64::consts::FRAC_PI_4));
        let h = horizontal_chords(&r).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h[0].vertices, (0, 2));
    }

    #[test]
    fn nonconvex_excludes_outside_chord() {
        // Arrow shape: the chord between the two outer tips passes outside.
        let v = [(0.0, 0.0), (2.0, 1.0), (0.0, 2.0), (0.5, 1.0)];
        let edges: Vec<Edge> = (0..4)
            .map(|i| {
                let (a, b) = (v[i], v[(i + 1) % 4]);
                edge(i, b.0 - a.0, b.1 - a.1)
            })
            .collect();
        let p = Periodgon::from_edges(edges, false);
        let c = interior_chords(&p).unwrap();
        assert_eq!(c.iter().map(|c| c.vertices).collect::<Vec<_>>(), vec![(1, 3)]);
    }

    #[test]
    fn horizontal_chord_alphas() {
        let p = Periodgon::from_edges(
            vec![edge(0, 1.0, -1.0), edge(1, 1.0, 1.0), edge(2, -1.0, 1.0), edge(3, -1.0, -1.0)],
            false,
        );
        let ca = chord_alphas(&p, 3).unwrap();
        let (c, al) = ca.iter().find(|(c, _)| c.vertices == (0, 2)).unwrap();
        assert!(c.vector.1.abs() < 1e-15);
        for (m, a) in al.iter().enumerate() {
            assert!((a - m as f64 * std::f64::consts::PI / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bow_tie_is_nonplanar() {
        let p = Periodgon::from_edges(
            vec![edge(0, 1.0, 1.0), edge(1, 0.0, -1.0), edge(2, -1.0, 1.0), edge(3, 0.0, -1.0)],
            false,
        );
        assert!(!is_planar(&p));
        assert_eq!(horizontal_chords(&p), Err(Error::NonPlanar));
    }
}
