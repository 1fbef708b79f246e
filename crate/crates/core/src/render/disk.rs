use std::f64::consts::PI;

use num_complex::Complex64;

use super::{palette, Item, Layer, Marker, Scene, Style};
use crate::bifscan::{BifurcationEvent, EventKind};
use crate::error::{Error, Result};
use crate::scalar::cis;

#[derive(Debug, Clone, PartialEq)]
pub struct DiskOptions {
    /// Draw events whose `alpha` lies within this distance of `alpha`; `None` draws all fibers.
    pub alpha: Option<(f64, f64)>,
    pub guides: bool,
}

impl Default for DiskOptions {
    fn default() -> Self {
        Self { alpha: None, guides: true }
    }
}

/// Point `s e^{i theta}` of the parameter disk.
fn disk_point(s: f64, theta: f64) -> Complex64 {
    cis(theta) * s
}

/// Layers `frame`, `guides` (rays `theta = 2 pi j/(k-1)` solid, `(2j-1) pi/(k-1)` dashed),
/// `parabolic_delta` (`Delta = 0` at `s = 1/2` on the solid rays) and `events`.
pub fn disk_scene(events: &[BifurcationEvent], k: usize, opts: &DiskOptions) -> Result<Scene> {
    if k < 2 {
        return Err(Error::InvalidDegree(k));
    }
    if let Some(e) = events.iter().find(|e| e.k != k) {
        return Err(Error::InvalidConfig(format!("event for k = {} in a k = {k} disk", e.k)));
    }
    let mut scene = Scene::centered(Complex64::new(0.0, 0.0), 1.05);
    let h = PI / (k - 1) as f64;

    let mut frame = Layer::new("frame");
    let circle: Vec<Complex64> = (0..360).map(|m| cis(2.0 * PI * m as f64 / 360.0)).collect();
    frame.items.push(Item::polygon(circle, Style::line("#000000", 2.0)));

    let mut guides = Layer::new("guides");
    let mut markers = Layer::new("parabolic_delta");
    if opts.guides {
        let origin = Complex64::new(0.0, 0.0);
        for j in 0..k - 1 {
            let t = 2.0 * j as f64 * h;
            guides.items.push(Item::polyline(vec![origin, cis(t)], Style::line("#606060", 1.5)));
            let t2 = (2.0 * j as f64 + 1.0) * h;
            guides.items.push(Item::polyline(vec![origin, cis(t2)], Style::line("#606060", 1.5).dashed("10 6")));
            markers.items.push(Item::Point {
                at: disk_point(0.5, t),
                marker: Marker::Diamond,
                size: 9.0,
                style: Style::filled("#ffffff"),
            });
        }
    }

    let mut glyphs = Layer::new("events");
    for e in events {
        if let Some((a, tol)) = opts.alpha {
            if crate::scalar::angle_diff(e.coords.alpha, a).abs() > tol {
                continue;
            }
        }
        let at = disk_point(e.coords.s, e.coords.theta);
        let item = match &e.kind {
            EventKind::MultiLoop { center, .. } => {
                Item::Point { at, marker: Marker::Circle, size: 5.0, style: Style::filled(palette(*center)) }
            }
            EventKind::HomoclinicChord { centers, .. } => Item::Point {
                at,
                marker: Marker::Cross,
                size: 4.0,
                style: Style::line(palette(centers.0), 1.5),
            },
            EventKind::ParabolicDelta => {
                Item::Point { at, marker: Marker::Diamond, size: 7.0, style: Style::filled("#000000") }
            }
            EventKind::ParabolicEps0 => {
                Item::Point { at, marker: Marker::Square, size: 6.0, style: Style::filled("#000000") }
            }
            EventKind::Diagnostic { .. } => {
                Item::Point { at, marker: Marker::Cross, size: 3.0, style: Style::line("#a0a0a0", 1.0) }
            }
        };
        glyphs.items.push(item);
    }

    scene.layers = vec![frame, guides, markers, glyphs];
    Ok(scene)
}

/// SVG of the `(s, theta)` disk with event glyphs by kind.
pub fn bifurcation_disk(events: &[BifurcationEvent], k: usize, opts: &DiskOptions) -> Result<String> {
    Ok(disk_scene(events, k, opts)?.to_svg())
}
