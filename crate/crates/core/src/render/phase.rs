use num_complex::Complex64;

use super::{clip_polyline, palette, Item, Layer, Marker, Scene, Style};
use crate::error::Result;
use crate::flow::{integrate, trace_separatrix, Chart, Controls, Events, FlowContext, Trajectory};
use crate::Field;

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOptions {
    /// Half-width of the view around the origin; `None` fits the singular points.
    pub radius: Option<f64>,
    /// Orbit starts per side of the square grid; 0 draws separatrices only.
    pub grid: usize,
    /// Step budget of each grid orbit, per time direction.
    pub orbit_steps: usize,
    pub separatrix_controls: Controls,
}

impl Default for PhaseOptions {
    fn default() -> Self {
        Self {
            radius: None,
            grid: 8,
            orbit_steps: 600,
            separatrix_controls: Controls { max_steps: 6_000, ..Controls::default() },
        }
    }
}

fn path_of(t: &Trajectory) -> Vec<Complex64> {
    t.samples.iter().map(|s| s.z()).collect()
}

/// Scene with layers `orbits`, `separatrices` (one path per separatrix, cut
/// where it leaves the view), `points` and `parabolic` (multiple points).
pub fn phase_scene(f: &Field, delta: f64, opts: &PhaseOptions) -> Result<Scene> {
    let ctx = FlowContext::new(*f, delta);
    let max_mod = ctx.points.iter().map(|p| p.location.norm()).fold(0.0, f64::max);
    let r = opts.radius.unwrap_or(1.3 * max_mod.max(1.0));
    let origin = Complex64::new(0.0, 0.0);
    let mut scene = Scene::centered(origin, r);

    let mut orbits = Layer::new("orbits");
    if opts.grid > 0 {
        let c = Controls { max_steps: opts.orbit_steps, ..Controls::default() };
        let ev = Events::default();
        let n = opts.grid;
        for a in 0..n {
            for b in 0..n {
                let z = Complex64::new(
                    -r + 2.0 * r * (a as f64 + 0.5) / n as f64,
                    -r + 2.0 * r * (b as f64 + 0.5) / n as f64,
                );
                if ctx.points.iter().any(|p| (p.location - z).norm() < 1e-3 * r) {
                    continue;
                }
                let mut pts = Vec::new();
                if let Ok(t) = integrate(&ctx, Chart::Finite, z, &c.clone().backward(), &ev) {
                    pts.extend(path_of(&t).into_iter().rev());
                }
                if let Ok(t) = integrate(&ctx, Chart::Finite, z, &c, &ev) {
                    pts.extend(path_of(&t).into_iter().skip(1));
                }
                let pieces = clip_polyline(&pts, origin, r);
                if !pieces.is_empty() {
                    orbits.items.push(Item::Path { pieces, closed: false, style: Style::line("#b0b0b0", 1.0) });
                }
            }
        }
    }

    let mut seps = Layer::new("separatrices");
    for n in 0..2 * ctx.k() {
        let s = trace_separatrix(&ctx, n, &opts.separatrix_controls)?;
        let pieces = clip_polyline(&path_of(&s.trajectory), origin, r);
        let color = if n % 2 == 0 { "#202020" } else { "#505050" };
        seps.items.push(Item::Path { pieces, closed: false, style: Style::line(color, 3.0) });
    }

    let mut marks = Layer::new("points");
    let mut parabolic = Layer::new("parabolic");
    for p in &ctx.points {
        if p.is_simple() {
            let style = Style::filled(palette(p.index));
            marks.items.push(Item::Point { at: p.location, marker: Marker::Circle, size: 7.0, style });
        } else {
            let style = Style::filled("#ffffff");
            parabolic.items.push(Item::Point { at: p.location, marker: Marker::Diamond, size: 10.0, style });
        }
    }

    scene.layers = vec![orbits, seps, marks, parabolic];
    Ok(scene)
}

/// SVG phase portrait of `e^{i delta} P` around the origin.
pub fn phase_portrait(f: &Field, delta: f64, opts: &PhaseOptions) -> Result<String> {
    Ok(phase_scene(f, delta, opts)?.to_svg())
}
