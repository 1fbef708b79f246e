//! Periodic domain of a center in the rotated field `e^{i arg nu_j} P`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flow::{integrate, trace_separatrix_with, Chart, Controls, Events, FlowContext, Section, Termination};
use crate::scalar::{angle_diff, arg_positive, cis, wrap_angle, wrap_into};
use crate::Field;

const FALLBACK_RAYS: usize = 32;
const STIFF_RATIO: f64 = 1e4;
const MAX_LOOP_POLE_TOL: f64 = 1e-2;

/// Tuning of the per-ray boundary search.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainOptions {
    pub rays: usize,
    pub max_iter: usize,
    /// Bisection stops when the bracket is below `radius_tol * scale`.
    pub radius_tol: f64,
    pub confirm_returns: usize,
    pub closure_tol: f64,
    pub controls: Controls,
    /// Controls for tracing the separatrices that close up into boundary loops.
    pub loop_controls: Controls,
    /// Distance from the pole, in local time, accepted as a return to infinity.
    pub loop_pole_tol: f64,
}

impl Default for DomainOptions {
    fn default() -> Self {
        Self {
            rays: 64,
            max_iter: 60,
            radius_tol: 1e-10,
            confirm_returns: 3,
            closure_tol: 1e-6,
            controls: Controls { max_steps: 4_000, ..Controls::default() }.unrecorded(),
            loop_controls: Controls { rtol: 1e-12, atol: 1e-14, ..Controls::default() },
            loop_pole_tol: 1e-7,
        }
    }
}

impl DomainOptions {
    /// Looser settings used by parameter scans.
    pub fn scan() -> Self {
        Self {
            rays: 32,
            radius_tol: 1e-6,
            confirm_returns: 1,
            closure_tol: 1e-5,
            controls: Controls { rtol: 1e-8, atol: 1e-10, max_steps: 2_000, ..Controls::default() }
                .unrecorded(),
            ..Self::default()
        }
    }

    /// Skips the per-ray boundary search; loops and access angle only.
    pub fn loops_only(mut self) -> Self {
        self.rays = 0;
        self
    }
}

/// Boundary search result on one ray.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RayBoundary {
    pub angle: f64,
    /// Largest radius found whose orbit closes before reaching `r_escape`.
    pub radius: f64,
    /// `(in, out)` direction indices at infinity of the boundary loop met by this ray:
    /// orbits just beyond it arrive along `in` and leave along `out`.
    pub escape_pair: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PeriodicDomain {
    pub center_index: usize,
    /// Rotation `arg nu_j` of the field in which `z_j` is a center.
    pub delta: f64,
    pub rays: Vec<RayBoundary>,
    pub loop_count: usize,
    /// Distinct `(in, out)` pairs, sorted.
    pub escape_sector_pairs: Vec<(usize, usize)>,
    pub access_angle: f64,
    /// More than one loop: the access angle is taken from the first pair.
    pub ambiguous: bool,
}

impl PeriodicDomain {
    pub fn boundary_radii(&self) -> Vec<f64> {
        self.rays.iter().map(|r| r.radius).collect()
    }

    /// Sampled boundary points `z_j + r e^{i phi}`.
    pub fn boundary_points(&self, center: Complex64) -> Vec<Complex64> {
        self.rays.iter().map(|r| center + cis(r.angle) * r.radius).collect()
    }
}

/// `Some(farthest point)` when the orbit closes.
fn probe(
    ctx: &FlowContext,
    center: Complex64,
    u: Complex64,
    r: f64,
    opts: &DomainOptions,
) -> Result<Option<Complex64>> {
    let mut sec = Section::new(center, u);
    sec.confirm_returns = opts.confirm_returns;
    sec.closure_tol = opts.closure_tol;
    let ev = Events::default().with_section(sec);
    let t = integrate(ctx, Chart::Finite, center + u * r, &opts.controls, &ev)?;
    Ok(match t.termination {
        Termination::Closed(_) => Some(t.farthest),
        _ => None,
    })
}

/// Separatrix pair `(repelling, attracting)` bounding elliptic sector `e` at infinity.
fn sector_pair(e: usize, k: usize) -> (usize, usize) {
    let next = (e + 1) % (2 * k);
    if e % 2 == 1 {
        (e, next)
    } else {
        (next, e)
    }
}

fn search_ray(ctx: &FlowContext, j: usize, m: usize, opts: &DomainOptions) -> Result<RayBoundary> {
    let center = ctx.points[j].location;
    let angle = std::f64::consts::TAU * m as f64 / opts.rays as f64;
    let u = cis(angle);
    let nearest = ctx
        .points
        .iter()
        .filter(|p| p.index != j)
        .map(|p| (p.location - center).norm())
        .fold(ctx.scale, f64::min);
    let mut lo = 1e-2 * nearest;
    let mut far = None;
    for _ in 0..4 {
        far = probe(ctx, center, u, lo, opts)?;
        if far.is_some() {
            break;
        }
        lo *= 0.1;
    }
    let Some(mut far) = far else {
        return Err(Error::BisectionStall { ray: m });
    };
    let mut hi = ctx.r_escape + center.norm();
    let tol = opts.radius_tol * ctx.scale;
    for _ in 0..opts.max_iter {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match probe(ctx, center, u, mid, opts)? {
            Some(z) => {
                lo = mid;
                far = z;
            }
            None => hi = mid,
        }
    }
    // The outermost closed orbit grazes r_escape in the middle of the elliptic
    // sector through which the boundary loop passes.
    let escape_pair = (far.norm() > ctx.r_switch)
        .then(|| sector_pair(ctx.elliptic_sector_of_angle(arg_positive(far)), ctx.k()));
    Ok(RayBoundary { angle, radius: lo, escape_pair })
}

/// Circular mean of two angles.
fn mid_angle(a: f64, b: f64) -> f64 {
    let s = cis(a) + cis(b);
    if s.norm() < 1e-12 {
        wrap_angle(a + std::f64::consts::FRAC_PI_2)
    } else {
        wrap_angle(s.arg())
    }
}

/// Periodic domain of the simple point `j`.
pub fn periodic_domain(f: &Field, j: usize, ray_count: usize) -> Result<PeriodicDomain> {
    let opts = DomainOptions { rays: ray_count, ..DomainOptions::default() };
    periodic_domain_with(f, j, &opts)
}

pub fn periodic_domain_with(f: &Field, j: usize, opts: &DomainOptions) -> Result<PeriodicDomain> {
    if f.near_parabolic() {
        return Err(Error::NearParabolic { discriminant: f.discriminant().norm() });
    }
    let base = FlowContext::new(*f, 0.0);
    domain_in(&base, j, opts)
}

/// Side of the loop `path` (closed through infinity counterclockwise) on which `q` lies.
fn loop_side(path: &[Complex64], q: Complex64) -> bool {
    let mut total = 0.0;
    for w in path.windows(2) {
        total += angle_diff((w[1] - q).arg(), (w[0] - q).arg());
    }
    let (first, last) = (path[0], path[path.len() - 1]);
    total += wrap_into((first - q).arg() - (last - q).arg(), std::f64::consts::TAU);
    (total / std::f64::consts::TAU).round() as i64 != 0
}

struct Loop {
    pair: (usize, usize),
    path: Vec<Complex64>,
}

/// Homoclinic loops through infinity on the boundary of the region containing `z_j`,
/// in the field where `z_j` is a center, as `(out of infinity, back into infinity)`.
///
/// Distinct loops meet only at infinity, so a loop bounds the region of `z_j` unless
/// some other loop separates it from `z_j`.
fn boundary_loops(ctx: &FlowContext, j: usize, opts: &DomainOptions) -> Result<Vec<(usize, usize)>> {
    let center = ctx.points[j].location;
    let nu = ctx.points[j].period.map_or(0.0, |v| v.norm());
    let c = Controls {
        max_tau: 100.0 * (ctx.r_escape + nu),
        max_steps: 50_000,
        record: true,
        ..opts.loop_controls.clone()
    };
    // A near collision of z_j with another point (|nu_j| much larger than the other
    // periods) makes loops thread a gap on which |P| is tiny, and errors in time there
    // exceed the usual tolerance.
    let nu_min = ctx.points.iter().filter_map(|p| p.period).map(|v| v.norm()).fold(f64::INFINITY, f64::min);
    let pole_tol = (opts.loop_pole_tol * (nu / (STIFF_RATIO * nu_min)).max(1.0)).min(MAX_LOOP_POLE_TOL);
    let ev = Events { pole_tol, ..Events::default().no_escape() };
    // Repelling separatrices forward and attracting ones backward: near a dipole-like pair
    // one direction can drift into a period annulus while the other escapes.
    let mut loops: Vec<Loop> = Vec::new();
    for n in 0..2 * ctx.k() {
        let s = trace_separatrix_with(ctx, n, &c, &ev)?;
        if let Termination::EscapedThroughSector(a) = s.trajectory.termination {
            if a % 2 == n % 2 {
                continue;
            }
            let mut path: Vec<Complex64> =
                s.trajectory.samples.iter().map(|p| p.z()).filter(|z| z.is_finite()).collect();
            if path.len() >= 3 {
                // Run the ends out to infinity along their asymptotic directions so
                // the closing arc lies beyond every probe point.
                let far = 1e6 * ctx.r_escape;
                path.insert(0, cis(ctx.direction_angle(n)) * far);
                path.push(cis(ctx.direction_angle(a)) * far);
                let pair = if n % 2 == 1 { (n, a) } else { (a, n) };
                match loops.iter_mut().find(|l| l.pair == pair) {
                    Some(l) if l.path.len() > path.len() => l.path = path,
                    Some(_) => {}
                    None => loops.push(Loop { pair, path }),
                }
            }
        }
    }
    let sides: Vec<bool> = loops.iter().map(|l| loop_side(&l.path, center)).collect();
    Ok(loops
        .iter()
        .enumerate()
        .filter(|(i, l)| {
            loops.iter().enumerate().all(|(o, other)| {
                o == *i || loop_side(&other.path, farthest_from(&l.path, &other.path, ctx.r_switch)) == sides[o]
            })
        })
        .map(|(_, l)| l.pair)
        .collect())
}

/// Point of `path` within `radius` farthest from `other` (both subsampled). Loops run close together
/// through narrow passages, where a side test would be unreliable.
fn farthest_from(path: &[Complex64], other: &[Complex64], radius: f64) -> Complex64 {
    const N: usize = 256;
    let sub = |v: &[Complex64]| -> Vec<Complex64> {
        let step = (v.len() / N).max(1);
        v.iter().step_by(step).copied().collect()
    };
    let inner: Vec<Complex64> = path.iter().copied().filter(|z| z.norm() <= radius).collect();
    let a = if inner.is_empty() { sub(&path[1..path.len() - 1]) } else { sub(&inner) };
    let b = sub(other);
    let dist = |z: &Complex64| b.iter().map(|w| (z - w).norm_sqr()).fold(f64::INFINITY, f64::min);
    *a.iter().max_by(|x, y| dist(x).total_cmp(&dist(y))).expect("nonempty path")
}

/// Domain computation reusing the singular points of `base` (any rotation).
pub fn domain_in(base: &FlowContext, j: usize, opts: &DomainOptions) -> Result<PeriodicDomain> {
    let p = base.points.get(j).ok_or_else(|| Error::InvalidConfig(format!("no singular point {j}")))?;
    let nu = p.period.ok_or(Error::Parabolic)?;
    let delta = wrap_angle(nu.arg());
    let ctx = base.rotated(delta);
    let search = |count: usize| {
        let o = DomainOptions { rays: count, ..opts.clone() };
        (0..count).into_par_iter().map(|m| search_ray(&ctx, j, m, &o)).collect::<Result<Vec<_>>>()
    };
    let mut rays = search(opts.rays)?;
    let mut pairs = boundary_loops(&ctx, j, opts)?;
    if pairs.is_empty() {
        // Fall back on the sectors the outermost closed orbits reached.
        if rays.is_empty() {
            rays = search(FALLBACK_RAYS)?;
        }
        pairs = rays.iter().filter_map(|r| r.escape_pair).collect();
    }
    pairs.sort_unstable();
    pairs.dedup();
    if pairs.is_empty() {
        return Err(Error::BisectionStall { ray: 0 });
    }
    let chosen = *pairs.iter().min_by_key(|(a, b)| ((*a).min(*b), (*a).max(*b))).expect("nonempty");
    let access_angle = mid_angle(ctx.direction_angle(chosen.0), ctx.direction_angle(chosen.1));
    Ok(PeriodicDomain {
        center_index: j,
        delta,
        rays,
        loop_count: pairs.len(),
        ambiguous: pairs.len() > 1,
        escape_sector_pairs: pairs,
        access_angle,
    })
}
