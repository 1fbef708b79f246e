//! Adaptive integration with chart switching and terminal events.

use num_complex::Complex64;

use super::integrator::{dp45_step, Deriv, State};
use super::{field_in_chart, infinity_time, Chart, FlowContext};
use crate::error::{Error, Result};
use crate::scalar::arg_positive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

/// Step-size and budget controls.
#[derive(Debug, Clone, PartialEq)]
pub struct Controls {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Budget in regularized time.
    pub max_tau: f64,
    pub direction: Direction,
    pub record: bool,
}

impl Default for Controls {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 100_000,
            max_tau: f64::INFINITY,
            direction: Direction::Forward,
            record: true,
        }
    }
}

impl Controls {
    pub fn backward(mut self) -> Self {
        self.direction = Direction::Backward;
        self
    }

    pub fn unrecorded(mut self) -> Self {
        self.record = false;
        self
    }
}

/// Half-line `c + r u`, `r > 0`, used as a Poincare section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Section {
    pub center: Complex64,
    /// Unit direction.
    pub direction: Complex64,
    /// Relative radius mismatch accepted as a return to the start.
    pub closure_tol: f64,
    /// Consecutive returns required before reporting a closed orbit.
    pub confirm_returns: usize,
}

impl Section {
    pub fn new(center: Complex64, direction: Complex64) -> Self {
        Self { center, direction: direction / direction.norm(), closure_tol: 1e-6, confirm_returns: 3 }
    }

    fn offset(&self, z: Complex64) -> Complex64 {
        self.direction.conj() * (z - self.center)
    }
}

/// Which terminal events are armed.
#[derive(Debug, Clone, PartialEq)]
pub struct Events {
    pub land: bool,
    /// Per-point landing radius overrides.
    pub landing_override: Vec<(usize, f64)>,
    /// Stop on `|z| > r_escape`.
    pub escape: bool,
    /// Stop on reaching the pole at infinity; tolerance relative to the local
    /// time at `|w| = 1/r_switch`.
    pub pole_tol: f64,
    pub section: Option<Section>,
}

impl Default for Events {
    fn default() -> Self {
        Self { land: true, landing_override: Vec::new(), escape: true, pole_tol: 1e-8, section: None }
    }
}

impl Events {
    pub fn no_escape(mut self) -> Self {
        self.escape = false;
        self
    }

    pub fn with_section(mut self, s: Section) -> Self {
        self.section = Some(s);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum Termination {
    LandedAtPoint(usize),
    /// Separatrix direction index at infinity, see [`FlowContext::sector_of_angle`].
    EscapedThroughSector(usize),
    /// Returned to the section start after one turn around the section center.
    Closed(f64),
    /// Returned to the section start without winding around the section center.
    ClosedOffCenter(f64),
    TimeBudgetExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Sample {
    pub t: f64,
    /// Coordinates in `chart`.
    pub point: (f64, f64),
    pub chart: Chart,
}

impl Sample {
    pub fn z(&self) -> Complex64 {
        to_z(self.chart, Complex64::new(self.point.0, self.point.1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub termination: Termination,
    /// True time at termination (negative when integrating backward).
    pub elapsed: f64,
    pub steps: usize,
    /// Point of largest modulus visited, in `z`.
    pub farthest: Complex64,
    pub end_chart: Chart,
    pub end_point: Complex64,
}

#[inline]
fn to_z(chart: Chart, p: Complex64) -> Complex64 {
    match chart {
        Chart::Finite => p,
        Chart::Infinity => p.inv(),
    }
}

fn dist_to_segment(a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let l2 = d.norm_sqr();
    if l2 == 0.0 {
        return a.norm();
    }
    let s = (-(a.conj() * d).re / l2).clamp(0.0, 1.0);
    (a + d * s).norm()
}

struct Runner<'a> {
    ctx: &'a FlowContext,
    vel: Complex64,
    dir: f64,
}

impl Runner<'_> {
    fn velocity(&self, chart: Chart, p: Complex64) -> Result<Complex64> {
        let v = field_in_chart(&self.ctx.field, self.ctx.delta, chart, p)?;
        Ok(v * self.dir)
    }

    fn deriv(&mut self, chart: Chart, p: Complex64) -> Result<Deriv> {
        let v = self.velocity(chart, p)?;
        let n = v.norm();
        if !n.is_finite() {
            return Err(Error::PoleEvaluation);
        }
        self.vel = v;
        let g = 1.0 / (1.0 + n);
        Ok(Deriv { dp: v * g, dt: self.dir * g })
    }
}

/// Integrates `z' = e^{i delta} P(z)` from `start` (given in `chart`).
pub fn integrate(
    ctx: &FlowContext,
    chart: Chart,
    start: Complex64,
    controls: &Controls,
    events: &Events,
) -> Result<Trajectory> {
    let z0 = to_z(chart, start);
    for p in &ctx.points {
        if z0.is_finite() && (z0 - p.location).norm() <= 1e-14 * ctx.scale {
            return Err(Error::StartAtSingularPoint { index: p.index });
        }
    }
    let mut landing = ctx.landing_radius.clone();
    for &(i, r) in &events.landing_override {
        if i < landing.len() {
            landing[i] = r;
        }
    }

    let dir = controls.direction.sign();
    let mut run = Runner { ctx, vel: Complex64::new(0.0, 0.0), dir };
    let mut chart = chart;
    let mut y = State { p: start, t: 0.0 };
    let mut k1 = run.deriv(chart, y.p)?;
    let mut tau = 0.0;
    let len_finite = ctx.min_separation;
    let len_inf = ctx.min_separation / (ctx.scale * ctx.scale);
    let switch_out = 1.25 * ctx.r_switch;
    let switch_in = 1.0 / ctx.r_switch;
    let rotation = ctx.rotation * dir;
    let t_scale = (ctx.r_switch.powi(ctx.k() as i32) * ctx.k() as f64).recip();
    let pole_radius = events.pole_tol * t_scale;

    let mut samples = Vec::new();
    let mut farthest = z0;
    let record = |samples: &mut Vec<Sample>, chart: Chart, y: &State| {
        samples.push(Sample { t: y.t, point: (y.p.re, y.p.im), chart });
    };
    if controls.record {
        record(&mut samples, chart, &y);
    }

    let mut t_inf_old = if chart == Chart::Infinity { Some(infinity_time(&ctx.field, y.p)) } else { None };

    // Poincare-section state.
    let sec = events.section;
    let (sense, r0) = match sec {
        Some(s) => {
            let v = field_in_chart(&ctx.field, ctx.delta, Chart::Finite, z0)? * dir;
            let dg = (s.direction.conj() * v).im;
            (if dg >= 0.0 { 1.0 } else { -1.0 }, s.offset(z0).re)
        }
        None => (1.0, 0.0),
    };
    let mut returns = 0usize;
    let mut winding = 0i64;

    let len = |c: Chart| if c == Chart::Finite { len_finite } else { len_inf };
    let mut h = 1e-3 * (y.p.norm().min(len(chart)) + len(chart));

    let finish = |termination, y: &State, chart, samples, steps, farthest| Trajectory {
        samples,
        termination,
        elapsed: y.t,
        steps,
        farthest,
        end_chart: chart,
        end_point: y.p,
    };

    let mut steps = 0usize;
    loop {
        if steps >= controls.max_steps || tau >= controls.max_tau {
            return Ok(finish(Termination::TimeBudgetExhausted, &y, chart, samples, steps, farthest));
        }
        let atol = controls.atol * len(chart);
        let h_min = 1e-14 * (y.p.norm() + len(chart));
        let mut rhs = |p: Complex64| run.deriv(chart, p);
        let step = match dp45_step(&mut rhs, y, k1, h) {
            Ok(s) => s,
            Err(Error::PoleEvaluation) => {
                h *= 0.25;
                if h < h_min {
                    return Err(Error::StepUnderflow { step: h, re: y.p.re, im: y.p.im });
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        let sc_p = atol + controls.rtol * y.p.norm().max(step.y.p.norm());
        let sc_t = controls.atol + controls.rtol * y.t.abs().max(step.y.t.abs());
        let err = (step.err_p.norm() / sc_p).max(step.err_t.abs() / sc_t);
        if !err.is_finite() || err > 1.0 {
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).max(0.2) } else { 0.2 };
            h *= fac;
            if h < h_min {
                return Err(Error::StepUnderflow { step: h, re: y.p.re, im: y.p.im });
            }
            continue;
        }
        let y_old = y;
        let k_old = k1;
        let h_used = h;
        y = step.y;
        k1 = step.k_end;
        tau += h_used;
        steps += 1;
        h *= (0.9 * err.max(1e-10).powf(-0.2)).min(5.0);

        let z = to_z(chart, y.p);
        if z.norm() > farthest.norm() || !z.is_finite() {
            farthest = z;
        }

        // Section crossing.
        // The start lies on the section up to rounding, so the first step never crosses.
        if let Some(s) = sec.filter(|_| steps > 1) {
            let g = |st: &State| sense * s.offset(to_z(chart, st.p)).im;
            let (g0, g1) = (g(&y_old), g(&y));
            let on_ray = s.offset(to_z(chart, y.p)).re > 0.0;
            if g0 >= 0.0 && g1 < 0.0 && on_ray {
                winding -= 1;
            }
            if g0 < 0.0 && g1 >= 0.0 && on_ray {
                winding += 1;
                let (mut lo, mut hi) = (0.0, h_used);
                let mut hit = y;
                let mut rhs = |p: Complex64| run.deriv(chart, p);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    let st = dp45_step(&mut rhs, y_old, k_old, mid)?.y;
                    if g(&st) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                        hit = st;
                    }
                    if hi - lo <= 1e-12 * h_used {
                        break;
                    }
                }
                let rc = s.offset(to_z(chart, hit.p)).re;
                if (rc - r0).abs() <= s.closure_tol * r0.abs().max(1e-300) {
                    returns += 1;
                    // Signed ray crossings count the winding around the center.
                    let around = winding == returns as i64;
                    if returns >= s.confirm_returns.max(1) || !around {
                        let period = hit.t.abs() / returns as f64;
                        if controls.record {
                            record(&mut samples, chart, &hit);
                        }
                        let term = if around { Termination::Closed(period) } else { Termination::ClosedOffCenter(period) };
                        return Ok(finish(term, &hit, chart, samples, steps, farthest));
                    }
                }
            }
        }

        if controls.record {
            record(&mut samples, chart, &y);
        }

        match chart {
            Chart::Finite => {
                if events.land {
                    for (p, r) in ctx.points.iter().zip(&landing) {
                        let d = z - p.location;
                        if d.norm() < *r && (d.conj() * run.vel).re < 0.0 {
                            return Ok(finish(
                                Termination::LandedAtPoint(p.index),
                                &y,
                                chart,
                                samples,
                                steps,
                                farthest,
                            ));
                        }
                    }
                }
                if events.escape && z.norm() > ctx.r_escape {
                    let n = ctx.sector_of_angle(arg_positive(z));
                    return Ok(finish(Termination::EscapedThroughSector(n), &y, chart, samples, steps, farthest));
                }
                if z.norm() > switch_out {
                    chart = Chart::Infinity;
                    y.p = z.inv();
                    k1 = run.deriv(chart, y.p)?;
                    h = 1e-2 * y.p.norm();
                    t_inf_old = Some(infinity_time(&ctx.field, y.p));
                }
            }
            Chart::Infinity => {
                let w = y.p;
                if events.escape && w.norm() < 1.0 / ctx.r_escape {
                    let n = ctx.sector_of_angle(arg_positive(z));
                    return Ok(finish(Termination::EscapedThroughSector(n), &y, chart, samples, steps, farthest));
                }
                // With the escape radius armed the pole is never reached first.
                let t_new = if events.escape { Complex64::new(f64::INFINITY, 0.0) } else { infinity_time(&ctx.field, w) };
                if let Some(t_old) = t_inf_old.filter(|_| !events.escape) {
                    if dist_to_segment(t_old, t_new) < pole_radius {
                        // Along an orbit T advances as dir e^{i delta} t; solve T = 0.
                        let dt = -(rotation.conj() * t_old).re;
                        let mut end = y_old;
                        end.t = y_old.t + dt;
                        let n = ctx.sector_of_angle(arg_positive(to_z(chart, y_old.p)));
                        let mut tr = finish(
                            Termination::EscapedThroughSector(n),
                            &end,
                            chart,
                            samples,
                            steps,
                            Complex64::new(f64::INFINITY, 0.0),
                        );
                        tr.end_point = Complex64::new(0.0, 0.0);
                        return Ok(tr);
                    }
                }
                t_inf_old = Some(t_new);
                if w.norm() > switch_in {
                    chart = Chart::Finite;
                    y.p = w.inv();
                    k1 = run.deriv(chart, y.p)?;
                    h = 1e-2 * y.p.norm().min(len_finite);
                    t_inf_old = None;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Field;

    fn ctx(k: usize, e1: (f64, f64), e0: (f64, f64), delta: f64) -> FlowContext {
        let f = Field::new(k, Complex64::new(e1.0, e1.1), Complex64::new(e0.0, e0.1)).unwrap();
        FlowContext::new(f, delta)
    }

    #[test]
    fn lands_at_attracting_node() {
        // z' = z (z^2 - 1): origin has eigenvalue -1.
        let c = ctx(2, (0.0, 0.0), (-1.0, 0.0), 0.0);
        let t = integrate(&c, Chart::Finite, Complex64::new(0.3, 0.2), &Controls::default(), &Events::default())
            .unwrap();
        assert_eq!(t.termination, Termination::LandedAtPoint(0));
        assert!(t.elapsed > 0.0);
        // Backward the same orbit goes to one of the repelling nodes +-1.
        let t = integrate(
            &c,
            Chart::Finite,
            Complex64::new(0.3, 0.2),
            &Controls::default().backward(),
            &Events::default(),
        )
        .unwrap();
        assert!(matches!(t.termination, Termination::LandedAtPoint(1) | Termination::LandedAtPoint(2)));
        assert!(t.elapsed < 0.0);
    }

    #[test]
    fn closes_around_a_center() {
        // delta = pi/2 turns the node at 0 of z (z^2 - 1) into a center with period 2 pi.
        let c = ctx(2, (0.0, 0.0), (-1.0, 0.0), std::f64::consts::FRAC_PI_2);
        let s = Section::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        let ev = Events::default().with_section(s);
        let t = integrate(&c, Chart::Finite, Complex64::new(0.01, 0.0), &Controls::default(), &ev).unwrap();
        match t.termination {
            Termination::Closed(p) => assert!((p - std::f64::consts::TAU).abs() < 1e-3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn escapes_along_attracting_direction() {
        // The positive real axis is invariant, so z0 = 5 lies on the separatrix.
        let c = ctx(3, (0.0, 0.0), (2.0, 0.0), 0.0);
        let t = integrate(&c, Chart::Finite, Complex64::new(5.0, 0.0), &Controls::default(), &Events::default())
            .unwrap();
        assert_eq!(t.termination, Termination::EscapedThroughSector(0));
        assert!(t.elapsed > 0.0 && t.elapsed < 1e-2);
        // Without the escape radius the pole itself is reached, at
        // int_5^inf dz / (z (z^3 + 2)) = ln(127/125) / 6.
        let t = integrate(
            &c,
            Chart::Finite,
            Complex64::new(5.0, 0.0),
            &Controls::default(),
            &Events::default().no_escape(),
        )
        .unwrap();
        assert_eq!(t.termination, Termination::EscapedThroughSector(0));
        let exact = (127.0f64 / 125.0).ln() / 6.0;
        assert!((t.elapsed - exact).abs() < 1e-8 * exact, "{} vs {exact}", t.elapsed);
    }

    #[test]
    fn rejects_start_on_singular_point() {
        let c = ctx(3, (0.0, 0.0), (1.0, 0.0), 0.0);
        let r = integrate(&c, Chart::Finite, Complex64::new(0.0, 0.0), &Controls::default(), &Events::default());
        assert_eq!(r, Err(Error::StartAtSingularPoint { index: 0 }));
    }
}
