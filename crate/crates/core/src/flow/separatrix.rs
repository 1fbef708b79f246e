//! The `2k` separatrices of the pole at infinity.

use num_complex::Complex64;

use super::trajectory::{integrate, Controls, Direction, Events, Termination, Trajectory};
use super::{infinity_time, infinity_time_density, pow_int, Chart, FlowContext};
use crate::error::Result;
use crate::Field;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Orientation {
    /// Reaches infinity in forward time (even direction index).
    Attracting,
    /// Leaves infinity in forward time (odd direction index).
    Repelling,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Separatrix {
    /// Direction index `n` in `0..2k`.
    pub index: usize,
    /// Asymptotic direction `(n pi - delta)/k` of `z`.
    pub angle: f64,
    pub orientation: Orientation,
    /// Traced from infinity inward: backward for attracting, forward for repelling.
    pub trajectory: Trajectory,
}

impl Separatrix {
    /// Finite endpoint, or the direction index of a homoclinic return to infinity.
    pub fn end(&self) -> Termination {
        self.trajectory.termination
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparatrixFan {
    pub delta: f64,
    pub separatrices: Vec<Separatrix>,
}

impl SeparatrixFan {
    pub fn attracting(&self) -> impl Iterator<Item = &Separatrix> {
        self.separatrices.iter().filter(|s| s.orientation == Orientation::Attracting)
    }

    pub fn repelling(&self) -> impl Iterator<Item = &Separatrix> {
        self.separatrices.iter().filter(|s| s.orientation == Orientation::Repelling)
    }

    /// Pairs `(n, m)` where separatrix `n` returns to infinity along direction `m`.
    pub fn homoclinic_connections(&self) -> Vec<(usize, usize)> {
        self.separatrices
            .iter()
            .filter_map(|s| match s.end() {
                Termination::EscapedThroughSector(m) => Some((s.index, m)),
                _ => None,
            })
            .collect()
    }
}

/// Point `w` (chart at infinity, `|w|` close to `rho`) lying exactly on separatrix `n`.
///
/// The local time `T` with `dT = dz/P` vanishes at the pole, and along an orbit
/// `T` moves on a straight line of direction `e^{i delta}`; the separatrices are
/// the lines through `T = 0`, so the start solves `T(w) = -w0^k / k` by Newton.
pub fn separatrix_start(ctx: &FlowContext, n: usize, rho: f64) -> Complex64 {
    let k = ctx.k();
    let phi = (ctx.delta - n as f64 * std::f64::consts::PI) / k as f64;
    let w0 = Complex64::from_polar(rho, phi);
    let target = -pow_int(w0, k) / k as f64;
    let mut w = w0;
    for _ in 0..30 {
        let r = infinity_time(&ctx.field, w) - target;
        let dw = r / infinity_time_density(&ctx.field, w);
        w -= dw;
        if dw.norm() <= 1e-15 * rho {
            break;
        }
    }
    w
}

/// Traces separatrix `n` inward from infinity.
pub fn trace_separatrix(ctx: &FlowContext, n: usize, controls: &Controls) -> Result<Separatrix> {
    trace_separatrix_with(ctx, n, controls, &Events::default().no_escape())
}

/// As [`trace_separatrix`] with explicit events; the escape radius should stay disarmed.
pub fn trace_separatrix_with(
    ctx: &FlowContext,
    n: usize,
    controls: &Controls,
    events: &Events,
) -> Result<Separatrix> {
    let orientation = if n % 2 == 0 { Orientation::Attracting } else { Orientation::Repelling };
    let mut c = controls.clone();
    c.direction = match orientation {
        Orientation::Attracting => Direction::Backward,
        Orientation::Repelling => Direction::Forward,
    };
    let w = separatrix_start(ctx, n, 0.8 / ctx.r_switch);
    let trajectory = integrate(ctx, Chart::Infinity, w, &c, events)?;
    Ok(Separatrix { index: n, angle: ctx.direction_angle(n), orientation, trajectory })
}

/// All `2k` separatrices of `e^{i delta} P`, ordered by direction index.
pub fn separatrix_fan(f: &Field, delta: f64) -> Result<SeparatrixFan> {
    separatrix_fan_in(&FlowContext::new(*f, delta), &Controls::default())
}

pub fn separatrix_fan_in(ctx: &FlowContext, controls: &Controls) -> Result<SeparatrixFan> {
    let separatrices =
        (0..2 * ctx.k()).map(|n| trace_separatrix(ctx, n, controls)).collect::<Result<Vec<_>>>()?;
    Ok(SeparatrixFan { delta: ctx.delta, separatrices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::angle_diff;
    use std::f64::consts::PI;

    fn field(k: usize, e1: (f64, f64), e0: (f64, f64)) -> Field {
        Field::new(k, Complex64::new(e1.0, e1.1), Complex64::new(e0.0, e0.1)).unwrap()
    }

    #[test]
    fn forward_directions_for_cubic_pole() {
        let fan = separatrix_fan(&field(3, (0.0, 0.0), (2.0, 0.0)), 0.0).unwrap();
        assert_eq!(fan.separatrices.len(), 6);
        let fwd: Vec<f64> = fan.attracting().map(|s| s.angle).collect();
        for (a, e) in fwd.iter().zip([0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0]) {
            assert!(angle_diff(*a, e).abs() < 1e-12);
        }
        // Alternation and uniform gaps.
        for w in fan.separatrices.windows(2) {
            assert_ne!(w[0].orientation, w[1].orientation);
            assert!((angle_diff(w[1].angle, w[0].angle) - PI / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn start_points_lie_on_the_separatrix_line() {
        let f = field(4, (0.6, -0.2), (0.3, 0.5));
        let ctx = FlowContext::new(f, 0.4);
        for n in 0..8 {
            let w = separatrix_start(&ctx, n, 0.8 / ctx.r_switch);
            let t = infinity_time(&f, w);
            // T is a real multiple of e^{i delta}.
            assert!((ctx.rotation.conj() * t).im.abs() < 1e-14 * t.norm());
            assert_eq!(ctx.sector_of_angle(crate::scalar::arg_positive(w.inv())), n);
        }
    }

    #[test]
    fn separatrices_land_on_nodes() {
        // ż = z (z^3 + 2): every finite point is a node or focus, no homoclinic loops.
        let ctx = FlowContext::new(field(3, (0.0, 0.0), (2.0, 0.0)), 0.0);
        let fan = separatrix_fan_in(&ctx, &Controls::default().unrecorded()).unwrap();
        for s in &fan.separatrices {
            assert!(matches!(s.end(), Termination::LandedAtPoint(_)), "{:?}", s.end());
        }
        // Attracting separatrices come out of repelling points, and vice versa.
        for s in &fan.separatrices {
            if let Termination::LandedAtPoint(j) = s.end() {
                let re = ctx.points[j].eigenvalue.unwrap().re;
                match s.orientation {
                    Orientation::Attracting => assert!(re > 0.0),
                    Orientation::Repelling => assert!(re < 0.0),
                }
            }
        }
    }

    #[test]
    fn rotation_by_pi_swaps_orientations() {
        let f = field(3, (0.0, 0.0), (2.0, 0.0));
        let a = separatrix_fan_in(&FlowContext::new(f, 0.0), &Controls::default().unrecorded()).unwrap();
        let b = separatrix_fan_in(&FlowContext::new(f, PI), &Controls::default().unrecorded()).unwrap();
        let fa: Vec<f64> = a.attracting().map(|s| s.angle).collect();
        let rb: Vec<f64> = b.repelling().map(|s| s.angle).collect();
        for x in fa {
            assert!(rb.iter().any(|y| angle_diff(x, *y).abs() < 1e-12));
        }
    }
}
