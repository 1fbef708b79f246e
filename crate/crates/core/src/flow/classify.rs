//! Coarse classification of a single orbit by its two ends.

use num_complex::Complex64;

use super::trajectory::{integrate, Controls, Direction, Events, Section, Termination};
use super::{Chart, FlowContext};
use crate::error::Result;
use crate::Field;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum OrbitClass {
    /// Closed orbit with the measured return time.
    Periodic(f64),
    /// `alpha`-limit and `omega`-limit singular points.
    Heteroclinic(usize, usize),
    /// Comes from infinity along direction `sector_in` and leaves along `sector_out`.
    Escaping(usize, usize),
    /// From singular point `from_index` to infinity along direction `sector_out`.
    Outgoing(usize, usize),
    /// From infinity along direction `sector_in` to singular point `to_index`.
    Incoming(usize, usize),
    /// Some end exhausted the step budget.
    Undetermined,
}

enum End {
    Point(usize),
    Infinity(usize),
    Unknown,
}

fn end_of(t: Termination) -> End {
    match t {
        Termination::LandedAtPoint(j) => End::Point(j),
        Termination::EscapedThroughSector(n) => End::Infinity(n),
        _ => End::Unknown,
    }
}

/// Classifies the orbit of `z0` under `e^{i delta} P`.
pub fn classify_orbit(f: &Field, delta: f64, z0: Complex64) -> Result<OrbitClass> {
    classify_orbit_in(&FlowContext::new(*f, delta), z0, &Controls::default().unrecorded(), 3)
}

/// Forward integration with a Poincare ray from the nearest singular point through
/// `z0`; if the orbit does not close, a backward run supplies the other end.
pub fn classify_orbit_in(
    ctx: &FlowContext,
    z0: Complex64,
    controls: &Controls,
    confirm_returns: usize,
) -> Result<OrbitClass> {
    let center = ctx
        .points
        .iter()
        .min_by(|a, b| (a.location - z0).norm().total_cmp(&(b.location - z0).norm()))
        .map(|p| p.location)
        .unwrap_or_default();
    let mut section = Section::new(center, z0 - center);
    section.confirm_returns = confirm_returns;
    let mut fwd = controls.clone();
    fwd.direction = Direction::Forward;
    let ev = Events::default().with_section(section);
    let a = integrate(ctx, Chart::Finite, z0, &fwd, &ev)?;
    if let Termination::Closed(p) = a.termination {
        return Ok(OrbitClass::Periodic(p));
    }
    let b = integrate(ctx, Chart::Finite, z0, &fwd.clone().backward(), &Events::default())?;
    Ok(match (end_of(b.termination), end_of(a.termination)) {
        (End::Point(i), End::Point(j)) => OrbitClass::Heteroclinic(i, j),
        (End::Infinity(m), End::Infinity(n)) => OrbitClass::Escaping(m, n),
        (End::Point(i), End::Infinity(n)) => OrbitClass::Outgoing(i, n),
        (End::Infinity(m), End::Point(j)) => OrbitClass::Incoming(m, j),
        _ => OrbitClass::Undetermined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(k: usize, e1: (f64, f64), e0: (f64, f64)) -> Field {
        Field::new(k, Complex64::new(e1.0, e1.1), Complex64::new(e0.0, e0.1)).unwrap()
    }

    #[test]
    fn periodic_near_center() {
        let f = field(3, (0.0, 0.0), (2.0, 0.0));
        let nu = crate::roots::singular_points(&f)[0].period.unwrap();
        // e^{i pi/2} P has eigenvalue 2i at the origin.
        match classify_orbit(&f, std::f64::consts::FRAC_PI_2, Complex64::new(0.01, 0.0)).unwrap() {
            OrbitClass::Periodic(p) => assert!((p - nu.norm()).abs() < 0.01 * nu.norm()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn heteroclinic_between_nodes() {
        let f = field(3, (0.0, 0.0), (2.0, 0.0));
        let z = Complex64::from_polar(0.5, 0.3);
        match classify_orbit(&f, 0.0, z).unwrap() {
            OrbitClass::Heteroclinic(0, j) => assert!((1..=3).contains(&j)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn homoclinic_to_parabolic_point() {
        // z' = z^4 (all parameters zero): every non-separatrix orbit returns to 0.
        let f = field(3, (0.0, 0.0), (0.0, 0.0));
        let z = Complex64::from_polar(0.5, 0.5);
        assert_eq!(classify_orbit(&f, 0.0, z).unwrap(), OrbitClass::Heteroclinic(0, 0));
    }

    #[test]
    fn far_start_escapes() {
        let f = field(3, (0.0, 0.0), (2.0, 0.0));
        let z = Complex64::from_polar(50.0, 0.3);
        assert!(matches!(classify_orbit(&f, 0.0, z).unwrap(), OrbitClass::Escaping(..)));
    }
}
