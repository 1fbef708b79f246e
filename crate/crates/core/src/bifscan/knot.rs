use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::scalar::angle_diff;
use crate::{Field, Sphere};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct KnotDiagnostics {
    pub winding_eps1: i64,
    pub winding_eps0: i64,
    pub closes: bool,
}

/// Windings of `arg eps1` and `arg eps0` once around the `Delta = 0` curve
/// `(1/2, 0, alpha)`, `alpha in [0, 2pi]`, sampled at `n + 1` points.
pub fn knot_diagnostics(k: usize, n: usize) -> Result<KnotDiagnostics> {
    if k < 2 {
        return Err(Error::InvalidDegree(k));
    }
    if n < 8 * k {
        return Err(Error::InvalidConfig(format!("need at least {} samples, got {n}", 8 * k)));
    }
    let fields = (0..=n)
        .map(|m| Field::from_sphere(Sphere::new(0.5, 0.0, TAU * m as f64 / n as f64), k))
        .collect::<Result<Vec<_>>>()?;
    let winding = |get: fn(&Field) -> f64| {
        let total: f64 = fields.windows(2).map(|w| angle_diff(get(&w[1]), get(&w[0]))).sum();
        (total / TAU).round() as i64
    };
    let (first, last) = (fields[0], fields[n]);
    let closes = (first.eps1 - last.eps1).norm() + (first.eps0 - last.eps0).norm() < 1e-12
        && fields.iter().all(|f| f.near_parabolic());
    Ok(KnotDiagnostics {
        winding_eps1: winding(|f| f.eps1.arg()),
        winding_eps0: winding(|f| f.eps0.arg()),
        closes,
    })
}
