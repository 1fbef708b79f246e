//! Trajectories of `z' = e^{i delta} P(z)` on the Riemann sphere.
//!
//! Two charts cover the sphere: the finite chart `z` and the chart at
//! infinity `w = 1/z`, where the pole of order `k - 1` sits at `w = 0`.
//! Integration runs in a regularized time `d tau = (1 + |V|) dt`, which is
//! unit speed near the pole and ordinary time near the equilibria; the true
//! time `t` is carried as an auxiliary quadrature.

mod classify;
mod integrator;
mod separatrix;
mod trajectory;

pub use classify::{classify_orbit, classify_orbit_in, OrbitClass};
pub use separatrix::{
    separatrix_fan, separatrix_fan_in, separatrix_start, trace_separatrix, trace_separatrix_with,
    Orientation,
    Separatrix, SeparatrixFan,
};
pub use trajectory::{
    integrate, Controls, Direction, Events, Sample, Section, Termination, Trajectory,
};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::roots::{singular_points, SingularPoint};
use crate::scalar::{cis, wrap_angle};
use crate::Field;

/// Coordinate chart on the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Chart {
    Finite,
    Infinity,
}

#[inline]
pub(crate) fn pow_int(z: Complex64, n: usize) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        acc *= z;
    }
    acc
}

/// Velocity of `e^{i delta} P` expressed in `chart`.
///
/// In the chart at infinity `dw/dt = -e^{i delta} (w^{1-k} + eps1 + eps0 w)`.
pub fn field_in_chart(f: &Field, delta: f64, chart: Chart, point: Complex64) -> Result<Complex64> {
    let rot = cis(delta);
    match chart {
        Chart::Finite => Ok(rot * f.evaluate(point)),
        Chart::Infinity => {
            if point.norm() == 0.0 {
                return Err(Error::PoleEvaluation);
            }
            let k = f.k();
            let inv = pow_int(point, k - 1).inv();
            Ok(-rot * (inv + f.eps1 + f.eps0 * point))
        }
    }
}

/// Per-field data shared by every trajectory of one rotated field.
#[derive(Debug, Clone)]
pub struct FlowContext {
    pub field: Field,
    pub delta: f64,
    pub rotation: Complex64,
    pub points: Vec<SingularPoint<f64>>,
    /// `1 + max_j |z_j|`.
    pub scale: f64,
    /// Smallest distance between two distinct singular points (capped at `scale`).
    pub min_separation: f64,
    /// `2 (1 + max_j |z_j|)`.
    pub r_switch: f64,
    /// `10 (1 + max_j |z_j|)`.
    pub r_escape: f64,
    /// Landing radius per singular point.
    pub landing_radius: Vec<f64>,
}

impl FlowContext {
    pub fn new(field: Field, delta: f64) -> Self {
        let points = singular_points(&field);
        Self::with_points(field, delta, points)
    }

    pub fn with_points(field: Field, delta: f64, points: Vec<SingularPoint<f64>>) -> Self {
        let max_mod = points.iter().map(|p| p.location.norm()).fold(0.0, f64::max);
        let scale = 1.0 + max_mod;
        let nearest: Vec<f64> = points
            .iter()
            .map(|p| {
                points
                    .iter()
                    .filter(|q| q.index != p.index)
                    .map(|q| (q.location - p.location).norm())
                    .fold(scale, f64::min)
            })
            .collect();
        let min_separation = nearest.iter().copied().fold(scale, f64::min);
        let landing_radius = nearest.iter().map(|d| (1e-6 * scale).min(1e-3 * d)).collect();
        Self {
            field,
            delta,
            rotation: cis(delta),
            points,
            scale,
            min_separation,
            r_switch: 2.0 * scale,
            r_escape: 10.0 * scale,
            landing_radius,
        }
    }

    /// Same field and points, different rotation.
    pub fn rotated(&self, delta: f64) -> Self {
        let mut c = self.clone();
        c.delta = delta;
        c.rotation = cis(delta);
        c
    }

    pub fn k(&self) -> usize {
        self.field.k()
    }

    /// Nearest separatrix direction index `n` in `0..2k` for a point in direction `phi`:
    /// direction `n` has angle `(n pi - delta)/k`; even `n` attract to infinity in
    /// forward time, odd `n` repel.
    pub fn sector_of_angle(&self, phi: f64) -> usize {
        let k = self.k() as f64;
        let n = ((k * phi + self.delta) / std::f64::consts::PI).round() as i64;
        n.rem_euclid(2 * self.k() as i64) as usize
    }

    /// Angle of separatrix direction `n`.
    pub fn direction_angle(&self, n: usize) -> f64 {
        wrap_angle((n as f64 * std::f64::consts::PI - self.delta) / self.k() as f64)
    }

    /// Index of the elliptic sector of infinity containing direction `phi`; sector `n`
    /// lies between separatrix directions `n` and `n + 1`.
    pub fn elliptic_sector_of_angle(&self, phi: f64) -> usize {
        let k = self.k() as f64;
        let n = ((k * phi + self.delta) / std::f64::consts::PI).floor() as i64;
        n.rem_euclid(2 * self.k() as i64) as usize
    }

    /// Local time coordinate at infinity, `T(w) = int_0^w -v^{k-1} / (1 + eps1 v^{k-1} + eps0 v^k) dv`,
    /// so that `dT = dz / P(z)` and `T(0) = 0`. Valid for `|w| <= 1/r_switch`.
    pub fn infinity_time(&self, w: Complex64) -> Complex64 {
        infinity_time(&self.field, w)
    }
}

// 16-point Gauss-Legendre nodes and weights on [-1, 1] (positive half).
const GL_X: [f64; 8] = [
    0.095_012_509_837_637_44,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_4,
    0.617_876_244_402_643_7,
    0.755_404_408_355_003,
    0.865_631_202_387_831_7,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];
const GL_W: [f64; 8] = [
    0.189_450_610_455_068_5,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_5,
    0.149_595_988_816_576_7,
    0.124_628_971_255_533_9,
    0.095_158_511_682_492_78,
    0.062_253_523_938_647_89,
    0.027_152_459_411_754_095,
];

pub(crate) fn infinity_time_density(f: &Field, v: Complex64) -> Complex64 {
    let k = f.k();
    let vk1 = pow_int(v, k - 1);
    -vk1 / (Complex64::new(1.0, 0.0) + f.eps1 * vk1 + f.eps0 * vk1 * v)
}

/// See [`FlowContext::infinity_time`].
pub fn infinity_time(f: &Field, w: Complex64) -> Complex64 {
    let half = w * 0.5;
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, wt) in GL_X.iter().zip(GL_W.iter()) {
        acc += infinity_time_density(f, half * (1.0 + x)) * *wt;
        acc += infinity_time_density(f, half * (1.0 - x)) * *wt;
    }
    acc * half
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(k: usize, e1: (f64, f64), e0: (f64, f64)) -> Field {
        Field::new(k, Complex64::new(e1.0, e1.1), Complex64::new(e0.0, e0.1)).unwrap()
    }

    #[test]
    fn finite_chart_vanishes_at_origin() {
        let f = field(3, (0.4, 0.1), (2.0, 0.0));
        let v = field_in_chart(&f, 0.3, Chart::Finite, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn infinity_chart_pure_power() {
        let f = field(3, (0.0, 0.0), (0.0, 0.0));
        let v = field_in_chart(&f, 0.0, Chart::Infinity, Complex64::new(0.1, 0.0)).unwrap();
        assert!((v - Complex64::new(-100.0, 0.0)).norm() < 1e-10);
        let v = field_in_chart(&f, 0.5, Chart::Infinity, Complex64::new(0.1, 0.0)).unwrap();
        assert!((v + cis(0.5) * 100.0).norm() < 1e-10);
        assert_eq!(
            field_in_chart(&f, 0.0, Chart::Infinity, Complex64::new(0.0, 0.0)),
            Err(Error::PoleEvaluation)
        );
    }

    #[test]
    fn charts_agree_under_inversion() {
        let f = field(4, (0.3, -0.8), (1.1, 0.4));
        let ctx = FlowContext::new(f, 0.7);
        for j in 0..12 {
            let z = cis(j as f64 * 0.5) * ctx.r_switch;
            let w = z.inv();
            let vz = field_in_chart(&f, 0.7, Chart::Finite, z).unwrap();
            let vw = field_in_chart(&f, 0.7, Chart::Infinity, w).unwrap();
            assert!((vw + w * w * vz).norm() < 1e-10 * vw.norm());
        }
    }

    #[test]
    fn infinity_time_matches_series() {
        // For eps = 0, T(w) = -w^k / k exactly.
        let f = field(3, (0.0, 0.0), (0.0, 0.0));
        let w = Complex64::new(0.03, -0.04);
        assert!((infinity_time(&f, w) + pow_int(w, 3) / 3.0).norm() < 1e-16);
        // dT/dw equals the density at a generic field (finite-difference oracle).
        let f = field(4, (0.5, 0.2), (-0.3, 0.9));
        let w = Complex64::new(0.05, 0.02);
        let h = 1e-6;
        let d = (infinity_time(&f, w + h) - infinity_time(&f, w - h)) / (2.0 * h);
        let rho = infinity_time_density(&f, w);
        assert!((d - rho).norm() < 1e-8 * rho.norm());
    }

    #[test]
    fn sector_indexing() {
        let f = field(3, (0.0, 0.0), (2.0, 0.0));
        let ctx = FlowContext::new(f, 0.0);
        assert_eq!(ctx.sector_of_angle(0.0), 0);
        assert_eq!(ctx.sector_of_angle(std::f64::consts::PI / 3.0), 1);
        assert_eq!(ctx.sector_of_angle(2.0 * std::f64::consts::PI / 3.0), 2);
        assert_eq!(ctx.sector_of_angle(-0.01), 0);
        assert_eq!(ctx.elliptic_sector_of_angle(0.1), 0);
        assert_eq!(ctx.elliptic_sector_of_angle(-0.1), 5);
    }
}
