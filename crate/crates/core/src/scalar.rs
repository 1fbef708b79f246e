//! Scalar abstraction for the closed-form algebra.
//!
//! Everything in [`crate::field`] and [`crate::roots`] is written against
//! [`Scalar`], so the same code runs in `f32` and `f64`. Integration,
//! domain detection and scanning are `f64` only.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar usable by the algebraic layer.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only if the value is not representable,
    /// which cannot happen for the finite literals used in this crate.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Converts an integer.
    #[inline]
    fn int(n: usize) -> Self {
        Self::from_usize(n).expect("small integer")
    }

    /// Relative convergence target for the root finder.
    fn root_tolerance() -> Self {
        Self::lit(1e-13).max(Self::epsilon() * Self::lit(16.0))
    }

    /// Relative distance under which two computed roots are one multiple root.
    fn cluster_tolerance() -> Self {
        Self::lit(1e-7).max(Self::epsilon().sqrt() * Self::lit(4.0))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `e^{i phi}`.
#[inline]
pub fn cis<T: Scalar>(phi: T) -> Complex<T> {
    Complex::new(phi.cos(), phi.sin())
}

/// Argument normalized into `[0, 2pi)`.
#[inline]
pub fn arg_positive<T: Scalar>(z: Complex<T>) -> T {
    wrap_angle(z.arg())
}

/// Wraps an angle into `[0, 2pi)`.
#[inline]
pub fn wrap_angle<T: Scalar>(phi: T) -> T {
    wrap_into(phi, T::TAU())
}

/// Wraps `x` into `[0, period)`.
pub fn wrap_into<T: Scalar>(x: T, period: T) -> T {
    let mut r = x - (x / period).floor() * period;
    if r >= period {
        r = r - period;
    }
    if r < T::zero() {
        r = r + period;
    }
    // `r + period` can round back up to `period` for tiny negative `r`.
    if r >= period {
        r = T::zero();
    }
    r
}

/// Signed angular difference `a - b` wrapped into `(-pi, pi]`.
pub fn angle_diff<T: Scalar>(a: T, b: T) -> T {
    let d = wrap_angle(a - b);
    if d > T::PI() {
        d - T::TAU()
    } else {
        d
    }
}
