//! The family `z' = z (z^k + eps1 z + eps0)` and its parameter sphere.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{cis, wrap_angle, wrap_into, Scalar};

/// One member `P(z) = z (z^k + eps1 z + eps0)` of the family, `k >= 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSpec<T: Scalar> {
    k: usize,
    pub eps1: Complex<T>,
    pub eps0: Complex<T>,
}

/// Coordinates `(s, theta, alpha)` on the unit sphere `||eps|| = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereCoords<T: Scalar> {
    pub s: T,
    pub theta: T,
    pub alpha: T,
}

impl<T: Scalar> SphereCoords<T> {
    pub fn new(s: T, theta: T, alpha: T) -> Self {
        Self { s, theta, alpha }
    }
}

impl<T: Scalar> FieldSpec<T> {
    pub fn new(k: usize, eps1: Complex<T>, eps0: Complex<T>) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidDegree(k));
        }
        Ok(Self { k, eps1, eps0 })
    }

    /// Field on the sphere at `(s, theta, alpha)`:
    /// `eps0 = (k-1) s^k e^{i(theta - k alpha)}`, `eps1 = -k (1-s)^{k-1} e^{-i(k-1) alpha}`.
    pub fn from_sphere(c: SphereCoords<T>, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidDegree(k));
        }
        let kf = T::int(k);
        let km1 = T::int(k - 1);
        let one = T::one();
        let eps0 = cis(c.theta - kf * c.alpha) * (km1 * c.s.powi(k as i32));
        let eps1 = cis(-km1 * c.alpha) * (-kf * (one - c.s).powi(k as i32 - 1));
        Ok(Self { k, eps1, eps0 })
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    /// Degree of `P`, i.e. `k + 1`.
    #[inline]
    pub fn degree(&self) -> usize {
        self.k + 1
    }

    /// `Q(z) = z^k + eps1 z + eps0`, the factor carrying the nonzero roots.
    #[inline]
    pub fn q(&self, z: Complex<T>) -> Complex<T> {
        z.powi(self.k as i32) + self.eps1 * z + self.eps0
    }

    /// `P(z) = z Q(z)`.
    #[inline]
    pub fn evaluate(&self, z: Complex<T>) -> Complex<T> {
        z * self.q(z)
    }

    /// `P'(z) = (k+1) z^k + 2 eps1 z + eps0`.
    #[inline]
    pub fn derivative(&self, z: Complex<T>) -> Complex<T> {
        z.powi(self.k as i32) * T::int(self.k + 1) + self.eps1 * z * T::int(2) + self.eps0
    }

    /// Sum of the moduli of the monomials of `P` at `z`; the natural scale for
    /// residual tests.
    pub fn evaluate_magnitude(&self, z: Complex<T>) -> T {
        let r = z.norm();
        r.powi(self.k as i32 + 1) + self.eps1.norm() * r * r + self.eps0.norm() * r
    }

    /// Sum of the moduli of the monomials of `P'` at `z`.
    pub fn derivative_magnitude(&self, z: Complex<T>) -> T {
        let r = z.norm();
        T::int(self.k + 1) * r.powi(self.k as i32)
            + T::int(2) * self.eps1.norm() * r
            + self.eps0.norm()
    }

    /// Coefficients of `Q` in increasing degree, `[eps0, eps1, 0, ..., 0, 1]`.
    pub fn q_coefficients(&self) -> Vec<Complex<T>> {
        let mut c = vec![Complex::new(T::zero(), T::zero()); self.k + 1];
        c[0] = self.eps0;
        c[1] = c[1] + self.eps1;
        c[self.k] = c[self.k] + Complex::new(T::one(), T::zero());
        c
    }

    /// `||eps|| = (|eps0|/(k-1))^{1/k} + (|eps1|/k)^{1/(k-1)}`.
    pub fn norm(&self) -> T {
        let kf = T::int(self.k);
        let km1 = T::int(self.k - 1);
        (self.eps0.norm() / km1).powf(kf.recip()) + (self.eps1.norm() / kf).powf(km1.recip())
    }

    /// Image of the field under `z -> A z`, `t -> A^{-k} t` with real `A = r > 0`:
    /// `(r^{k-1} eps1, r^k eps0)`.
    pub fn rescaled(&self, r: T) -> Self {
        Self {
            k: self.k,
            eps1: self.eps1 * r.powi(self.k as i32 - 1),
            eps0: self.eps0 * r.powi(self.k as i32),
        }
    }

    /// Representative on the unit sphere and the scale `r` with
    /// `from_sphere(c).rescaled(r) == self`.
    pub fn to_sphere(&self) -> Result<(SphereCoords<T>, T)> {
        if self.eps0.norm() == T::zero() && self.eps1.norm() == T::zero() {
            return Err(Error::ZeroParameter);
        }
        let k = self.k;
        let kf = T::int(k);
        let km1 = T::int(k - 1);
        let r = self.norm();
        let unit = self.rescaled(r.recip());
        let s = (unit.eps0.norm() / km1).powf(kf.recip()).min(T::one());
        let (theta, alpha) = if unit.eps1.norm() == T::zero() {
            (T::zero(), wrap_angle(-unit.eps0.arg() / kf))
        } else {
            let alpha = wrap_angle(-(-unit.eps1).arg() / km1);
            let theta = if unit.eps0.norm() == T::zero() {
                T::zero()
            } else {
                wrap_angle(unit.eps0.arg() + kf * alpha)
            };
            (theta, alpha)
        };
        let s = if unit.eps1.norm() == T::zero() { T::one() } else { s };
        Ok((canonicalize(SphereCoords::new(s, theta, alpha), k), r))
    }

    /// `Delta = (-1)^{floor(k/2)} (k-1)^{k-1} k^k [ (eps0/(k-1))^{k-1} - (-eps1/k)^k ]`,
    /// the discriminant of `Q`.
    pub fn discriminant(&self) -> Complex<T> {
        let k = self.k;
        let kf = T::int(k);
        let km1 = T::int(k - 1);
        let sign = if (k / 2) % 2 == 0 { T::one() } else { -T::one() };
        let pref = sign * km1.powi(k as i32 - 1) * kf.powi(k as i32);
        let a = (self.eps0 / km1).powi(k as i32 - 1);
        let b = (-self.eps1 / kf).powi(k as i32);
        (a - b) * pref
    }

    /// Guard-band threshold for the discriminant: `1e-8 * ||eps||^{k(k-1)}`.
    pub fn parabolic_guard(&self) -> T {
        T::lit(1e-8) * self.norm().powi((self.k * (self.k - 1)) as i32)
    }

    /// True when `|Delta|` is inside the guard band.
    pub fn near_parabolic(&self) -> bool {
        self.discriminant().norm() < self.parabolic_guard()
    }

    /// Parameters conjugate to `self` under reflection in the line `e^{m pi i/k} R`:
    /// `(e^{-2 m pi i/k} conj(eps1), conj(eps0))`.
    pub fn symmetry_reflect(&self, m: i64) -> Self {
        let phi = -T::lit(2.0 * m as f64) * T::PI() / T::int(self.k);
        Self { k: self.k, eps1: cis(phi) * self.eps1.conj(), eps0: self.eps0.conj() }
    }

    /// Parameters conjugate to `self` under reflection in `e^{(2m+1) pi i/(2k)} R`
    /// combined with time reversal: `(-e^{-(2m+1) pi i/k} conj(eps1), -conj(eps0))`.
    pub fn symmetry_reverse(&self, m: i64) -> Self {
        let phi = -T::lit((2 * m + 1) as f64) * T::PI() / T::int(self.k);
        Self { k: self.k, eps1: -(cis(phi) * self.eps1.conj()), eps0: -self.eps0.conj() }
    }

    /// The reflection `sigma` matching [`Self::symmetry_reflect`]: `z -> e^{2 m pi i/k} conj(z)`.
    pub fn reflect_point(&self, m: i64, z: Complex<T>) -> Complex<T> {
        cis(T::lit(2.0 * m as f64) * T::PI() / T::int(self.k)) * z.conj()
    }

    /// The reflection matching [`Self::symmetry_reverse`]: `z -> e^{(2m+1) pi i/k} conj(z)`.
    pub fn reverse_point(&self, m: i64, z: Complex<T>) -> Complex<T> {
        cis(T::lit((2 * m + 1) as f64) * T::PI() / T::int(self.k)) * z.conj()
    }
}

/// Representative of `c` in the fundamental domain `theta in [0, 2pi/(k-1))`, using
/// `(s, theta, alpha) ~ (s, theta + 2pi/(k-1), alpha + 2pi/(k-1))` and the
/// degenerations at `s = 0` and `s = 1`.
pub fn canonicalize<T: Scalar>(c: SphereCoords<T>, k: usize) -> SphereCoords<T> {
    let tau = T::TAU();
    let s = c.s;
    if s == T::zero() {
        let period = tau / T::int(k - 1);
        return SphereCoords::new(s, T::zero(), wrap_into(c.alpha, period));
    }
    if s == T::one() {
        let period = tau / T::int(k);
        let alpha = wrap_into(c.alpha - c.theta / T::int(k), period);
        return SphereCoords::new(s, T::zero(), alpha);
    }
    let period = tau / T::int(k - 1);
    let theta = wrap_angle(c.theta);
    let n = (theta / period).floor();
    let mut t = theta - n * period;
    let mut a = c.alpha - n * period;
    if t >= period {
        t = t - period;
        a = a - period;
    }
    if t < T::zero() {
        t = T::zero();
    }
    SphereCoords::new(s, t, wrap_angle(a))
}

/// Free-function forms used by callers that prefer them.
pub fn from_sphere<T: Scalar>(c: SphereCoords<T>, k: usize) -> Result<FieldSpec<T>> {
    FieldSpec::from_sphere(c, k)
}

pub fn norm<T: Scalar>(f: &FieldSpec<T>) -> T {
    f.norm()
}

pub fn to_sphere<T: Scalar>(f: &FieldSpec<T>) -> Result<(SphereCoords<T>, T)> {
    f.to_sphere()
}

pub fn discriminant<T: Scalar>(f: &FieldSpec<T>) -> Complex<T> {
    f.discriminant()
}
