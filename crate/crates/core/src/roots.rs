//! Singular points of `P(z) = z Q(z)`: roots, multiplicities, eigenvalues, periods.

use std::cmp::Ordering;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::field::FieldSpec;
use crate::scalar::{arg_positive, cis, wrap_into, Scalar};

/// Iteration cap of the simultaneous root iteration.
pub const ROOT_MAX_ITER: usize = 200;

/// Arguments closer than this are considered equal when ordering roots.
const ARG_TIE: f64 = 1e-10;

/// One equilibrium of the field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPoint<T: Scalar> {
    pub index: usize,
    pub location: Complex<T>,
    pub multiplicity: usize,
    /// `P'(z_j)`, present iff the point is simple.
    pub eigenvalue: Option<Complex<T>>,
    /// `2 pi i / P'(z_j)`, present iff the point is simple.
    pub period: Option<Complex<T>>,
}

impl<T: Scalar> SingularPoint<T> {
    /// `multiplicity - 1`.
    pub fn codim(&self) -> usize {
        self.multiplicity - 1
    }

    pub fn is_simple(&self) -> bool {
        self.multiplicity == 1
    }
}

/// Roots of a monic polynomial by Aberth-Ehrlich simultaneous iteration.
///
/// `coeffs` are in increasing degree and the leading coefficient must be 1.
/// `radius` is the circle the initial guesses are placed on.
pub fn aberth_roots<T: Scalar>(coeffs: &[Complex<T>], radius: T) -> Vec<Complex<T>> {
    let n = coeffs.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let tol = T::root_tolerance();
    let eval = |z: Complex<T>| -> (Complex<T>, Complex<T>) {
        let mut p = coeffs[n];
        let mut dp = Complex::new(T::zero(), T::zero());
        for c in coeffs[..n].iter().rev() {
            dp = dp * z + p;
            p = p * z + *c;
        }
        (p, dp)
    };
    let mut z: Vec<Complex<T>> = (0..n)
        .map(|j| cis(T::TAU() * T::int(j) / T::int(n) + T::lit(0.4)) * radius)
        .collect();
    let floor = radius * T::lit(1e-3);
    for _ in 0..ROOT_MAX_ITER {
        let mut converged = true;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == T::zero() {
                continue;
            }
            let ratio = p / dp;
            let mut sum = Complex::new(T::zero(), T::zero());
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > T::zero() {
                        sum = sum + d.inv();
                    }
                }
            }
            let denom = Complex::new(T::one(), T::zero()) - ratio * sum;
            let w = if denom.norm() > T::zero() && (ratio.re.is_finite() && ratio.im.is_finite()) {
                ratio / denom
            } else {
                // Exact coincidence or vanishing derivative; nudge off the degenerate spot.
                Complex::new(floor * T::lit(1e-3), T::zero())
            };
            z[i] = z[i] - w;
            if w.norm() > tol * (z[i].norm() + floor) {
                converged = false;
            }
        }
        if converged {
            break;
        }
    }
    z
}

/// Initial-guess radius `max(1, |eps1|^{1/(k-1)}, |eps0|^{1/k})`.
pub fn initial_radius<T: Scalar>(f: &FieldSpec<T>) -> T {
    let k = f.k();
    T::one()
        .max(f.eps1.norm().powf(T::int(k - 1).recip()))
        .max(f.eps0.norm().powf(T::int(k).recip()))
}

/// Roots of `Q(z) = z^k + eps1 z + eps0`, polished with Newton where the root is simple.
pub fn q_roots<T: Scalar>(f: &FieldSpec<T>) -> Vec<Complex<T>> {
    let mut z = aberth_roots(&f.q_coefficients(), initial_radius(f));
    let k = f.k();
    for r in z.iter_mut() {
        for _ in 0..2 {
            let dq = r.powi(k as i32 - 1) * T::int(k) + f.eps1;
            let q = f.q(*r);
            if dq.norm() <= T::lit(1e-6) * (T::one() + r.norm()).powi(k as i32 - 1) {
                break;
            }
            let step = q / dq;
            if !(step.re.is_finite() && step.im.is_finite()) {
                break;
            }
            *r = *r - step;
        }
    }
    z
}

fn cmp_by_argument<T: Scalar>(a: &Complex<T>, b: &Complex<T>) -> Ordering {
    let snap = |x: T| if T::TAU() - x <= T::lit(ARG_TIE) { T::zero() } else { x };
    let aa = snap(arg_positive(*a));
    let ab = snap(arg_positive(*b));
    if (aa - ab).abs() <= T::lit(ARG_TIE) {
        a.norm().partial_cmp(&b.norm()).unwrap_or(Ordering::Equal)
    } else {
        aa.partial_cmp(&ab).unwrap_or(Ordering::Equal)
    }
}

/// Sorts by increasing argument. Several roots on the positive real axis
/// (theta = 0): the innermost keeps argument 0 and the others continue the order
/// from just below 2pi, which keeps indices continuous as theta -> 0+.
fn order_by_argument<T: Scalar, X>(v: &mut Vec<X>, loc: impl Fn(&X) -> Complex<T>) {
    v.sort_by(|a, b| cmp_by_argument(&loc(a), &loc(b)));
    let on_axis = v
        .iter()
        .take_while(|c| {
            let a = arg_positive(loc(c));
            a <= T::lit(ARG_TIE) || T::TAU() - a <= T::lit(ARG_TIE)
        })
        .count();
    if on_axis > 1 {
        let tail: Vec<_> = v.drain(1..on_axis).collect();
        v.extend(tail);
    }
}

/// All singular points of `P`, clustered into multiple points.
///
/// Index 0 is the origin. The remaining points are ordered by increasing
/// argument in `[0, 2pi)`, equal arguments by increasing modulus.
pub fn singular_points<T: Scalar>(f: &FieldSpec<T>) -> Vec<SingularPoint<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut all = vec![zero];
    all.extend(q_roots(f));
    let max_mod = all.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    // Away from both collision loci (Delta = 0 among the roots of Q, eps0 = 0 with the
    // origin) every point is simple, however close.
    let origin_guard = T::lit(1e-8) * f.norm().powi(f.k() as i32);
    let tol = if f.near_parabolic() || f.eps0.norm() <= origin_guard {
        T::cluster_tolerance() * (T::one() + max_mod)
    } else {
        -T::one()
    };

    // Single-linkage clustering; the cluster holding the explicit origin stays at 0.
    let n = all.len();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if (all[i] - all[j]).norm() <= tol {
                let (li, lj) = (label[i], label[j]);
                if li != lj {
                    let keep = li.min(lj);
                    let drop = li.max(lj);
                    for l in label.iter_mut() {
                        if *l == drop {
                            *l = keep;
                        }
                    }
                }
            }
        }
    }
    let mut clusters: Vec<(Complex<T>, usize)> = Vec::new();
    let mut origin_mult = 0;
    let mut seen = Vec::new();
    for i in 0..n {
        let l = label[i];
        if seen.contains(&l) {
            continue;
        }
        seen.push(l);
        let members: Vec<Complex<T>> =
            (0..n).filter(|&j| label[j] == l).map(|j| all[j]).collect();
        if l == label[0] {
            origin_mult = members.len();
            continue;
        }
        let sum = members.iter().fold(zero, |a, b| a + *b);
        clusters.push((sum / T::int(members.len()), members.len()));
    }
    order_by_argument(&mut clusters, |c| c.0);

    let mut out = Vec::with_capacity(clusters.len() + 1);
    let mut push = |location: Complex<T>, multiplicity: usize| {
        let (eigenvalue, period) = if multiplicity == 1 {
            let lam = f.derivative(location);
            (Some(lam), Some(Complex::new(T::zero(), T::TAU()) / lam))
        } else {
            (None, None)
        };
        let index = out.len();
        out.push(SingularPoint { index, location, multiplicity, eigenvalue, period });
    };
    push(zero, origin_mult);
    for (z, m) in clusters {
        push(z, m);
    }
    out
}

/// `P'(z)` at a simple singular point `z`.
pub fn eigenvalue<T: Scalar>(f: &FieldSpec<T>, z: Complex<T>) -> Result<Complex<T>> {
    let residual = f.evaluate(z).norm();
    let scale = f.evaluate_magnitude(z).max(T::epsilon());
    if residual > T::lit(1e-8) * scale {
        return Err(Error::NotSingular { residual: residual.to_f64().unwrap_or(f64::NAN) });
    }
    let lam = f.derivative(z);
    if lam.norm() <= T::lit(1e-12) * f.derivative_magnitude(z).max(T::min_positive_value()) {
        return Err(Error::Parabolic);
    }
    Ok(lam)
}

/// `nu = 2 pi i / lambda` of a simple point.
pub fn period<T: Scalar>(p: &SingularPoint<T>) -> Result<Complex<T>> {
    match (p.multiplicity, p.eigenvalue) {
        (1, Some(lam)) => Ok(Complex::new(T::zero(), T::TAU()) / lam),
        _ => Err(Error::Parabolic),
    }
}

/// Closed-form eigenvalues at `alpha = 0`: `lambda_0 = (k-1) s^k e^{i theta}` and
/// `lambda_j = k (k-1) ((1-s)^{k-1} z_j - s^k e^{i theta})` for a nonzero root `z_j`.
pub fn closed_form_eigenvalue<T: Scalar>(
    k: usize,
    s: T,
    theta: T,
    z: Option<Complex<T>>,
) -> Complex<T> {
    let kf = T::int(k);
    let km1 = T::int(k - 1);
    let sk = cis(theta) * s.powi(k as i32);
    match z {
        None => sk * km1,
        Some(z) => (z * (T::one() - s).powi(k as i32 - 1) - sk) * (kf * km1),
    }
}

/// True when every point is simple and the discriminant is outside the guard band.
pub fn generic_configuration<T: Scalar>(f: &FieldSpec<T>, pts: &[SingularPoint<T>]) -> bool {
    pts.iter().all(|p| p.is_simple()) && !f.near_parabolic()
}

/// Containment of `arg z_j` in its sector `[lo, hi]` at `alpha = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorCheck {
    pub index: usize,
    pub arg: f64,
    pub lo: f64,
    pub hi: f64,
    pub inside: bool,
}

/// Sectors holding the nonzero roots for `theta in [0, pi/(k-1)]`, `s in (0, 1]`:
/// `arg z_1 in [theta, (theta+pi)/k]`, `arg z_j in [2pi(j-1)/(k-1), (theta+(2j-1)pi)/k]`
/// for `j <= (k+1)/2`, and the reversed interval above that. Roots are matched to
/// sectors one to one when possible, since near `s = 0` a root on a sector
/// boundary can sort on either side of the positive axis.
pub fn root_sectors(k: usize, s: f64, theta: f64, tol: f64) -> Result<Vec<SectorCheck>> {
    use std::f64::consts::{PI, TAU};
    let f = FieldSpec::from_sphere(crate::field::SphereCoords::new(s, theta, 0.0), k)?;
    // Roots of Q directly, so the check also runs inside the guard band.
    let mut roots = q_roots(&f);
    order_by_argument(&mut roots, |z| *z);
    let (kf, km1) = (k as f64, (k - 1) as f64);
    let sectors: Vec<(f64, f64)> = (1..=k)
        .map(|index| {
            let j = index as f64;
            if index == 1 {
                (theta, (theta + PI) / kf)
            } else if 2 * index <= k + 1 {
                (TAU * (j - 1.0) / km1, (theta + (2.0 * j - 1.0) * PI) / kf)
            } else {
                ((theta + (2.0 * j - 1.0) * PI) / kf, TAU * (j - 1.0) / km1)
            }
        })
        .collect();
    let fits = |z: &Complex<f64>, (lo, hi): (f64, f64)| {
        let off = wrap_into(z.arg() - lo, TAU);
        off <= hi - lo + tol || off >= TAU - tol
    };
    let mut used = vec![false; k];
    let mut pick = vec![0; k];
    let matched = assign(0, &sectors, &roots, &fits, &mut used, &mut pick);
    Ok(sectors
        .iter()
        .enumerate()
        .map(|(i, &(lo, hi))| {
            let z = roots[if matched { pick[i] } else { i }];
            SectorCheck { index: i + 1, arg: arg_positive(z), lo, hi, inside: fits(&z, (lo, hi)) }
        })
        .collect())
}

/// Backtracking search, preferring roots in argument order.
fn assign(
    i: usize,
    sectors: &[(f64, f64)],
    roots: &[Complex<f64>],
    fits: &impl Fn(&Complex<f64>, (f64, f64)) -> bool,
    used: &mut [bool],
    pick: &mut [usize],
) -> bool {
    if i == sectors.len() {
        return true;
    }
    let n = roots.len();
    for r in (0..n).map(|d| (i + d) % n) {
        if !used[r] && fits(&roots[r], sectors[i]) {
            used[r] = true;
            pick[i] = r;
            if assign(i + 1, sectors, roots, fits, used, pick) {
                return true;
            }
            used[r] = false;
        }
    }
    false
}
