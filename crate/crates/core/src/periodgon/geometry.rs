//! Planar polygon predicates with an absolute tolerance.

use num_complex::Complex64;

#[inline]
fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

/// Signed orientation of `c` relative to the line `a -> b`, zeroed inside the band `tol`.
fn orient(a: Complex64, b: Complex64, c: Complex64, tol: f64) -> i8 {
    let d = b - a;
    let len = d.norm();
    if len == 0.0 {
        return 0;
    }
    let dist = cross(d, c - a) / len;
    if dist > tol {
        1
    } else if dist < -tol {
        -1
    } else {
        0
    }
}

/// True when the open segments `ab` and `cd` cross at a single interior point.
pub fn proper_crossing(a: Complex64, b: Complex64, c: Complex64, d: Complex64, tol: f64) -> bool {
    let o1 = orient(a, b, c, tol);
    let o2 = orient(a, b, d, tol);
    let o3 = orient(c, d, a, tol);
    let o4 = orient(c, d, b, tol);
    o1 * o2 < 0 && o3 * o4 < 0
}

pub fn dist_point_segment(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let l2 = d.norm_sqr();
    if l2 == 0.0 {
        return (p - a).norm();
    }
    let s = ((p - a).conj() * d).re / l2;
    (a + d * s.clamp(0.0, 1.0) - p).norm()
}

/// Closed polygon `v[0] .. v[n-1]` (implicitly closed) contains `p`, boundary included.
pub fn inside_closed(p: Complex64, v: &[Complex64], tol: f64) -> bool {
    let n = v.len();
    for i in 0..n {
        if dist_point_segment(p, v[i], v[(i + 1) % n]) <= tol {
            return true;
        }
    }
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        if (a.im > p.im) != (b.im > p.im) {
            let x = a.re + (p.im - a.im) / (b.im - a.im) * (b.re - a.re);
            if x > p.re {
                inside = !inside;
            }
        }
    }
    inside
}

pub fn diameter(v: &[Complex64]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in v.iter().enumerate() {
        for b in &v[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    d
}

/// Twice the signed area.
pub fn signed_area2(v: &[Complex64]) -> f64 {
    let n = v.len();
    (0..n).map(|i| cross(v[i], v[(i + 1) % n])).sum()
}

/// All vertices on one line within `tol`.
pub fn collinear(v: &[Complex64], tol: f64) -> bool {
    let Some((i, j)) = farthest_pair(v) else { return true };
    v.iter().all(|p| dist_line(*p, v[i], v[j]) <= tol)
}

fn farthest_pair(v: &[Complex64]) -> Option<(usize, usize)> {
    let mut best = None;
    let mut d = 0.0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let e = (v[i] - v[j]).norm();
            if e > d {
                d = e;
                best = Some((i, j));
            }
        }
    }
    best
}

fn dist_line(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    cross(d, p - a).abs() / d.norm()
}

/// The closed chain has no proper self-crossing between non-adjacent edges.
pub fn simple_chain(v: &[Complex64], tol: f64) -> bool {
    let n = v.len();
    if n < 4 || collinear(v, tol) {
        return true;
    }
    for i in 0..n {
        for j in i + 1..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if proper_crossing(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n], tol) {
                return false;
            }
        }
    }
    true
}
