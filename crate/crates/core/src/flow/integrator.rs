//! Dormand-Prince 5(4) step for the regularized system
//! `dp/dtau = V / (1 + |V|)`, `dt/dtau = +-1 / (1 + |V|)`. The system is
//! autonomous, so the stage nodes never appear.

use num_complex::Complex64;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct State {
    pub p: Complex64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Deriv {
    pub dp: Complex64,
    pub dt: f64,
}

impl Deriv {
    #[inline]
    fn scaled(self, h: f64) -> (Complex64, f64) {
        (self.dp * h, self.dt * h)
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// Fifth minus fourth order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

pub(crate) struct Step {
    pub y: State,
    /// Derivative at the new point (first stage of the next step).
    pub k_end: Deriv,
    pub err_p: Complex64,
    pub err_t: f64,
}

fn offset(y: State, terms: &[(f64, Deriv)], h: f64) -> State {
    let mut p = y.p;
    let mut t = y.t;
    for (a, k) in terms {
        let (dp, dt) = k.scaled(a * h);
        p += dp;
        t += dt;
    }
    State { p, t }
}

/// One step of size `h` from `y` with first stage `k1 = f(y)`.
pub(crate) fn dp45_step<F>(rhs: &mut F, y: State, k1: Deriv, h: f64) -> Result<Step>
where
    F: FnMut(Complex64) -> Result<Deriv>,
{
    let k2 = rhs(offset(y, &[(A21, k1)], h).p)?;
    let k3 = rhs(offset(y, &[(A31, k1), (A32, k2)], h).p)?;
    let k4 = rhs(offset(y, &[(A41, k1), (A42, k2), (A43, k3)], h).p)?;
    let k5 = rhs(offset(y, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)], h).p)?;
    let k6 = rhs(offset(y, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)], h).p)?;
    let y_new = offset(y, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)], h);
    let k7 = rhs(y_new.p)?;
    let mut err_p = Complex64::new(0.0, 0.0);
    let mut err_t = 0.0;
    for (e, k) in [(E1, k1), (E3, k3), (E4, k4), (E5, k5), (E6, k6), (E7, k7)] {
        let (dp, dt) = k.scaled(e * h);
        err_p += dp;
        err_t += dt;
    }
    Ok(Step { y: y_new, k_end: k7, err_p, err_t })
}
