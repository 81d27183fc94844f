//! Auxiliary functions of the scaled argument `x = t^alpha`:
//!
//! * `u(t) = x / (e^x - 1)`, decreasing for every shape and convex for `alpha <= 1`;
//! * `v(t) = x / (1 - e^-x)`, increasing for every shape;
//! * `s(t) = 1 - v(t)`;
//! * `w(t) = alpha t^(2 alpha - 1) e^x (1 + x - e^x) / (e^x - 1)^3`, nonpositive
//!   and increasing for `alpha <= 1`.
//!
//! They drive the reverse hazard of a parallel system, `r(t) = (alpha/t) sum u(lambda_i t)`,
//! and its logarithmic derivative.
//!
//! Everything is written in terms of `e^-x` and `expm1`, so nothing overflows
//! for large `x` and nothing cancels for small `x`.

use crate::error::{domain, Result};
use crate::scalar::Real;

fn check<F: Real>(t: F, alpha: F) -> Result<()> {
    if !(t >= F::zero()) {
        return Err(domain("t", t.as_f64(), "must be >= 0"));
    }
    if !(alpha > F::zero() && alpha.is_finite()) {
        return Err(domain("alpha", alpha.as_f64(), "must be positive and finite"));
    }
    Ok(())
}

/// `e^x - 1 - x`, summed as a Taylor series for `|x| < 1/2`.
pub(crate) fn expm1_minus_x<F: Real>(x: F) -> F {
    if x.abs() >= F::lit(0.5) {
        return x.exp_m1() - x;
    }
    let mut term = x * x / F::lit(2.0);
    let mut sum = term;
    let mut k = F::lit(2.0);
    while term.abs() > F::epsilon() * sum.abs() {
        k = k + F::one();
        term = term * x / k;
        sum = sum + term;
    }
    sum
}

/// `1 - e^-x` for `x >= 0`.
#[inline]
fn one_minus_exp_neg<F: Real>(x: F) -> F {
    -(-x).exp_m1()
}

/// `x / (e^x - 1)`; equals 1 at `x = 0`.
pub fn psi1<F: Real>(x: F) -> F {
    if x == F::zero() {
        return F::one();
    }
    x * (-x).exp() / one_minus_exp_neg(x)
}

/// `x / (1 - e^-x)`; equals 1 at `x = 0`.
pub fn psi2<F: Real>(x: F) -> F {
    if x == F::zero() {
        return F::one();
    }
    x / one_minus_exp_neg(x)
}

/// `1 - x / (1 - e^-x)`, i.e. `(1 - e^-x - x) / (1 - e^-x)`.
fn one_minus_psi2<F: Real>(x: F) -> F {
    if x == F::zero() {
        return F::zero();
    }
    -expm1_minus_x(-x) / one_minus_exp_neg(x)
}

/// `x e^x (1 + x - e^x) / (e^x - 1)^3`, the shape-one case of `w`.
///
/// Tends to `-1/2` at zero and is increasing on `[0, inf)`.
pub fn psi3<F: Real>(x: F) -> F {
    if x == F::zero() {
        return F::lit(-0.5);
    }
    let y = one_minus_exp_neg(x);
    let e = (-x).exp();
    if x <= F::one() {
        // e^-2x (e^x - 1 - x) keeps full relative precision near zero.
        -x * e * e * expm1_minus_x(x) / (y * y * y)
    } else {
        -x * e * (y - x * e) / (y * y * y)
    }
}

/// `u(t) = t^alpha / (e^{t^alpha} - 1)`, with `u(0) = 1`.
pub fn u<F: Real>(t: F, alpha: F) -> Result<F> {
    check(t, alpha)?;
    Ok(psi1(t.powf(alpha)))
}

/// `v(t) = t^alpha / (1 - e^{-t^alpha})`, with `v(0) = 1`.
pub fn v<F: Real>(t: F, alpha: F) -> Result<F> {
    check(t, alpha)?;
    Ok(psi2(t.powf(alpha)))
}

/// `s(t) = 1 - v(t)`; zero at the origin and nonpositive after it.
pub fn s<F: Real>(t: F, alpha: F) -> Result<F> {
    check(t, alpha)?;
    Ok(one_minus_psi2(t.powf(alpha)))
}

/// `w(t) = alpha t^(alpha-1) psi3(t^alpha)`.
///
/// Near the origin `w(t) ~ -(alpha/2) t^(alpha-1)`, so the value at `t = 0`
/// is the one-sided limit: `-inf` for `alpha < 1`, `-1/2` for `alpha = 1`
/// and `0` for `alpha > 1`.
pub fn w<F: Real>(t: F, alpha: F) -> Result<F> {
    check(t, alpha)?;
    if t == F::zero() {
        return Ok(if alpha < F::one() {
            F::neg_infinity()
        } else if alpha == F::one() {
            F::lit(-0.5)
        } else {
            F::zero()
        });
    }
    Ok(alpha * t.powf(alpha - F::one()) * psi3(t.powf(alpha)))
}

/// `u'(t) = (alpha / t) u(t) s(t)` for `t > 0`.
pub fn u_prime<F: Real>(t: F, alpha: F) -> Result<F> {
    check(t, alpha)?;
    if t == F::zero() {
        return Err(domain("t", 0.0, "u' is evaluated for t > 0 only"));
    }
    let x = t.powf(alpha);
    Ok(alpha / t * psi1(x) * one_minus_psi2(x))
}

/// `u` and `u s` at the same point, sharing one power and one exponential.
#[inline]
pub(crate) fn u_and_us<F: Real>(x: F) -> (F, F) {
    if x == F::zero() {
        return (F::one(), F::zero());
    }
    let y = one_minus_exp_neg(x);
    let u = x * (-x).exp() / y;
    let s = -expm1_minus_x(-x) / y;
    (u, u * s)
}
