//! One Weibull component `W(alpha, lambda)` in rate form.
//!
//! Density `alpha lambda (lambda t)^(alpha-1) exp(-(lambda t)^alpha)`. The
//! scale used by most libraries is `1 / lambda`; pass [`Weibull::from_scale`]
//! when starting from that convention.

use rand_core::RngCore;

use crate::error::{domain, Error, Result};
use crate::rng;
use crate::scalar::Real;
use crate::special_fns;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weibull<F> {
    alpha: F,
    lambda: F,
}

impl<F: Real> Weibull<F> {
    pub fn new(alpha: F, lambda: F) -> Result<Self> {
        if !(alpha > F::zero() && alpha.is_finite()) {
            return Err(domain("alpha", alpha.as_f64(), "shape must be positive and finite"));
        }
        if !(lambda > F::zero() && lambda.is_finite()) {
            return Err(domain("lambda", lambda.as_f64(), "rate must be positive and finite"));
        }
        Ok(Self { alpha, lambda })
    }

    /// Builds the component from the conventional scale `1 / lambda`.
    pub fn from_scale(alpha: F, scale: F) -> Result<Self> {
        Self::new(alpha, F::one() / scale)
    }

    pub fn alpha(&self) -> F {
        self.alpha
    }

    pub fn lambda(&self) -> F {
        self.lambda
    }

    /// `(lambda t)^alpha`, the cumulative hazard.
    #[inline]
    pub fn cumulative_hazard(&self, t: F) -> F {
        (self.lambda * t).powf(self.alpha)
    }

    fn check_t(t: F) -> Result<()> {
        if t >= F::zero() && t.is_finite() {
            Ok(())
        } else {
            Err(domain("t", t.as_f64(), "must be finite and >= 0"))
        }
    }

    fn check_positive_t(t: F) -> Result<()> {
        if t > F::zero() && t.is_finite() {
            Ok(())
        } else {
            Err(domain("t", t.as_f64(), "must be finite and > 0"))
        }
    }

    /// Density. At `t = 0` it is `lambda` for `alpha = 1`, zero for
    /// `alpha > 1`, and [`Error::DensityDiverges`] for `alpha < 1`.
    pub fn pdf(&self, t: F) -> Result<F> {
        Self::check_t(t)?;
        if t == F::zero() {
            return if self.alpha < F::one() {
                Err(Error::DensityDiverges {
                    alpha: self.alpha.as_f64(),
                })
            } else if self.alpha == F::one() {
                Ok(self.lambda)
            } else {
                Ok(F::zero())
            };
        }
        let lt = self.lambda * t;
        Ok(self.alpha * self.lambda * lt.powf(self.alpha - F::one()) * (-lt.powf(self.alpha)).exp())
    }

    pub fn cdf(&self, t: F) -> Result<F> {
        Self::check_t(t)?;
        Ok(-(-self.cumulative_hazard(t)).exp_m1())
    }

    pub fn survival(&self, t: F) -> Result<F> {
        Self::check_t(t)?;
        Ok((-self.cumulative_hazard(t)).exp())
    }

    /// `ln F(t)`, accurate in both tails. `-inf` at `t = 0`.
    pub fn ln_cdf(&self, t: F) -> Result<F> {
        Self::check_t(t)?;
        Ok(ln_one_minus_exp_neg(self.cumulative_hazard(t)))
    }

    pub fn hazard(&self, t: F) -> Result<F> {
        Self::check_positive_t(t)?;
        Ok(self.alpha * self.lambda * (self.lambda * t).powf(self.alpha - F::one()))
    }

    /// `f / F = (alpha / t) u(lambda t)`.
    pub fn reverse_hazard(&self, t: F) -> Result<F> {
        Self::check_positive_t(t)?;
        Ok(self.alpha / t * special_fns::psi1(self.cumulative_hazard(t)))
    }

    /// `(-ln(1 - q))^(1/alpha) / lambda`.
    pub fn quantile(&self, q: F) -> Result<F> {
        if !(q > F::zero() && q < F::one()) {
            return Err(domain("q", q.as_f64(), "must lie in (0, 1)"));
        }
        Ok((-(-q).ln_1p()).powf(self.alpha.recip()) / self.lambda)
    }

    /// Lifetime from a uniform on (0, 1), by inverting the survival function.
    #[inline]
    pub(crate) fn draw<R: RngCore>(&self, rng: &mut R) -> F {
        let e = -rng::open01(rng).ln();
        F::lit(e).powf(self.alpha.recip()) / self.lambda
    }

    /// `n` lifetimes from the stream seeded with `seed` (see [`crate::rng`]).
    pub fn sample(&self, n: usize, seed: u64) -> Vec<F> {
        let mut rng = rng::stream(seed);
        (0..n).map(|_| self.draw(&mut rng)).collect()
    }
}

/// `ln(1 - e^-x)` for `x >= 0`.
pub(crate) fn ln_one_minus_exp_neg<F: Real>(x: F) -> F {
    if x > F::LN_2() {
        (-(-x).exp()).ln_1p()
    } else {
        (-(-x).exp_m1()).ln()
    }
}

/// `ln(1 - e^y)` for `y <= 0`.
pub(crate) fn ln_one_minus_exp<F: Real>(y: F) -> F {
    ln_one_minus_exp_neg(-y)
}
