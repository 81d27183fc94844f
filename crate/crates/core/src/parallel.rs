//! Lifetime `X_{n:n} = max_i X_i` of a parallel system of independent
//! Weibull components with a common shape.
//!
//! * `F_{n:n}(t) = prod_i F_i(t)`
//! * `r_{n:n}(t) = sum_i r_i(t) = (alpha/t) sum_i u(lambda_i t)`
//! * `f_{n:n}(t) = F_{n:n}(t) r_{n:n}(t)`

use crate::error::{domain, Error, Result};
use crate::scalar::Real;
use crate::special_fns::u_and_us;
use crate::weibull::{ln_one_minus_exp, ln_one_minus_exp_neg, Weibull};

/// Products longer than this are accumulated in log space.
const LOG_SPACE_LEN: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct ParallelSystem<F> {
    alpha: F,
    lambdas: Vec<F>,
}

impl<F: Real> ParallelSystem<F> {
    pub fn new(alpha: F, lambdas: Vec<F>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::Empty);
        }
        for &l in &lambdas {
            Weibull::new(alpha, l)?;
        }
        Ok(Self { alpha, lambdas })
    }

    /// `p` components with rate `lambda1` followed by `q` with rate `lambda2`.
    pub fn multiple_outlier(alpha: F, lambda1: F, p: usize, lambda2: F, q: usize) -> Result<Self> {
        let mut lambdas = vec![lambda1; p];
        lambdas.extend(std::iter::repeat_n(lambda2, q));
        Self::new(alpha, lambdas)
    }

    pub fn alpha(&self) -> F {
        self.alpha
    }

    pub fn lambdas(&self) -> &[F] {
        &self.lambdas
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = Weibull<F>> + '_ {
        self.lambdas
            .iter()
            .map(move |&l| Weibull::new(self.alpha, l).expect("validated at construction"))
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

    pub fn cdf_nn(&self, t: F) -> Result<F> {
        Self::check_t(t)?;
        let tiny = F::lit(1e-300).max(F::min_positive_value());
        if self.len() <= LOG_SPACE_LEN {
            let mut prod = F::one();
            let mut small = false;
            for c in self.components() {
                let f = c.cdf(t)?;
                small |= f < tiny;
                prod = prod * f;
            }
            if !small {
                return Ok(prod);
            }
        }
        Ok(self.ln_cdf_nn(t)?.exp())
    }

    pub fn ln_cdf_nn(&self, t: F) -> Result<F> {
        Self::check_t(t)?;
        let mut acc = F::zero();
        for c in self.components() {
            acc = acc + c.ln_cdf(t)?;
        }
        Ok(acc)
    }

    /// `ln(1 - F_{n:n}(t))`, accurate when the system cdf is close to one.
    ///
    /// Works from `m = -ln F_{n:n} = sum -ln F_i` kept in log space, so the
    /// result stays exact (about `-min (lambda_i t)^alpha`) after `e^{-x_i}`
    /// has underflowed.
    pub fn ln_survival_nn(&self, t: F) -> Result<F> {
        Self::check_t(t)?;
        let terms: Vec<F> = self
            .lambdas
            .iter()
            .map(|&l| ln_neg_ln_cdf((l * t).powf(self.alpha)))
            .collect();
        let top = terms.iter().fold(F::neg_infinity(), |m, &v| m.max(v));
        if top == F::neg_infinity() {
            // Every component cdf is exactly one.
            return Ok(F::neg_infinity());
        }
        if top == F::infinity() {
            // Some component cdf is zero.
            return Ok(F::zero());
        }
        let ln_m = top + terms.iter().fold(F::zero(), |acc, &v| acc + (v - top).exp()).ln();
        let m = ln_m.exp();
        if m < F::lit(1e-4) {
            // ln(1 - e^{-m}) = ln m - m/2 + m^2/24 + O(m^4)
            Ok(ln_m - m / F::lit(2.0) + m * m / F::lit(24.0))
        } else {
            Ok(ln_one_minus_exp(-m))
        }
    }

    /// `(sum u(lambda_i t), sum u s(lambda_i t))`.
    fn u_sums(&self, t: F) -> (F, F) {
        let mut su = F::zero();
        let mut sus = F::zero();
        for &l in &self.lambdas {
            let (u, us) = u_and_us((l * t).powf(self.alpha));
            su = su + u;
            sus = sus + us;
        }
        (su, sus)
    }

    pub fn rhr_nn(&self, t: F) -> Result<F> {
        Self::check_positive_t(t)?;
        Ok(self.alpha / t * self.u_sums(t).0)
    }

    pub fn pdf_nn(&self, t: F) -> Result<F> {
        Ok(self.cdf_nn(t)? * self.rhr_nn(t)?)
    }

    pub fn ln_pdf_nn(&self, t: F) -> Result<F> {
        Ok(self.ln_cdf_nn(t)? + self.rhr_nn(t)?.ln())
    }

    /// `d/dt ln f_{n:n}(t) = r(t) + r'(t) / r(t)`.
    ///
    /// With `r_i = (alpha/t) u(lambda_i t)` and `u' = (alpha/t) u s` this is
    /// `(alpha/t) sum u + (alpha sum(u s) / sum(u) - 1) / t`.
    pub fn dlog_pdf_nn(&self, t: F) -> Result<F> {
        self.dlog_pdf_nn_scaled(t).map(|(d, _)| d)
    }

    /// The slope together with the size of the terms it was assembled from,
    /// which bounds its rounding error.
    pub(crate) fn dlog_pdf_nn_scaled(&self, t: F) -> Result<(F, F)> {
        Self::check_positive_t(t)?;
        let (su, sus) = self.u_sums(t);
        if su <= F::zero() {
            return Err(Error::TailUnderflow { t: t.as_f64() });
        }
        let r = self.alpha / t * su;
        let ratio = self.alpha * sus / su;
        let value = r + (ratio - F::one()) / t;
        let scale = r + (ratio.abs() + F::one()) / t;
        Ok((value, scale))
    }

    /// Solves `F_{n:n}(t) = q`.
    ///
    /// The root lies between `max_i Q_i(q)` and `max_i Q_i(q^(1/n))`. A few
    /// bisection steps in `ln t` are followed by Illinois-safeguarded secant
    /// steps until the bracket is relatively narrower than `1e-13`.
    pub fn quantile_nn(&self, q: F) -> Result<F> {
        if !(q > F::zero() && q < F::one()) {
            return Err(domain("q", q.as_f64(), "must lie in (0, 1)"));
        }
        if self.len() == 1 {
            return self.components().next().expect("nonempty").quantile(q);
        }
        let n = F::from_usize(self.len()).expect("count fits");
        let ln_q = q.ln();
        let q_root = (ln_q / n).exp();
        let mut lo = F::zero();
        let mut hi = F::zero();
        for c in self.components() {
            lo = lo.max(c.quantile(q)?);
            // q^(1/n) can round to 1 when q is within an ulp of 1.
            let qr = if q_root < F::one() { q_root } else { q };
            hi = hi.max(c.quantile(qr)?);
        }
        if hi <= lo {
            return Ok(lo);
        }
        let g = |s: F| -> Result<F> { Ok(self.ln_cdf_nn(s.exp())? - ln_q) };
        let (mut a, mut b) = (lo.ln(), hi.ln());
        let (mut ga, mut gb) = (g(a)?, g(b)?);
        if ga >= F::zero() {
            return Ok(lo);
        }
        if gb <= F::zero() {
            return Ok(hi);
        }
        let tol = F::lit(1e-13).max(F::epsilon() * F::lit(4.0));
        for _ in 0..8 {
            let m = (a + b) / F::lit(2.0);
            let gm = g(m)?;
            if gm < F::zero() {
                a = m;
                ga = gm;
            } else {
                b = m;
                gb = gm;
            }
        }
        let mut side = 0i8;
        for _ in 0..200 {
            if (b - a).abs() <= tol * (F::one() + a.abs().max(b.abs())) {
                break;
            }
            let m = (a * gb - b * ga) / (gb - ga);
            let m = if m > a && m < b { m } else { (a + b) / F::lit(2.0) };
            let gm = g(m)?;
            if gm == F::zero() {
                return Ok(m.exp());
            }
            if gm < F::zero() {
                a = m;
                ga = gm;
                if side == -1 {
                    gb = gb / F::lit(2.0);
                }
                side = -1;
            } else {
                b = m;
                gb = gm;
                if side == 1 {
                    ga = ga / F::lit(2.0);
                }
                side = 1;
            }
        }
        Ok(((a + b) / F::lit(2.0)).exp())
    }
}

/// `ln(-ln(1 - e^{-x}))`, the log of a component's `-ln F` at scaled time `x`.
fn ln_neg_ln_cdf<F: Real>(x: F) -> F {
    if x > F::lit(40.0) {
        // -ln(1 - p) = p (1 + p/2 + ...), with p = e^{-x} below 1e-17.
        -x + (-x).exp() / F::lit(2.0)
    } else {
        (-ln_one_minus_exp_neg(x)).ln()
    }
}
