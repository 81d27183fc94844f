//! Majorization and weak majorization of positive parameter vectors, and a
//! falsification probe for Schur-convexity.
//!
//! `x` is majorized by `y` when, after sorting both ascending, every partial
//! sum of the `j` smallest entries of `x` is at least the matching partial sum
//! of `y` and the totals agree. Weak majorization drops the equal-total
//! requirement and checks `j = 1..=n`.

use rand_core::RngCore;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::rng;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector<F>(Vec<F>);

impl<F: Real> ParamVector<F> {
    pub fn new(values: Vec<F>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(&bad) = values.iter().find(|v| !(**v > F::zero() && v.is_finite())) {
            return Err(domain("entry", bad.as_f64(), "parameters must be positive and finite"));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[F] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Increasing arrangement.
    pub fn sorted(&self) -> Vec<F> {
        let mut v = self.0.clone();
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite entries"));
        v
    }
}

impl<F: Real> TryFrom<Vec<F>> for ParamVector<F> {
    type Error = Error;

    fn try_from(v: Vec<F>) -> Result<Self> {
        Self::new(v)
    }
}

/// Slack for comparing sums: `1e-12 * n * max |entry|`.
fn sum_tolerance<F: Real>(x: &[F], y: &[F]) -> F {
    let max = x.iter().chain(y).fold(F::zero(), |m, v| m.max(v.abs()));
    F::lit(1e-12) * F::from_usize(x.len()).expect("length fits") * max
}

fn partial_sums_dominate<F: Real>(x: &ParamVector<F>, y: &ParamVector<F>, upto: usize) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let (xs, ys) = (x.sorted(), y.sorted());
    let tol = sum_tolerance(&xs, &ys);
    let (mut sx, mut sy) = (F::zero(), F::zero());
    for j in 0..upto {
        sx = sx + xs[j];
        sy = sy + ys[j];
        if sx < sy - tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `x` is majorized by `y`.
pub fn is_majorized<F: Real>(x: &ParamVector<F>, y: &ParamVector<F>) -> Result<bool> {
    let n = x.len();
    if !partial_sums_dominate(x, y, n.min(y.len()).saturating_sub(1))? {
        return Ok(false);
    }
    let sx = x.values().iter().fold(F::zero(), |a, &b| a + b);
    let sy = y.values().iter().fold(F::zero(), |a, &b| a + b);
    Ok((sx - sy).abs() <= sum_tolerance(x.values(), y.values()))
}

/// `x` is weakly majorized by `y`.
pub fn is_weakly_majorized<F: Real>(x: &ParamVector<F>, y: &ParamVector<F>) -> Result<bool> {
    partial_sums_dominate(x, y, x.len().min(y.len()))
}

/// Replaces entries `i` and `j` by `w y_i + (1-w) y_j` and `w y_j + (1-w) y_i`.
pub fn t_transform<F: Real>(y: &mut [F], i: usize, j: usize, w: F) {
    let (a, b) = (y[i], y[j]);
    y[i] = w * a + (F::one() - w) * b;
    y[j] = (a + b) - y[i];
}

/// Applies one to five random T-transforms to `y`, giving a vector majorized by `y`.
pub fn majorized_below<R: RngCore>(y: &[f64], rng: &mut R) -> Vec<f64> {
    let mut x = y.to_vec();
    let n = x.len();
    if n < 2 {
        return x;
    }
    for _ in 0..rng::int_in(rng, 1, 5) {
        let i = rng::int_in(rng, 0, n - 1);
        let mut j = rng::int_in(rng, 0, n - 2);
        if j >= i {
            j += 1;
        }
        let w = rng::open01(rng);
        t_transform(&mut x, i, j, w);
    }
    x
}

/// Random pair `(x, y)` with `x` majorized by `y`; entries of `y` are
/// log-uniform on `[lo, hi]`.
pub fn sample_majorized_pair<R: RngCore>(n: usize, lo: f64, hi: f64, rng: &mut R) -> (Vec<f64>, Vec<f64>) {
    let y: Vec<f64> = (0..n).map(|_| rng::log_uniform(rng, lo, hi)).collect();
    (majorized_below(&y, rng), y)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeViolation {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub fx: f64,
    pub fy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub violations: Vec<ProbeViolation>,
}

impl ProbeReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Looks for majorized pairs `x <= y` with `f(x) > f(y)`.
///
/// Each trial draws `y` with entries log-uniform on `[0.1, 10]` and derives
/// `x` by random T-transforms. A violation must exceed `1e-12` relative to
/// `max(|f(x)|, |f(y)|)`. Passing is evidence, not proof.
pub fn schur_convexity_probe<G>(f: G, n: usize, trials: usize, seed: u64) -> ProbeReport
where
    G: Fn(&[f64]) -> f64,
{
    let mut rng = rng::stream(seed);
    let mut violations = Vec::new();
    for _ in 0..trials {
        let (x, y) = sample_majorized_pair(n, 0.1, 10.0, &mut rng);
        let (fx, fy) = (f(&x), f(&y));
        if fx > fy + 1e-12 * fx.abs().max(fy.abs()) {
            violations.push(ProbeViolation { x, y, fx, fy });
        }
    }
    ProbeReport {
        n,
        trials,
        seed,
        violations,
    }
}
