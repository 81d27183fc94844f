//! Monte Carlo cross-checks of the analytic parallel-system distribution.
//!
//! Lifetimes are simulated as the maximum of one inversion draw per
//! component, using the streams described in [`crate::rng`]. Draw `k` takes
//! uniforms `k*n .. k*n + n` from the stream, in component order.

use serde::Serialize;

use crate::error::{domain, Result};
use crate::ordering::{self, GridSpec, Verdict};
use crate::parallel::ParallelSystem;
use crate::rng;

/// Sorted sample with its step-function cdf.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(crate::Error::Empty);
        }
        if let Some(&bad) = samples.iter().find(|x| !x.is_finite()) {
            return Err(domain("sample", bad, "must be finite"));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { sorted: samples })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    /// Fraction of the sample `<= t`.
    pub fn eval(&self, t: f64) -> f64 {
        self.sorted.partition_point(|&x| x <= t) as f64 / self.sorted.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.sorted.iter().sum::<f64>() / self.sorted.len() as f64
    }
}

/// `n` simulated lifetimes of `sys` from the stream seeded with `seed`.
pub fn sample_parallel(sys: &ParallelSystem<f64>, n: usize, seed: u64) -> Result<EmpiricalCdf> {
    if n == 0 {
        return Err(domain("n", 0.0, "need at least one draw"));
    }
    let mut rng = rng::stream(seed);
    let comps: Vec<_> = sys.components().collect();
    let draws = (0..n)
        .map(|_| comps.iter().map(|c| c.draw(&mut rng)).fold(0.0, f64::max))
        .collect();
    EmpiricalCdf::new(draws)
}

/// Half-width of the two-sided DKW band: `sqrt(ln(2 / (1 - c)) / (2 n))`.
pub fn dkw_bound(n: usize, confidence: f64) -> f64 {
    ((2.0 / (1.0 - confidence)).ln() / (2.0 * n as f64)).sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct DkwReport {
    pub n: usize,
    pub confidence: f64,
    /// `sup_t |F_hat(t) - F(t)|`, the Kolmogorov-Smirnov statistic.
    pub sup_distance: f64,
    pub bound: f64,
    pub pass: bool,
}

pub fn dkw_compare(emp: &EmpiricalCdf, sys: &ParallelSystem<f64>, confidence: f64) -> Result<DkwReport> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(domain("confidence", confidence, "must lie in (0, 1)"));
    }
    let n = emp.len();
    let nf = n as f64;
    let mut sup: f64 = 0.0;
    for (i, &x) in emp.samples().iter().enumerate() {
        let f = sys.cdf_nn(x)?;
        sup = sup.max(((i + 1) as f64 / nf - f).abs()).max((f - i as f64 / nf).abs());
    }
    let bound = dkw_bound(n, confidence);
    Ok(DkwReport {
        n,
        confidence,
        sup_distance: sup,
        bound,
        pass: sup <= bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EmpiricalSt {
    /// No point where `F_hat_b` exceeds `F_hat_a` by more than the band.
    ConsistentWithHolds,
    /// The empirical cdfs cross beyond the band.
    Violated,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalStReport {
    pub n: usize,
    pub seed: u64,
    pub confidence: f64,
    /// Sum of the two one-sample DKW half-widths.
    pub band: f64,
    /// `max_t (F_hat_b(t) - F_hat_a(t))`; positive values argue against `a <= b`.
    pub max_excess: f64,
    pub excess_t: f64,
    pub empirical: EmpiricalSt,
    pub analytic: Verdict,
    pub agrees: bool,
}

/// Compares simulated lifetimes of `a` (stream `substream(seed, 0)`) and
/// `b` (stream `substream(seed, 1)`) against the analytic st verdict.
pub fn empirical_st_check(
    a: &ParallelSystem<f64>,
    b: &ParallelSystem<f64>,
    n: usize,
    seed: u64,
    confidence: f64,
    g: &GridSpec,
) -> Result<EmpiricalStReport> {
    if n < 1000 {
        return Err(domain("n", n as f64, "need at least 1000 draws"));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(domain("confidence", confidence, "must lie in (0, 1)"));
    }
    let ea = sample_parallel(a, n, rng::substream_seed(seed, 0))?;
    let eb = sample_parallel(b, n, rng::substream_seed(seed, 1))?;
    let band = 2.0 * dkw_bound(n, confidence);

    // Merge both sorted samples; both step functions only change there.
    let (xa, xb) = (ea.samples(), eb.samples());
    let (mut i, mut j) = (0usize, 0usize);
    let nf = n as f64;
    let mut max_excess = f64::NEG_INFINITY;
    let mut excess_t = f64::NAN;
    while i < n || j < n {
        let t = match (xa.get(i), xb.get(j)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => unreachable!(),
        };
        while i < n && xa[i] <= t {
            i += 1;
        }
        while j < n && xb[j] <= t {
            j += 1;
        }
        let excess = (j as f64 - i as f64) / nf;
        if excess > max_excess {
            max_excess = excess;
            excess_t = t;
        }
    }
    let empirical = if max_excess > band {
        EmpiricalSt::Violated
    } else {
        EmpiricalSt::ConsistentWithHolds
    };
    let analytic = ordering::check_st(a, b, g)?.verdict;
    let agrees = matches!(
        (analytic, empirical),
        (Verdict::HoldsOnGrid, EmpiricalSt::ConsistentWithHolds) | (Verdict::Violated, EmpiricalSt::Violated)
    );
    Ok(EmpiricalStReport {
        n,
        seed,
        confidence,
        band,
        max_excess,
        excess_t,
        empirical,
        analytic,
        agrees,
    })
}
