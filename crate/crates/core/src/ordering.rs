//! Grid-based checks of `a <= b` in the usual stochastic (st), hazard rate
//! (hr), reverse hazard rate (rh) and likelihood ratio (lr) orders between
//! two parallel systems.
//!
//! Every check evaluates a margin on a geometric grid spanning both systems'
//! quantile ranges, then zooms in around the worst point for a few rounds.
//! A pass ([`Verdict::HoldsOnGrid`]) is evidence at the grid's resolution,
//! not a proof.
//!
//! | order | condition checked |
//! |-------|-------------------|
//! | st    | `F_a(t) >= F_b(t)` pointwise, in log space |
//! | rh    | `r_b(t) >= r_a(t)` pointwise |
//! | lr    | `d/dt ln f_b - d/dt ln f_a >= 0` pointwise |
//! | hr    | `ln S_b - ln S_a` nondecreasing |
//! | rhr ratio | `r_b / r_a` nondecreasing |
//!
//! Margins are normalised by the magnitude of the quantities they are
//! computed from. A point fails only when its normalised margin is below
//! `-mono_tol`; smaller dips count as flat.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parallel::ParallelSystem;

/// Local grid size used by each refinement round.
const REFINE_POINTS: usize = 17;
/// Fewer usable grid points than this makes a check inconclusive.
const MIN_VALID: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub q_lo: f64,
    pub q_hi: f64,
    pub points: usize,
    pub refine_rounds: usize,
    pub mono_tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            q_lo: 1e-6,
            q_hi: 1.0 - 1e-6,
            points: 2048,
            refine_rounds: 4,
            mono_tol: 1e-9,
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.q_lo > 0.0 && self.q_lo < 1.0 && self.q_hi > 0.0 && self.q_hi < 1.0) {
            return Err(Error::InvalidGrid("quantile anchors must lie in (0, 1)"));
        }
        if self.q_lo >= self.q_hi {
            return Err(Error::InvalidGrid("q_lo must be below q_hi"));
        }
        if self.points < 16 {
            return Err(Error::InvalidGrid("at least 16 points are required"));
        }
        if !(self.mono_tol >= 0.0 && self.mono_tol.is_finite()) {
            return Err(Error::InvalidGrid("tolerance must be finite and >= 0"));
        }
        Ok(())
    }

    pub fn with_points(self, points: usize) -> Self {
        Self { points, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    St,
    Hr,
    Rh,
    Lr,
    /// Monotonicity of `r_b / r_a`.
    RhrRatio,
}

impl Order {
    pub fn as_str(&self) -> &'static str {
        match self {
            Order::St => "st",
            Order::Hr => "hr",
            Order::Rh => "rh",
            Order::Lr => "lr",
            Order::RhrRatio => "rhr_ratio",
        }
    }
}

impl std::fmt::Display for Order {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Order {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "st" => Ok(Order::St),
            "hr" => Ok(Order::Hr),
            "rh" => Ok(Order::Rh),
            "lr" => Ok(Order::Lr),
            "rhr_ratio" | "rhr-ratio" => Ok(Order::RhrRatio),
            other => Err(format!("unknown order `{other}` (expected st, hr, rh, lr or rhr-ratio)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    HoldsOnGrid,
    Violated,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::HoldsOnGrid => "holds_on_grid",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// Where a check failed. Pointwise orders report a single `t`; monotonicity
/// orders report the pair `t < t_end` across which the function dropped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub t: f64,
    pub t_end: Option<f64>,
    /// Normalised size of the failure; always above `mono_tol`.
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemEcho {
    pub alpha: f64,
    pub lambdas: Vec<f64>,
}

impl From<&ParallelSystem<f64>> for SystemEcho {
    fn from(s: &ParallelSystem<f64>) -> Self {
        Self {
            alpha: s.alpha(),
            lambdas: s.lambdas().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingVerdict {
    pub order: Order,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    /// Smallest normalised margin seen; negative values are dips.
    pub margin: f64,
    /// Location of `margin`.
    pub margin_t: f64,
    pub grid: GridSpec,
    pub t_lo: f64,
    pub t_hi: f64,
    /// Grid points (including refinement) where the margin was finite.
    pub evaluated: usize,
    /// The system claimed to be smaller.
    pub lower: SystemEcho,
    pub upper: SystemEcho,
}

impl OrderingVerdict {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::HoldsOnGrid
    }

    pub fn violated(&self) -> bool {
        self.verdict == Verdict::Violated
    }
}

/// `n` points spaced evenly in `ln t` from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (n - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|k| (a + step * k as f64).exp()).collect();
    out[0] = lo;
    out[n - 1] = hi;
    out
}

/// `[min_i Q_i(q_lo), max_i Q_i(q_hi)]` over both systems.
pub fn evaluation_range(a: &ParallelSystem<f64>, b: &ParallelSystem<f64>, g: &GridSpec) -> Result<(f64, f64)> {
    g.validate()?;
    let lo = a.quantile_nn(g.q_lo)?.min(b.quantile_nn(g.q_lo)?);
    let hi = a.quantile_nn(g.q_hi)?.max(b.quantile_nn(g.q_hi)?);
    Ok((lo, hi))
}

pub fn evaluation_grid(a: &ParallelSystem<f64>, b: &ParallelSystem<f64>, g: &GridSpec) -> Result<Vec<f64>> {
    let (lo, hi) = evaluation_range(a, b, g)?;
    Ok(geometric_grid(lo, hi, g.points))
}

struct Scan {
    verdict: Verdict,
    witness: Option<Witness>,
    margin: f64,
    margin_t: f64,
    evaluated: usize,
}

fn first_argmin(vals: impl Iterator<Item = f64>) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in vals.enumerate() {
        if best.is_none_or(|(_, b)| v < b) {
            best = Some((i, v));
        }
    }
    best
}

/// Pointwise scan: every point must have `margin(t) >= -tol`.
fn scan_pointwise<M>(grid: &[f64], g: &GridSpec, margin: M) -> Scan
where
    M: Fn(f64) -> Option<f64>,
{
    let pts: Vec<(f64, f64)> = grid
        .iter()
        .filter_map(|&t| margin(t).filter(|m| m.is_finite()).map(|m| (t, m)))
        .collect();
    let mut evaluated = pts.len();
    if pts.len() < MIN_VALID {
        return inconclusive(evaluated);
    }
    let (k, mut best) = first_argmin(pts.iter().map(|p| p.1)).expect("nonempty");
    let mut best_t = pts[k].0;
    let mut lo = pts[k.saturating_sub(1)].0;
    let mut hi = pts[(k + 1).min(pts.len() - 1)].0;
    for _ in 0..g.refine_rounds {
        if !(hi > lo) {
            break;
        }
        let local: Vec<(f64, f64)> = geometric_grid(lo, hi, REFINE_POINTS)
            .into_iter()
            .filter_map(|t| margin(t).filter(|m| m.is_finite()).map(|m| (t, m)))
            .collect();
        evaluated += local.len();
        let Some((j, m)) = first_argmin(local.iter().map(|p| p.1)) else {
            break;
        };
        if m < best {
            best = m;
            best_t = local[j].0;
        }
        lo = local[j.saturating_sub(1)].0;
        hi = local[(j + 1).min(local.len() - 1)].0;
    }
    let violated = best < -g.mono_tol;
    Scan {
        verdict: if violated { Verdict::Violated } else { Verdict::HoldsOnGrid },
        witness: violated.then_some(Witness {
            t: best_t,
            t_end: None,
            magnitude: -best,
        }),
        margin: best,
        margin_t: best_t,
        evaluated,
    }
}

fn inconclusive(evaluated: usize) -> Scan {
    Scan {
        verdict: Verdict::Inconclusive,
        witness: None,
        margin: f64::NAN,
        margin_t: f64::NAN,
        evaluated,
    }
}

/// Sample of a function whose monotonicity is checked: value and the
/// magnitude its rounding error scales with.
#[derive(Clone, Copy)]
struct Sample {
    t: f64,
    v: f64,
    noise: f64,
}

struct DropSummary {
    /// Largest normalised fall `(v_i - v_j) / noise` over `i < j`, and where.
    drop: f64,
    drop_at: (f64, f64),
    /// Smallest normalised step between neighbours, and its left index.
    step: f64,
    step_at: usize,
    /// Right index of the largest fall.
    drop_end: usize,
}

fn summarize(s: &[Sample]) -> DropSummary {
    let mut peak = s[0];
    let mut out = DropSummary {
        drop: 0.0,
        drop_at: (s[0].t, s[0].t),
        step: f64::INFINITY,
        step_at: 0,
        drop_end: 0,
    };
    for j in 1..s.len() {
        let cur = s[j];
        let step = (cur.v - s[j - 1].v) / cur.noise.max(s[j - 1].noise).max(f64::MIN_POSITIVE);
        if step < out.step {
            out.step = step;
            out.step_at = j - 1;
        }
        let drop = (peak.v - cur.v) / peak.noise.max(cur.noise).max(f64::MIN_POSITIVE);
        if drop > out.drop {
            out.drop = drop;
            out.drop_at = (peak.t, cur.t);
            out.drop_end = j;
        }
        if cur.v > peak.v {
            peak = cur;
        }
    }
    out
}

/// Monotonicity scan: the function must not fall by more than `tol`
/// (normalised) between any two points.
fn scan_increasing<M>(grid: &[f64], g: &GridSpec, f: M) -> Scan
where
    M: Fn(f64) -> Option<(f64, f64)>,
{
    let sample = |t: f64| {
        f(t).filter(|(v, n)| v.is_finite() && n.is_finite())
            .map(|(v, noise)| Sample { t, v, noise: noise.abs() })
    };
    let pts: Vec<Sample> = grid.iter().filter_map(|&t| sample(t)).collect();
    let mut evaluated = pts.len();
    if pts.len() < MIN_VALID {
        return inconclusive(evaluated);
    }
    let coarse = summarize(&pts);
    let mut drop = coarse.drop;
    let mut drop_at = coarse.drop_at;
    let mut step = coarse.step;
    let mut step_t = pts[coarse.step_at].t;
    let centre = if coarse.drop > 0.0 {
        coarse.drop_end
    } else {
        coarse.step_at
    };
    let mut lo = pts[centre.saturating_sub(1)].t;
    let mut hi = pts[(centre + 2).min(pts.len() - 1)].t;
    for _ in 0..g.refine_rounds {
        if !(hi > lo) {
            break;
        }
        let local: Vec<Sample> = geometric_grid(lo, hi, REFINE_POINTS)
            .into_iter()
            .filter_map(&sample)
            .collect();
        evaluated += local.len();
        if local.len() < 3 {
            break;
        }
        let s = summarize(&local);
        if s.drop > drop {
            drop = s.drop;
            drop_at = s.drop_at;
        }
        if s.step < step {
            step = s.step;
            step_t = local[s.step_at].t;
        }
        let c = if s.drop > 0.0 { s.drop_end } else { s.step_at };
        lo = local[c.saturating_sub(1)].t;
        hi = local[(c + 2).min(local.len() - 1)].t;
    }
    let violated = drop > g.mono_tol;
    let (margin, margin_t) = if -drop < step { (-drop, drop_at.1) } else { (step, step_t) };
    Scan {
        verdict: if violated { Verdict::Violated } else { Verdict::HoldsOnGrid },
        witness: violated.then_some(Witness {
            t: drop_at.0,
            t_end: Some(drop_at.1),
            magnitude: drop,
        }),
        margin,
        margin_t,
        evaluated,
    }
}

fn finish(order: Order, a: &ParallelSystem<f64>, b: &ParallelSystem<f64>, g: &GridSpec, range: (f64, f64), s: Scan) -> OrderingVerdict {
    OrderingVerdict {
        order,
        verdict: s.verdict,
        witness: s.witness,
        margin: s.margin,
        margin_t: s.margin_t,
        grid: *g,
        t_lo: range.0,
        t_hi: range.1,
        evaluated: s.evaluated,
        lower: a.into(),
        upper: b.into(),
    }
}

/// `a <= b` in the usual stochastic order: `S_a(t) <= S_b(t)` for all `t`.
///
/// The comparison uses `ln F` while both cdfs are below one half and
/// `ln S` after that, so neither tail loses precision.
pub fn check_st(a: &ParallelSystem<f64>, b: &ParallelSystem<f64>, g: &GridSpec) -> Result<OrderingVerdict> {
    let range = evaluation_range(a, b, g)?;
    let grid = geometric_grid(range.0, range.1, g.points);
    let margin = |t: f64| -> Option<f64> {
        let (la, lb) = (a.ln_cdf_nn(t).ok()?, b.ln_cdf_nn(t).ok()?);
        let half = -std::f64::consts::LN_2;
        let (diff, scale) = if la < half && lb < half {
            (la - lb, la.abs().max(lb.abs()))
        } else {
            let (sa, sb) = (a.ln_survival_nn(t).ok()?, b.ln_survival_nn(t).ok()?);
            (sb - sa, sa.abs().max(sb.abs()))
        };
        if diff == 0.0 {
            Some(0.0)
        } else {
            Some(diff / scale)
        }
    };
    Ok(finish(Order::St, a, b, g, range, scan_pointwise(&grid, g, margin)))
}

/// `a <= b` in the reverse hazard rate order, checked as `r_b(t) >= r_a(t)`.
pub fn check_rh(a: &ParallelSystem<f64>, b: &ParallelSystem<f64>, g: &GridSpec) -> Result<OrderingVerdict> {
    let range = evaluation_range(a, b, g)?;
    let grid = geometric_grid(range.0, range.1, g.points);
    let margin = |t: f64| -> Option<f64> {
        let (ra, rb) = (a.rhr_nn(t).ok()?, b.rhr_nn(t).ok()?);
        let scale = ra.max(rb);
        (scale > 0.0).then(|| (rb - ra) / scale)
    };
    Ok(finish(Order::Rh, a, b, g, range, scan_pointwise(&grid, g, margin)))
}

/// `a <= b` in the hazard rate order: `S_b / S_a` nondecreasing, checked on
/// `ln S_b - ln S_a`.
pub fn check_hr(a: &ParallelSystem<f64>, b: &ParallelSystem<f64>, g: &GridSpec) -> Result<OrderingVerdict> {
    let range = evaluation_range(a, b, g)?;
    let grid = geometric_grid(range.0, range.1, g.points);
    let f = |t: f64| -> Option<(f64, f64)> {
        let (sa, sb) = (a.ln_survival_nn(t).ok()?, b.ln_survival_nn(t).ok()?);
        Some((sb - sa, sa.abs() + sb.abs()))
    };
    Ok(finish(Order::Hr, a, b, g, range, scan_increasing(&grid, g, f)))
}

/// `a <= b` in the likelihood ratio order: `f_b / f_a` nondecreasing,
/// checked through the sign of `d/dt ln f_b - d/dt ln f_a`.
pub fn check_lr(a: &ParallelSystem<f64>, b: &ParallelSystem<f64>, g: &GridSpec) -> Result<OrderingVerdict> {
    let range = evaluation_range(a, b, g)?;
    let grid = geometric_grid(range.0, range.1, g.points);
    let margin = |t: f64| -> Option<f64> {
        let (da, sa) = a.dlog_pdf_nn_scaled(t).ok()?;
        let (db, sb) = b.dlog_pdf_nn_scaled(t).ok()?;
        Some((db - da) / (sa + sb))
    };
    Ok(finish(Order::Lr, a, b, g, range, scan_pointwise(&grid, g, margin)))
}

/// `r_b / r_a` nondecreasing.
pub fn check_rhr_ratio_increasing(a: &ParallelSystem<f64>, b: &ParallelSystem<f64>, g: &GridSpec) -> Result<OrderingVerdict> {
    let range = evaluation_range(a, b, g)?;
    let grid = geometric_grid(range.0, range.1, g.points);
    let f = |t: f64| -> Option<(f64, f64)> {
        let (ra, rb) = (a.rhr_nn(t).ok()?, b.rhr_nn(t).ok()?);
        (ra > 0.0).then(|| {
            let phi = rb / ra;
            (phi, phi)
        })
    };
    Ok(finish(Order::RhrRatio, a, b, g, range, scan_increasing(&grid, g, f)))
}

pub fn check(order: Order, a: &ParallelSystem<f64>, b: &ParallelSystem<f64>, g: &GridSpec) -> Result<OrderingVerdict> {
    match order {
        Order::St => check_st(a, b, g),
        Order::Hr => check_hr(a, b, g),
        Order::Rh => check_rh(a, b, g),
        Order::Lr => check_lr(a, b, g),
        Order::RhrRatio => check_rhr_ratio_increasing(a, b, g),
    }
}

/// Likelihood ratio order from reverse hazard order plus an increasing
/// reverse hazard ratio.
///
/// Both inputs holding gives `holds_on_grid`. Anything else is
/// `inconclusive`: the rule is only sufficient, so it never proves a violation.
pub fn compose_1c4(rh: &OrderingVerdict, ratio: &OrderingVerdict) -> Result<OrderingVerdict> {
    if rh.order != Order::Rh {
        return Err(Error::WrongOrder {
            expected: "rh",
            found: rh.order.as_str(),
        });
    }
    if ratio.order != Order::RhrRatio {
        return Err(Error::WrongOrder {
            expected: "rhr_ratio",
            found: ratio.order.as_str(),
        });
    }
    if rh.lower != ratio.lower || rh.upper != ratio.upper || rh.grid != ratio.grid {
        return Err(Error::MismatchedPair);
    }
    let verdict = if rh.holds() && ratio.holds() {
        Verdict::HoldsOnGrid
    } else {
        Verdict::Inconclusive
    };
    let (margin, margin_t) = if rh.margin <= ratio.margin || ratio.margin.is_nan() {
        (rh.margin, rh.margin_t)
    } else {
        (ratio.margin, ratio.margin_t)
    };
    Ok(OrderingVerdict {
        order: Order::Lr,
        verdict,
        witness: None,
        margin,
        margin_t,
        grid: rh.grid,
        t_lo: rh.t_lo,
        t_hi: rh.t_hi,
        evaluated: rh.evaluated + ratio.evaluated,
        lower: rh.lower.clone(),
        upper: rh.upper.clone(),
    })
}
