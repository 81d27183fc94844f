//! Theorem registry: each result is a hypothesis sampler plus the order
//! checks its conclusion calls for. Also reproduces the published
//! counterexamples and scans random pairs for likelihood ratio failures.
//!
//! Naming used throughout: `lambda` is the scale vector of the system
//! claimed to be smaller, `theta` that of the larger one.
//!
//! | id    | shape     | hypothesis | conclusion |
//! |-------|-----------|------------|------------|
//! | th07  | (0, 1]    | lambda weakly majorized by theta | rh |
//! | cor1  | (0, 1]    | lambda majorized by theta | rh |
//! | th08  | (0, 1]    | n = 2, majorized | r_theta / r_lambda increasing |
//! | th09  | (0, 1]    | n = 2, majorized | lr |
//! | th15  | (0, 1]    | two-valued (p, q) patterns, majorized | ratio increasing |
//! | th16  | (0, 1]    | two-valued (p, q) patterns, majorized | lr |
//! | th10  | any       | n = 2, (l1, l) vs (l1*, l), l1* = min | ratio increasing |
//! | th01  | any       | as th10 | lr |
//! | th11  | (0, 1]    | n = 2, theta1 <= l1 <= l2 <= theta2, weakly majorized | lr |
//! | th17  | any       | as th10 with p copies of l1 and q of l | ratio increasing |
//! | th14  | any       | as th17 | lr |
//!
//! "Any" shape is sampled from `(0, 4]`; every shape range is floored at
//! [`ALPHA_FLOOR`], below which the quantile anchors leave `f64` range.

use std::fmt;
use std::str::FromStr;

use rand_core::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::majorization::{is_majorized, is_weakly_majorized, majorized_below, ParamVector};
use crate::ordering::{self, GridSpec, Order, OrderingVerdict, Witness};
use crate::parallel::ParallelSystem;
use crate::rng;

pub const ALPHA_FLOOR: f64 = 0.05;
const ALPHA_CAP_ANY: f64 = 4.0;
const RATE_LO: f64 = 0.1;
const RATE_HI: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremId {
    Th07,
    Cor1,
    Th08,
    Th09,
    Th15,
    Th16,
    Th10,
    Th01,
    Th11,
    Th17,
    Th14,
}

impl TheoremId {
    pub const ALL: [TheoremId; 11] = [
        TheoremId::Th07,
        TheoremId::Cor1,
        TheoremId::Th08,
        TheoremId::Th09,
        TheoremId::Th15,
        TheoremId::Th16,
        TheoremId::Th10,
        TheoremId::Th01,
        TheoremId::Th11,
        TheoremId::Th17,
        TheoremId::Th14,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremId::Th07 => "th07",
            TheoremId::Cor1 => "cor1",
            TheoremId::Th08 => "th08",
            TheoremId::Th09 => "th09",
            TheoremId::Th15 => "th15",
            TheoremId::Th16 => "th16",
            TheoremId::Th10 => "th10",
            TheoremId::Th01 => "th01",
            TheoremId::Th11 => "th11",
            TheoremId::Th17 => "th17",
            TheoremId::Th14 => "th14",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::UnknownTheorem(s.to_string()))
    }
}

/// How the two scale vectors are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Layout {
    General,
    Pair,
    /// `p` copies of the first value then `n - p` of the second.
    Outlier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum Hypothesis {
    Majorized,
    WeaklyMajorized,
    /// `lambda = (l1, l)`, `theta = (l1*, l)` with `l1* = min(l, l1, l1*)`.
    MinReplaced,
    /// `theta1 <= lambda1 <= lambda2 <= theta2`, weakly majorized.
    Nested,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremSpec {
    pub id: TheoremId,
    pub alpha_range: (f64, f64),
    pub n_range: (usize, usize),
    pub conclusion: Vec<Order>,
    /// Also require the lr verdict obtained by composing rh with the
    /// reverse hazard ratio.
    pub composed_lr: bool,
    #[serde(skip)]
    layout: Layout,
    #[serde(skip)]
    hypothesis: Hypothesis,
}

pub fn theorem_spec(id: TheoremId) -> TheoremSpec {
    use Hypothesis::*;
    use Layout::*;
    use TheoremId::*;
    let unit = (ALPHA_FLOOR, 1.0);
    let any = (ALPHA_FLOOR, ALPHA_CAP_ANY);
    let (alpha_range, n_range, layout, hypothesis, conclusion, composed_lr) = match id {
        Th07 => (unit, (2, 6), General, WeaklyMajorized, vec![Order::Rh], false),
        Cor1 => (unit, (2, 6), General, Majorized, vec![Order::Rh], false),
        Th08 => (unit, (2, 2), Pair, Majorized, vec![Order::RhrRatio], false),
        Th09 => (unit, (2, 2), Pair, Majorized, vec![Order::Rh, Order::RhrRatio, Order::Lr], true),
        Th15 => (unit, (3, 6), Outlier, Majorized, vec![Order::RhrRatio], false),
        Th16 => (unit, (3, 6), Outlier, Majorized, vec![Order::Rh, Order::RhrRatio, Order::Lr], true),
        Th10 => (any, (2, 2), Pair, MinReplaced, vec![Order::RhrRatio], false),
        Th01 => (any, (2, 2), Pair, MinReplaced, vec![Order::Rh, Order::RhrRatio, Order::Lr], true),
        Th11 => (unit, (2, 2), Pair, Nested, vec![Order::Lr], false),
        Th17 => (any, (3, 6), Outlier, MinReplaced, vec![Order::RhrRatio], false),
        Th14 => (any, (3, 6), Outlier, MinReplaced, vec![Order::Rh, Order::RhrRatio, Order::Lr], true),
    };
    TheoremSpec {
        id,
        alpha_range,
        n_range,
        conclusion,
        composed_lr,
        layout,
        hypothesis,
    }
}

/// One parameter set: `X_{n:n}` with rates `lambda` against `Y_{n:n}` with
/// rates `theta`, common shape `alpha`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Instance {
    pub alpha: f64,
    pub lambda: Vec<f64>,
    pub theta: Vec<f64>,
    /// Number of leading components of the first kind in outlier layouts.
    pub p: Option<usize>,
}

impl Instance {
    pub fn systems(&self) -> Result<(ParallelSystem<f64>, ParallelSystem<f64>)> {
        Ok((
            ParallelSystem::new(self.alpha, self.lambda.clone())?,
            ParallelSystem::new(self.alpha, self.theta.clone())?,
        ))
    }
}

fn rate<R: RngCore>(rng: &mut R) -> f64 {
    rng::log_uniform(rng, RATE_LO, RATE_HI)
}

fn outlier(a: f64, p: usize, b: f64, n: usize) -> Vec<f64> {
    let mut v = vec![a; p];
    v.resize(n, b);
    v
}

/// Multiplies a random subset of entries by factors in `(1, 2)`.
fn inflate<R: RngCore>(x: &mut [f64], rng: &mut R) {
    for v in x.iter_mut() {
        if rng.next_u64() & 1 == 1 {
            *v *= 1.0 + rng::open01(rng);
        }
    }
}

pub fn sample_instance<R: RngCore>(spec: &TheoremSpec, rng: &mut R) -> Instance {
    let alpha = rng::uniform(rng, spec.alpha_range.0, spec.alpha_range.1);
    let n = rng::int_in(rng, spec.n_range.0, spec.n_range.1);
    match (spec.layout, spec.hypothesis) {
        (Layout::General | Layout::Pair, Hypothesis::Majorized | Hypothesis::WeaklyMajorized) => {
            let theta: Vec<f64> = (0..n).map(|_| rate(rng)).collect();
            let mut lambda = majorized_below(&theta, rng);
            if spec.hypothesis == Hypothesis::WeaklyMajorized {
                inflate(&mut lambda, rng);
            }
            Instance { alpha, lambda, theta, p: None }
        }
        (Layout::Outlier, Hypothesis::Majorized) => {
            let p = rng::int_in(rng, 1, n - 1);
            let (t1, t2) = (rate(rng), rate(rng));
            let mean = (p as f64 * t1 + (n - p) as f64 * t2) / n as f64;
            let c = rng::open01(rng);
            let (l1, l2) = (c * t1 + (1.0 - c) * mean, c * t2 + (1.0 - c) * mean);
            Instance {
                alpha,
                lambda: outlier(l1, p, l2, n),
                theta: outlier(t1, p, t2, n),
                p: Some(p),
            }
        }
        (layout, Hypothesis::MinReplaced) => {
            let p = if layout == Layout::Outlier { rng::int_in(rng, 1, n - 1) } else { 1 };
            let (l1, l) = (rate(rng), rate(rng));
            let l1_star = l1.min(l) * rng::open01(rng);
            Instance {
                alpha,
                lambda: outlier(l1, p, l, n),
                theta: outlier(l1_star, p, l, n),
                p: (layout == Layout::Outlier).then_some(p),
            }
        }
        (_, Hypothesis::Nested) => {
            let t1 = rate(rng);
            let l1 = t1 * (1.0 + 2.0 * rng::open01(rng));
            let l2 = l1 * (1.0 + 2.0 * rng::open01(rng));
            let t2 = rng::uniform(rng, l2, l1 + l2 - t1);
            Instance {
                alpha,
                lambda: vec![l1, l2],
                theta: vec![t1, t2],
                p: None,
            }
        }
        (Layout::Outlier, Hypothesis::WeaklyMajorized) => unreachable!("no theorem uses this layout"),
    }
}

fn is_two_valued(v: &[f64], p: usize) -> bool {
    p >= 1 && p < v.len() && v[..p].iter().all(|&x| x == v[0]) && v[p..].iter().all(|&x| x == v[p])
}

/// Checks an instance against the theorem's stated hypothesis.
pub fn hypothesis_holds(spec: &TheoremSpec, inst: &Instance) -> Result<bool> {
    let n = inst.lambda.len();
    if inst.theta.len() != n {
        return Ok(false);
    }
    let in_range = inst.alpha > 0.0 && inst.alpha <= spec.alpha_range.1 && (spec.n_range.0..=spec.n_range.1).contains(&n);
    if !in_range {
        return Ok(false);
    }
    let layout_ok = match spec.layout {
        Layout::General => true,
        Layout::Pair => n == 2,
        Layout::Outlier => inst
            .p
            .is_some_and(|p| is_two_valued(&inst.lambda, p) && is_two_valued(&inst.theta, p)),
    };
    if !layout_ok {
        return Ok(false);
    }
    let x = ParamVector::new(inst.lambda.clone())?;
    let y = ParamVector::new(inst.theta.clone())?;
    Ok(match spec.hypothesis {
        Hypothesis::Majorized => is_majorized(&x, &y)?,
        Hypothesis::WeaklyMajorized => is_weakly_majorized(&x, &y)?,
        Hypothesis::MinReplaced => {
            let (l1, l) = (inst.lambda[0], inst.lambda[n - 1]);
            let l1_star = inst.theta[0];
            inst.theta[n - 1] == l && l1_star <= l1.min(l) && is_weakly_majorized(&x, &y)?
        }
        Hypothesis::Nested => {
            let (l, t) = (&inst.lambda, &inst.theta);
            t[0] <= l[0] && l[0] <= l[1] && l[1] <= t[1] && is_weakly_majorized(&x, &y)?
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// The sampler produced a parameter set outside the hypothesis.
    Hypothesis,
    /// A conclusion check reported a violation.
    Conclusion,
    /// A conclusion check could not decide.
    Inconclusive,
    /// Evaluation failed outright.
    Error,
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub trial: usize,
    pub instance: Instance,
    pub kind: FailureKind,
    pub order: Option<Order>,
    pub witness: Option<Witness>,
    pub message: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    pub id: TheoremId,
    pub trials: usize,
    pub passes: usize,
    pub failures: Vec<Failure>,
    pub seed: u64,
    pub grid: GridSpec,
}

impl TheoremReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs the theorem's conclusion checks on one instance. `Ok(None)` is a pass.
fn run_instance(spec: &TheoremSpec, inst: &Instance, g: &GridSpec) -> Result<Option<(FailureKind, Option<Order>, Option<Witness>)>> {
    let (a, b) = inst.systems()?;
    let mut verdicts: Vec<OrderingVerdict> = Vec::with_capacity(spec.conclusion.len());
    for &order in &spec.conclusion {
        let v = ordering::check(order, &a, &b, g)?;
        if v.violated() {
            return Ok(Some((FailureKind::Conclusion, Some(order), v.witness)));
        }
        if !v.holds() {
            return Ok(Some((FailureKind::Inconclusive, Some(order), None)));
        }
        verdicts.push(v);
    }
    if spec.composed_lr {
        let rh = verdicts.iter().find(|v| v.order == Order::Rh).expect("rh is in the conclusion");
        let ratio = verdicts.iter().find(|v| v.order == Order::RhrRatio).expect("ratio is in the conclusion");
        if !ordering::compose_1c4(rh, ratio)?.holds() {
            return Ok(Some((FailureKind::Inconclusive, Some(Order::Lr), None)));
        }
    }
    Ok(None)
}

/// Samples `trials` hypothesis-satisfying instances and runs the conclusion
/// checks on each. Trial `i` draws from `rng::substream(seed, i)`, so the
/// report does not depend on how trials are scheduled across threads.
pub fn run_theorem(id: TheoremId, trials: usize, seed: u64, g: &GridSpec) -> Result<TheoremReport> {
    g.validate()?;
    let spec = theorem_spec(id);
    let outcomes: Vec<Option<Failure>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = rng::substream(seed, trial as u64);
            let instance = sample_instance(&spec, &mut rng);
            let failure = |kind, order, witness, message| {
                Some(Failure {
                    trial,
                    instance: instance.clone(),
                    kind,
                    order,
                    witness,
                    message,
                })
            };
            match hypothesis_holds(&spec, &instance) {
                Ok(true) => {}
                Ok(false) => return failure(FailureKind::Hypothesis, None, None, None),
                Err(e) => return failure(FailureKind::Error, None, None, Some(e.to_string())),
            }
            match run_instance(&spec, &instance, g) {
                Ok(None) => None,
                Ok(Some((kind, order, witness))) => failure(kind, order, witness, None),
                Err(e) => failure(FailureKind::Error, None, None, Some(e.to_string())),
            }
        })
        .collect();
    let failures: Vec<Failure> = outcomes.into_iter().flatten().collect();
    Ok(TheoremReport {
        id,
        trials,
        passes: trials - failures.len(),
        failures,
        seed,
        grid: *g,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExampleId {
    Ex1,
    Ex2a,
    Ex2b,
}

impl ExampleId {
    pub const ALL: [ExampleId; 3] = [ExampleId::Ex1, ExampleId::Ex2a, ExampleId::Ex2b];

    /// Figures 1-3 plot examples ex1, ex2a and ex2b.
    pub fn from_figure(figure: u32) -> Option<Self> {
        match figure {
            1 => Some(ExampleId::Ex1),
            2 => Some(ExampleId::Ex2a),
            3 => Some(ExampleId::Ex2b),
            _ => None,
        }
    }

    /// `(alpha, lower rates, upper rates)`.
    pub fn parameters(&self) -> (f64, Vec<f64>, Vec<f64>) {
        match self {
            ExampleId::Ex1 => (2.0, vec![1.5, 2.0], vec![1.0, 2.5]),
            ExampleId::Ex2a => (0.3, vec![3.5, 0.2], vec![2.0, 0.2]),
            ExampleId::Ex2b => (1.3, vec![3.5, 0.2], vec![2.0, 0.2]),
        }
    }
}

impl FromStr for ExampleId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ex1" => Ok(ExampleId::Ex1),
            "ex2a" => Ok(ExampleId::Ex2a),
            "ex2b" => Ok(ExampleId::Ex2b),
            other => Err(Error::UnknownExample(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Precondition {
    pub name: &'static str,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CurvePoint {
    pub t: f64,
    /// `f_upper(t) / f_lower(t)`.
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExampleReport {
    pub id: ExampleId,
    pub alpha: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub preconditions: Vec<Precondition>,
    pub verdict: OrderingVerdict,
    pub curve: Vec<CurvePoint>,
}

impl ExampleReport {
    pub fn preconditions_hold(&self) -> bool {
        self.preconditions.iter().all(|p| p.holds)
    }
}

/// Density ratio `f_b / f_a` on the evaluation grid, formed in log space.
pub fn density_ratio_curve(a: &ParallelSystem<f64>, b: &ParallelSystem<f64>, g: &GridSpec) -> Result<Vec<CurvePoint>> {
    ordering::evaluation_grid(a, b, g)?
        .into_iter()
        .map(|t| {
            Ok(CurvePoint {
                t,
                ratio: (b.ln_pdf_nn(t)? - a.ln_pdf_nn(t)?).exp(),
            })
        })
        .collect()
}

/// Rebuilds one of the published counterexamples to the likelihood ratio
/// order and checks its premises.
pub fn reproduce_example(id: ExampleId, g: &GridSpec) -> Result<ExampleReport> {
    let (alpha, lower, upper) = id.parameters();
    let a = ParallelSystem::new(alpha, lower.clone())?;
    let b = ParallelSystem::new(alpha, upper.clone())?;
    let x = ParamVector::new(lower.clone())?;
    let y = ParamVector::new(upper.clone())?;
    let preconditions = match id {
        ExampleId::Ex1 => vec![Precondition {
            name: "lower majorized by upper",
            holds: is_majorized(&x, &y)?,
        }],
        ExampleId::Ex2a | ExampleId::Ex2b => {
            // lower = (l1, l), upper = (l1*, l)
            let (l1, l, l1_star) = (lower[0], lower[1], upper[0]);
            vec![
                Precondition {
                    name: "lower weakly majorized by upper",
                    holds: is_weakly_majorized(&x, &y)?,
                },
                Precondition {
                    name: "shared rate",
                    holds: upper[1] == l,
                },
                Precondition {
                    name: "l <= l1* <= l1",
                    holds: l <= l1_star && l1_star <= l1,
                },
            ]
        }
    };
    Ok(ExampleReport {
        id,
        alpha,
        lower,
        upper,
        preconditions,
        verdict: ordering::check_lr(&a, &b, g)?,
        curve: density_ratio_curve(&a, &b, g)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanTarget {
    MajImpliesLr,
    WeakmajImpliesLr,
}

impl FromStr for ScanTarget {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "maj" | "maj_implies_lr" | "maj-implies-lr" => Ok(ScanTarget::MajImpliesLr),
            "weakmaj" | "weakmaj_implies_lr" | "weakmaj-implies-lr" => Ok(ScanTarget::WeakmajImpliesLr),
            other => Err(format!("unknown scan target `{other}` (expected maj or weakmaj)")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanConfig {
    /// Shapes are drawn uniformly from `(max(alpha_lo, ALPHA_FLOOR), alpha_hi]`.
    pub alpha_lo: f64,
    pub alpha_hi: f64,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub target: ScanTarget,
    /// Restrict to two-valued (multiple-outlier) rate vectors.
    pub multiple_outlier: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanHit {
    pub trial: usize,
    pub instance: Instance,
    pub witness: Witness,
}

fn scan_instance<R: RngCore>(cfg: &ScanConfig, rng: &mut R) -> Instance {
    let lo = cfg.alpha_lo.max(ALPHA_FLOOR);
    let alpha = rng::uniform(rng, lo, cfg.alpha_hi.max(lo));
    let n = cfg.n;
    let weak = cfg.target == ScanTarget::WeakmajImpliesLr;
    if cfg.multiple_outlier {
        let p = rng::int_in(rng, 1, n - 1);
        let (t1, t2) = (rate(rng), rate(rng));
        let mean = (p as f64 * t1 + (n - p) as f64 * t2) / n as f64;
        let c = rng::open01(rng);
        let mut l = [c * t1 + (1.0 - c) * mean, c * t2 + (1.0 - c) * mean];
        if weak {
            inflate(&mut l, rng);
        }
        Instance {
            alpha,
            lambda: outlier(l[0], p, l[1], n),
            theta: outlier(t1, p, t2, n),
            p: Some(p),
        }
    } else {
        let theta: Vec<f64> = (0..n).map(|_| rate(rng)).collect();
        let mut lambda = majorized_below(&theta, rng);
        if weak {
            inflate(&mut lambda, rng);
        }
        Instance {
            alpha,
            lambda,
            theta,
            p: None,
        }
    }
}

/// Random (weakly) majorized pairs checked for the likelihood ratio order.
/// Returns every pair whose lr check is violated, in trial order.
pub fn scan_counterexamples(cfg: &ScanConfig, g: &GridSpec) -> Result<Vec<ScanHit>> {
    g.validate()?;
    if cfg.n < 2 {
        return Err(crate::error::domain("n", cfg.n as f64, "need at least two components"));
    }
    if !(cfg.alpha_hi > 0.0 && cfg.alpha_hi.is_finite()) {
        return Err(crate::error::domain("alpha_hi", cfg.alpha_hi, "must be positive"));
    }
    let hits: Vec<Result<Option<ScanHit>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = rng::substream(cfg.seed, trial as u64);
            let instance = scan_instance(cfg, &mut rng);
            let (a, b) = instance.systems()?;
            let v = ordering::check_lr(&a, &b, g)?;
            Ok(v.witness.filter(|_| v.violated()).map(|witness| ScanHit { trial, instance, witness }))
        })
        .collect();
    hits.into_iter().filter_map(|r| r.transpose()).collect()
}
