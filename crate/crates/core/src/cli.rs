//! Command-line front end. [`run`] holds everything except process setup so
//! it can be driven from tests with in-memory writers.
//!
//! Data goes to stdout (or `--out`), diagnostics to stderr. Exit codes:
//! `0` success or an order that holds, `1` usage or I/O error, `2` a
//! violated order or failed theorem run, `3` an inconclusive check.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::majorization::{is_majorized, is_weakly_majorized, ParamVector};
use crate::mc_oracle;
use crate::ordering::{self, GridSpec, Order, Verdict};
use crate::parallel::ParallelSystem;
use crate::special_fns;
use crate::verify::{self, ExampleId, ScanConfig, ScanTarget, TheoremId};

pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATED: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

type CmdResult = std::result::Result<i32, Box<dyn std::error::Error>>;

#[derive(Parser, Debug)]
#[command(name = "ordcheck", version)]
#[command(about = "Weibull parallel-system distributions and stochastic order checks")]
pub struct Cli {
    /// Output format for tabular data
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the lifetime distribution of a component or parallel system
    Dist(DistArgs),
    /// Check a stochastic order between two parallel systems
    CheckOrder(CheckOrderArgs),
    /// Test whether x is (weakly) majorized by y
    CheckMajorization(MajorizationArgs),
    /// Run a theorem's randomized verification
    VerifyTheorem(VerifyArgs),
    /// Write density-ratio data for one of the published counterexamples
    ReproduceFigure(FigureArgs),
    /// Search random majorized pairs for likelihood ratio violations
    Scan(ScanArgs),
    /// Compare simulated lifetimes with the analytic distribution
    McCompare(McArgs),
}

#[derive(Args, Debug, Clone, Copy)]
struct GridArgs {
    /// Grid points between the quantile anchors
    #[arg(long)]
    points: Option<usize>,
    /// Lower quantile anchor of the grid
    #[arg(long)]
    q_lo: Option<f64>,
    /// Upper quantile anchor of the grid
    #[arg(long)]
    q_hi: Option<f64>,
    /// Monotonicity tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Local refinement rounds around the worst margin
    #[arg(long)]
    refine_rounds: Option<usize>,
}

impl GridArgs {
    fn spec(&self) -> crate::Result<GridSpec> {
        let d = GridSpec::default();
        let g = GridSpec {
            q_lo: self.q_lo.unwrap_or(d.q_lo),
            q_hi: self.q_hi.unwrap_or(d.q_hi),
            points: self.points.unwrap_or(d.points),
            refine_rounds: self.refine_rounds.unwrap_or(d.refine_rounds),
            mono_tol: self.tol.unwrap_or(d.mono_tol),
        };
        g.validate()?;
        Ok(g)
    }
}

#[derive(Args, Debug)]
struct DistArgs {
    /// Common shape parameter
    #[arg(long, value_parser = positive)]
    shape: f64,
    /// Rate of a single component
    #[arg(long, value_parser = positive, conflicts_with = "lambda", required_unless_present = "lambda")]
    rate: Option<f64>,
    /// Component rates of a parallel system
    #[arg(long, value_parser = positive_list)]
    lambda: Option<List>,
    /// Evaluation points
    #[arg(long, value_parser = nonnegative_list)]
    t: Option<List>,
    /// Probabilities to invert
    #[arg(long, value_parser = nonnegative_list)]
    q: Option<List>,
    #[arg(long)]
    pdf: bool,
    #[arg(long)]
    cdf: bool,
    #[arg(long)]
    survival: bool,
    #[arg(long)]
    hazard: bool,
    /// Reverse hazard rate
    #[arg(long)]
    rhr: bool,
    /// Auxiliary functions u, v, s, w of (t, shape), ignoring the rates
    #[arg(long)]
    aux: bool,
}

#[derive(Args, Debug)]
struct CheckOrderArgs {
    /// st, hr, rh, lr or rhr-ratio
    #[arg(long)]
    order: Order,
    #[arg(long, value_parser = positive)]
    shape: f64,
    /// Rates of the system claimed to be smaller
    #[arg(long, value_parser = positive_list)]
    lambda: List,
    /// Rates of the system claimed to be larger
    #[arg(long, value_parser = positive_list)]
    theta: List,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug)]
struct MajorizationArgs {
    #[arg(long, value_parser = positive_list)]
    x: List,
    #[arg(long, value_parser = positive_list)]
    y: List,
    /// Weak majorization instead of majorization
    #[arg(long)]
    weak: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// th07, cor1, th08, th09, th15, th16, th10, th01, th11, th17 or th14
    #[arg(long)]
    id: String,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug)]
struct FigureArgs {
    /// 1 (ex1), 2 (ex2a) or 3 (ex2b)
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=3))]
    figure: u32,
    /// CSV destination
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long, default_value_t = 0.0)]
    alpha_lo: f64,
    #[arg(long, value_parser = positive, default_value_t = 1.0)]
    alpha_hi: f64,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// maj or weakmaj
    #[arg(long, default_value = "maj")]
    target: ScanTarget,
    /// Restrict to two-valued rate vectors
    #[arg(long)]
    multiple_outlier: bool,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug)]
struct McArgs {
    #[arg(long, value_parser = positive)]
    shape: f64,
    #[arg(long, value_parser = positive_list)]
    lambda: List,
    /// Second system; adds an empirical st comparison against it
    #[arg(long, value_parser = positive_list)]
    theta: Option<List>,
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.99)]
    confidence: f64,
    #[command(flatten)]
    grid: GridArgs,
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` must be positive and finite"))
    }
}

/// Comma-separated numbers. A newtype so clap keeps it a single value.
#[derive(Debug, Clone, PartialEq)]
struct List(Vec<f64>);

fn list(s: &str, check: fn(&str) -> std::result::Result<f64, String>) -> std::result::Result<List, String> {
    s.split(',').map(check).collect::<std::result::Result<_, _>>().map(List)
}

fn positive_list(s: &str) -> std::result::Result<List, String> {
    list(s, positive)
}

fn nonnegative_list(s: &str) -> std::result::Result<List, String> {
    list(s, |x| {
        let v: f64 = x.trim().parse().map_err(|_| format!("`{x}` is not a number"))?;
        if v >= 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(format!("`{x}` must be finite and >= 0"))
        }
    })
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    #[serde(flatten)]
    body: &'a T,
}

fn to_json<T: Serialize>(body: &T) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(&Envelope {
        schema_version: SCHEMA_VERSION,
        body,
    })?;
    s.push('\n');
    Ok(s)
}

/// 17 significant digits.
fn csv_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> CmdResult {
    match &cli.command {
        Command::Dist(a) => cmd_dist(a, cli.format, out),
        Command::CheckOrder(a) => json_only(cli.format, "check-order").and_then(|_| cmd_check_order(a, out)),
        Command::CheckMajorization(a) => json_only(cli.format, "check-majorization").and_then(|_| cmd_check_majorization(a, out)),
        Command::VerifyTheorem(a) => json_only(cli.format, "verify-theorem").and_then(|_| cmd_verify_theorem(a, out)),
        Command::ReproduceFigure(a) => json_only(cli.format, "reproduce-figure").and_then(|_| cmd_reproduce_figure(a, out)),
        Command::Scan(a) => cmd_scan(a, cli.format, out),
        Command::McCompare(a) => json_only(cli.format, "mc-compare").and_then(|_| cmd_mc_compare(a, out)),
    }
}

fn json_only(format: Format, name: &str) -> CmdResult {
    match format {
        Format::Json => Ok(EXIT_OK),
        Format::Csv => Err(format!("{name} only writes JSON").into()),
    }
}

#[derive(Serialize, Default)]
struct DistRow {
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quantile: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pdf: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cdf: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    survival: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hazard: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rhr: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    w: Option<f64>,
}

#[derive(Serialize)]
struct DistOut {
    shape: f64,
    lambda: Vec<f64>,
    rows: Vec<DistRow>,
}

fn cmd_dist(a: &DistArgs, format: Format, out: &mut dyn Write) -> CmdResult {
    let lambdas = match (&a.lambda, a.rate) {
        (Some(l), _) => l.0.clone(),
        (None, Some(r)) => vec![r],
        (None, None) => unreachable!("clap requires one of --rate and --lambda"),
    };
    let sys = ParallelSystem::new(a.shape, lambdas.clone())?;
    let (ts, qs) = (a.t.clone().map(|l| l.0).unwrap_or_default(), a.q.clone().map(|l| l.0).unwrap_or_default());
    if ts.is_empty() && qs.is_empty() {
        return Err("give evaluation points with --t or probabilities with --q".into());
    }
    let any = a.pdf || a.cdf || a.survival || a.hazard || a.rhr || a.aux;
    let (pdf, cdf, survival, rhr) = if any { (a.pdf, a.cdf, a.survival, a.rhr) } else { (true, true, true, true) };
    let hazard = if any { a.hazard } else { true };

    let mut rows = Vec::new();
    for &t in &ts {
        let ln_pdf = || sys.ln_pdf_nn(t);
        rows.push(DistRow {
            t: Some(t),
            pdf: pdf.then(|| sys.pdf_nn(t)).transpose()?,
            cdf: cdf.then(|| sys.cdf_nn(t)).transpose()?,
            survival: survival.then(|| sys.ln_survival_nn(t).map(f64::exp)).transpose()?,
            hazard: hazard
                .then(|| -> crate::Result<f64> { Ok((ln_pdf()? - sys.ln_survival_nn(t)?).exp()) })
                .transpose()?,
            rhr: rhr.then(|| sys.rhr_nn(t)).transpose()?,
            u: a.aux.then(|| special_fns::u(t, a.shape)).transpose()?,
            v: a.aux.then(|| special_fns::v(t, a.shape)).transpose()?,
            s: a.aux.then(|| special_fns::s(t, a.shape)).transpose()?,
            w: a.aux.then(|| special_fns::w(t, a.shape)).transpose()?,
            ..DistRow::default()
        });
    }
    for &q in &qs {
        rows.push(DistRow {
            q: Some(q),
            quantile: Some(sys.quantile_nn(q)?),
            ..DistRow::default()
        });
    }

    match format {
        Format::Json => {
            out.write_all(to_json(&DistOut { shape: a.shape, lambda: lambdas, rows })?.as_bytes())?;
        }
        Format::Csv => {
            if !ts.is_empty() && !qs.is_empty() {
                return Err("csv output takes either --t or --q, not both".into());
            }
            let mut text = String::new();
            if qs.is_empty() {
                let cols: Vec<(&str, fn(&DistRow) -> Option<f64>)> = vec![
                    ("pdf", |r| r.pdf),
                    ("cdf", |r| r.cdf),
                    ("survival", |r| r.survival),
                    ("hazard", |r| r.hazard),
                    ("rhr", |r| r.rhr),
                    ("u", |r| r.u),
                    ("v", |r| r.v),
                    ("s", |r| r.s),
                    ("w", |r| r.w),
                ];
                let cols: Vec<_> = cols.into_iter().filter(|(_, f)| f(&rows[0]).is_some()).collect();
                text.push('t');
                for (name, _) in &cols {
                    text.push(',');
                    text.push_str(name);
                }
                text.push('\n');
                for r in &rows {
                    text.push_str(&csv_num(r.t.expect("t row")));
                    for (_, f) in &cols {
                        text.push(',');
                        text.push_str(&csv_num(f(r).expect("column selected for every row")));
                    }
                    text.push('\n');
                }
            } else {
                text.push_str("q,quantile\n");
                for r in &rows {
                    text.push_str(&format!("{},{}\n", csv_num(r.q.expect("q row")), csv_num(r.quantile.expect("q row"))));
                }
            }
            out.write_all(text.as_bytes())?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CheckOrderOut<'a> {
    witness_t: Option<f64>,
    #[serde(flatten)]
    verdict: &'a ordering::OrderingVerdict,
}

pub fn verdict_exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::HoldsOnGrid => EXIT_OK,
        Verdict::Violated => EXIT_VIOLATED,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn cmd_check_order(a: &CheckOrderArgs, out: &mut dyn Write) -> CmdResult {
    if a.lambda.0.len() != a.theta.0.len() {
        return Err(crate::Error::LengthMismatch {
            left: a.lambda.0.len(),
            right: a.theta.0.len(),
        }
        .into());
    }
    let g = a.grid.spec()?;
    let lower = ParallelSystem::new(a.shape, a.lambda.0.clone())?;
    let upper = ParallelSystem::new(a.shape, a.theta.0.clone())?;
    let v = ordering::check(a.order, &lower, &upper, &g)?;
    let body = CheckOrderOut {
        witness_t: v.witness.map(|w| w.t),
        verdict: &v,
    };
    out.write_all(to_json(&body)?.as_bytes())?;
    Ok(verdict_exit_code(v.verdict))
}

#[derive(Serialize)]
struct MajorizationOut<'a> {
    relation: &'static str,
    x: &'a [f64],
    y: &'a [f64],
    holds: bool,
}

fn cmd_check_majorization(a: &MajorizationArgs, out: &mut dyn Write) -> CmdResult {
    let x = ParamVector::new(a.x.0.clone())?;
    let y = ParamVector::new(a.y.0.clone())?;
    let (relation, holds) = if a.weak {
        ("weakly_majorized", is_weakly_majorized(&x, &y)?)
    } else {
        ("majorized", is_majorized(&x, &y)?)
    };
    let body = MajorizationOut {
        relation,
        x: &a.x.0,
        y: &a.y.0,
        holds,
    };
    out.write_all(to_json(&body)?.as_bytes())?;
    Ok(EXIT_OK)
}

fn cmd_verify_theorem(a: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let id: TheoremId = a.id.parse()?;
    let g = a.grid.spec()?;
    let report = verify::run_theorem(id, a.trials, a.seed, &g)?;
    let text = to_json(&report)?;
    match &a.out {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_VIOLATED })
}

#[derive(Serialize)]
struct FigureOut<'a> {
    figure: u32,
    example: ExampleId,
    alpha: f64,
    lower: &'a [f64],
    upper: &'a [f64],
    preconditions: &'a [verify::Precondition],
    verdict: Verdict,
    witness: Option<ordering::Witness>,
    points: usize,
    csv: String,
}

pub fn curve_csv(curve: &[verify::CurvePoint]) -> String {
    let mut text = String::from("t,ratio\n");
    for p in curve {
        text.push_str(&csv_num(p.t));
        text.push(',');
        text.push_str(&csv_num(p.ratio));
        text.push('\n');
    }
    text
}

fn cmd_reproduce_figure(a: &FigureArgs, out: &mut dyn Write) -> CmdResult {
    let id = ExampleId::from_figure(a.figure).expect("clap limits the figure number");
    let g = a.grid.spec()?;
    let r = verify::reproduce_example(id, &g)?;
    fs::write(&a.out, curve_csv(&r.curve))?;
    let body = FigureOut {
        figure: a.figure,
        example: id,
        alpha: r.alpha,
        lower: &r.lower,
        upper: &r.upper,
        preconditions: &r.preconditions,
        verdict: r.verdict.verdict,
        witness: r.verdict.witness,
        points: r.curve.len(),
        csv: a.out.display().to_string(),
    };
    out.write_all(to_json(&body)?.as_bytes())?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ScanOut<'a> {
    config: &'a ScanConfig,
    grid: GridSpec,
    count: usize,
    hits: &'a [verify::ScanHit],
}

fn cmd_scan(a: &ScanArgs, format: Format, out: &mut dyn Write) -> CmdResult {
    if !(a.alpha_lo >= 0.0 && a.alpha_lo < a.alpha_hi) {
        return Err("need 0 <= alpha-lo < alpha-hi".into());
    }
    if a.multiple_outlier && a.n < 3 {
        return Err("multiple-outlier scans need n >= 3".into());
    }
    let g = a.grid.spec()?;
    let cfg = ScanConfig {
        alpha_lo: a.alpha_lo,
        alpha_hi: a.alpha_hi,
        n: a.n,
        trials: a.trials,
        seed: a.seed,
        target: a.target,
        multiple_outlier: a.multiple_outlier,
    };
    let hits = verify::scan_counterexamples(&cfg, &g)?;
    match format {
        Format::Json => {
            let body = ScanOut {
                config: &cfg,
                grid: g,
                count: hits.len(),
                hits: &hits,
            };
            out.write_all(to_json(&body)?.as_bytes())?;
        }
        Format::Csv => {
            let mut text = String::from("trial,alpha,lambda,theta,t,t_end,magnitude\n");
            let join = |v: &[f64]| v.iter().map(|&x| csv_num(x)).collect::<Vec<_>>().join(";");
            for h in &hits {
                text.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    h.trial,
                    csv_num(h.instance.alpha),
                    join(&h.instance.lambda),
                    join(&h.instance.theta),
                    csv_num(h.witness.t),
                    h.witness.t_end.map(csv_num).unwrap_or_default(),
                    csv_num(h.witness.magnitude),
                ));
            }
            out.write_all(text.as_bytes())?;
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct McOut {
    dkw: mc_oracle::DkwReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    st: Option<mc_oracle::EmpiricalStReport>,
}

fn cmd_mc_compare(a: &McArgs, out: &mut dyn Write) -> CmdResult {
    let g = a.grid.spec()?;
    let sys = ParallelSystem::new(a.shape, a.lambda.0.clone())?;
    let emp = mc_oracle::sample_parallel(&sys, a.n, a.seed)?;
    let dkw = mc_oracle::dkw_compare(&emp, &sys, a.confidence)?;
    let st = match &a.theta {
        Some(theta) => {
            if theta.0.len() != a.lambda.0.len() {
                return Err(crate::Error::LengthMismatch {
                    left: a.lambda.0.len(),
                    right: theta.0.len(),
                }
                .into());
            }
            let other = ParallelSystem::new(a.shape, theta.0.clone())?;
            Some(mc_oracle::empirical_st_check(&sys, &other, a.n, a.seed, a.confidence, &g)?)
        }
        None => None,
    };
    let pass = dkw.pass && st.as_ref().is_none_or(|r| r.agrees);
    out.write_all(to_json(&McOut { dkw, st })?.as_bytes())?;
    Ok(if pass { EXIT_OK } else { EXIT_VIOLATED })
}
