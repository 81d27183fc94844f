//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::{deriv5, geometric, rel};
use ordcheck::majorization::majorized_below;
use ordcheck::mc_oracle::{dkw_compare, empirical_st_check, sample_parallel, EmpiricalSt};
use ordcheck::ordering::{self, GridSpec, Order, Verdict};
use ordcheck::special_fns::{s, u, u_prime, v, w};
use ordcheck::verify::{self, ExampleId, ScanConfig, ScanTarget, TheoremId};
use ordcheck::{rng, ParallelSystem64, Weibull64};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Worst normalised increment `(f[i+1] - f[i]) / max(|f[i]|, |f[i+1]|)` in
/// the direction that would break monotonicity. Negative when monotone.
fn worst_step(vals: &[f64], increasing: bool) -> f64 {
    vals.windows(2)
        .map(|p| {
            let d = if increasing { p[0] - p[1] } else { p[1] - p[0] };
            let scale = p[0].abs().max(p[1].abs());
            if scale == 0.0 {
                0.0
            } else {
                d / scale
            }
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Worst normalised drop in consecutive divided differences.
fn worst_convexity(ts: &[f64], vals: &[f64]) -> f64 {
    let slopes: Vec<f64> = ts.windows(2).zip(vals.windows(2)).map(|(t, f)| (f[1] - f[0]) / (t[1] - t[0])).collect();
    worst_step(&slopes, true)
}

fn scaled_grid(alpha: f64) -> Vec<f64> {
    geometric(1e-4, 1e2, 2048).into_iter().map(|x| x.powf(1.0 / alpha)).collect()
}

fn criterion_1() -> Outcome {
    const TOL: f64 = 1e-12;
    let mut worst = f64::NEG_INFINITY;
    let mut notes = Vec::new();
    let mut signs = Vec::new();
    let mut check = |name: &str, a: f64, bad: f64| {
        worst = worst.max(bad);
        if bad > TOL {
            notes.push(format!("{name} alpha={a} worst={bad:.3e}"));
        }
    };
    for a in [0.1, 0.3, 0.5, 0.8, 1.0] {
        let ts = scaled_grid(a);
        let uu: Vec<f64> = ts.iter().map(|&t| u(t, a).unwrap()).collect();
        let vv: Vec<f64> = ts.iter().map(|&t| v(t, a).unwrap()).collect();
        let ww: Vec<f64> = ts.iter().map(|&t| w(t, a).unwrap()).collect();
        check("u nonincreasing", a, worst_step(&uu, false));
        check("u convex", a, worst_convexity(&ts, &uu));
        check("v nondecreasing", a, worst_step(&vv, true));
        check("w nondecreasing", a, worst_step(&ww, true));
        if ww.iter().any(|&x| x > 0.0) {
            signs.push(format!("w positive at alpha={a}"));
        }
    }
    for a in [1.5, 2.0, 5.0] {
        let ts = scaled_grid(a);
        let uu: Vec<f64> = ts.iter().map(|&t| u(t, a).unwrap()).collect();
        let vv: Vec<f64> = ts.iter().map(|&t| v(t, a).unwrap()).collect();
        check("u nonincreasing", a, worst_step(&uu, false));
        check("v nondecreasing", a, worst_step(&vv, true));
    }
    notes.extend(signs);
    outcome(notes.is_empty(), format!("worst normalised step {worst:.2e} (tol {TOL:.0e}) {}", notes.join("; ")))
}

fn criterion_2() -> Outcome {
    let mut notes = Vec::new();
    let alphas = [0.1, 0.3, 0.5, 0.8, 1.0, 1.5, 2.0, 5.0];

    // v - u = t^alpha. Both operands are near 1 when t^alpha is small, so the
    // float difference is quantised to 2^-53 and accuracy is judged against
    // the operand scale; error relative to t^alpha alone is shown alongside.
    let (mut id_err, mut id_strict): (f64, f64) = (0.0, 0.0);
    for a in alphas {
        for t in scaled_grid(a) {
            let x = t.powf(a);
            let (vv, uu) = (v(t, a).unwrap(), u(t, a).unwrap());
            id_err = id_err.max(((vv - uu) - x).abs() / vv.max(x));
            id_strict = id_strict.max(rel(vv - uu, x));
        }
    }
    if id_err > 1e-13 {
        notes.push(format!("v-u={id_err:.2e}"));
    }

    // u' and w = u s' against five-point differences
    let (mut up_err, mut ws_err): (f64, f64) = (0.0, 0.0);
    for a in alphas {
        for t in geometric(1e-4, 1e2, 257).into_iter().map(|x: f64| x.powf(1.0 / a)) {
            // Step on the scale over which u varies, t / (alpha max(1, t^alpha)).
            let h = 1e-3 * t / (a * t.powf(a)).max(1.0);
            up_err = up_err.max(rel(u_prime(t, a).unwrap(), deriv5(|x| u(x, a).unwrap(), t, h)));
            let sp = deriv5(|x| s(x, a).unwrap(), t, h);
            ws_err = ws_err.max(rel(w(t, a).unwrap(), u(t, a).unwrap() * sp));
        }
    }
    if up_err > 1e-6 {
        notes.push(format!("u'={up_err:.2e}"));
    }
    if ws_err > 1e-6 {
        notes.push(format!("w=us'={ws_err:.2e}"));
    }

    // reverse hazard = pdf / cdf
    let mut rh_err: f64 = 0.0;
    for a in alphas {
        for l in [0.1, 1.0, 7.0] {
            let c = Weibull64::new(a, l).unwrap();
            for q in geometric(1e-6, 1.0 - 1e-6, 200) {
                let t = c.quantile(q).unwrap();
                rh_err = rh_err.max(rel(c.reverse_hazard(t).unwrap(), c.pdf(t).unwrap() / c.cdf(t).unwrap()));
            }
        }
    }
    if rh_err > 1e-12 {
        notes.push(format!("rhr={rh_err:.2e}"));
    }

    // pdf_nn = d cdf_nn / dt on quantile-interior grids
    let mut pdf_err: f64 = 0.0;
    let mut r = rng::stream(2);
    for _ in 0..50 {
        let n = rng::int_in(&mut r, 1, 6);
        let a = rng::uniform(&mut r, 0.1, 4.0);
        let l: Vec<f64> = (0..n).map(|_| rng::log_uniform(&mut r, 0.1, 10.0)).collect();
        let sys = ParallelSystem64::new(a, l).unwrap();
        for i in 1..100 {
            let t = sys.quantile_nn(i as f64 / 100.0).unwrap();
            let fd = deriv5(|x| sys.cdf_nn(x).unwrap(), t, 1e-3 * t);
            pdf_err = pdf_err.max(rel(sys.pdf_nn(t).unwrap(), fd));
        }
    }
    if pdf_err > 1e-6 {
        notes.push(format!("pdf_nn={pdf_err:.2e}"));
    }

    outcome(
        notes.is_empty(),
        format!(
            "v-u {id_err:.1e} (1e-13; {id_strict:.1e} relative to t^alpha), u' {up_err:.1e} (1e-6), w=us' {ws_err:.1e} (1e-6), rhr {rh_err:.1e} (1e-12), pdf_nn {pdf_err:.1e} (1e-6) {}",
            notes.join(" ")
        ),
    )
}

fn criterion_3() -> Outcome {
    let g = GridSpec::default();
    let mut failures = 0;
    let mut runs = 0;
    let mut notes = Vec::new();
    for id in TheoremId::ALL {
        for seed in [1, 2, 3] {
            let r = verify::run_theorem(id, 200, seed, &g).unwrap();
            runs += r.trials;
            if !r.failures.is_empty() {
                notes.push(format!("{id}/seed {seed}: {}", r.failures.len()));
            }
            failures += r.failures.len();
        }
    }
    outcome(failures == 0, format!("{runs} trials, {failures} failures {}", notes.join(", ")))
}

fn criterion_4() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for id in ExampleId::ALL {
        let coarse = verify::reproduce_example(id, &GridSpec::default()).unwrap();
        let fine = verify::reproduce_example(id, &GridSpec::default().with_points(8192)).unwrap();
        let ok_pre = coarse.preconditions_hold() && fine.preconditions_hold();
        let ok_verdict = coarse.verdict.violated() && fine.verdict.violated();
        let (wc, wf) = (coarse.verdict.witness.unwrap(), fine.verdict.witness.unwrap());
        // One coarse cell in log t.
        let cell = (coarse.verdict.t_hi / coarse.verdict.t_lo).ln() / (GridSpec::default().points - 1) as f64;
        let shift = (wf.t / wc.t).ln().abs();
        let ok_loc = shift <= cell * (1.0 + 1e-9);
        if !(ok_pre && ok_verdict && ok_loc) {
            ok = false;
            notes.push(format!("{id:?}: pre={ok_pre} violated={ok_verdict} shift={shift:.2e} cell={cell:.2e}"));
        }
        notes.push(format!("{id:?} t*={:.4}", wc.t));
    }
    outcome(ok, notes.join(", "))
}

fn criterion_5() -> Outcome {
    let g = GridSpec::default();
    let mut r = rng::stream(5);
    let (mut bad, mut lr_holds) = (Vec::new(), 0);
    for k in 0..500 {
        let n = rng::int_in(&mut r, 2, 5);
        let a = rng::uniform(&mut r, 0.1, 3.0);
        let theta: Vec<f64> = (0..n).map(|_| rng::log_uniform(&mut r, 0.1, 10.0)).collect();
        let lambda: Vec<f64> = match k % 3 {
            0 => (0..n).map(|_| rng::log_uniform(&mut r, 0.1, 10.0)).collect(),
            1 => majorized_below(&theta, &mut r),
            _ => theta.iter().map(|&t| t * (1.0 + rng::open01(&mut r))).collect(),
        };
        let lo = ParallelSystem64::new(a, lambda.clone()).unwrap();
        let hi = ParallelSystem64::new(a, theta.clone()).unwrap();
        let v = |o| ordering::check(o, &lo, &hi, &g).unwrap().verdict;
        let (st, hr, rh, lr) = (v(Order::St), v(Order::Hr), v(Order::Rh), v(Order::Lr));
        let vio = Verdict::Violated;
        let holds = Verdict::HoldsOnGrid;
        if lr == holds {
            lr_holds += 1;
        }
        if (lr == holds && (hr == vio || rh == vio || st == vio)) || ((rh == holds || hr == holds) && st == vio) {
            bad.push(format!("pair {k}: st={st:?} hr={hr:?} rh={rh:?} lr={lr:?} alpha={a} lambda={lambda:?} theta={theta:?} hrw={:?}", ordering::check(Order::Hr, &lo, &hi, &g).unwrap().witness));
        }
    }
    outcome(bad.is_empty(), format!("500 pairs, {lr_holds} with lr holding, {} inconsistent {}", bad.len(), bad.join("; ")))
}

fn criterion_6() -> Outcome {
    let mut notes = Vec::new();
    let mut r = rng::stream(6);
    let mut worst: f64 = 0.0;
    for k in 0..20u64 {
        let n = rng::int_in(&mut r, 1, 5);
        let a = rng::uniform(&mut r, verify::ALPHA_FLOOR, 3.0);
        let l: Vec<f64> = (0..n).map(|_| rng::log_uniform(&mut r, 0.1, 10.0)).collect();
        let sys = ParallelSystem64::new(a, l).unwrap();
        let emp = sample_parallel(&sys, 100_000, rng::substream_seed(6, k)).unwrap();
        let rep = dkw_compare(&emp, &sys, 0.99).unwrap();
        worst = worst.max(rep.sup_distance / rep.bound);
        if !rep.pass {
            notes.push(format!("system {k} sup={:.4} bound={:.4}", rep.sup_distance, rep.bound));
        }
    }
    let g = GridSpec::default();
    let a = ParallelSystem64::new(0.5, vec![1.0, 1.0]).unwrap();
    let b = ParallelSystem64::new(0.5, vec![0.5, 1.5]).unwrap();
    let fwd = empirical_st_check(&a, &b, 100_000, 60, 0.99, &g).unwrap();
    let rev = empirical_st_check(&b, &a, 100_000, 61, 0.99, &g).unwrap();
    if !(fwd.agrees && fwd.analytic == Verdict::HoldsOnGrid && fwd.empirical == EmpiricalSt::ConsistentWithHolds) {
        notes.push(format!("cor1 instance: {fwd:?}"));
    }
    if !(rev.agrees && rev.analytic == Verdict::Violated && rev.empirical == EmpiricalSt::Violated) {
        notes.push(format!("reversed: {rev:?}"));
    }
    outcome(
        notes.is_empty(),
        format!(
            "20 systems, worst sup/bound {worst:.3}; cor1 excess {:.4} band {:.4}; reversed excess {:.4} {}",
            fwd.max_excess,
            fwd.band,
            rev.max_excess,
            notes.join("; ")
        ),
    )
}

fn criterion_7() -> Outcome {
    let g = GridSpec::default();
    let cfg = |lo, hi| ScanConfig {
        alpha_lo: lo,
        alpha_hi: hi,
        n: 2,
        trials: 500,
        seed: 7,
        target: ScanTarget::MajImpliesLr,
        multiple_outlier: false,
    };
    let small = verify::scan_counterexamples(&cfg(0.0, 1.0), &g).unwrap();
    let large = verify::scan_counterexamples(&cfg(1.5, 3.0), &g).unwrap();
    outcome(
        small.is_empty() && !large.is_empty(),
        format!("alpha in (0,1]: {} hits; alpha in (1.5,3): {} hits", small.len(), large.len()),
    )
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_ordcheck")
}

fn run_cli(args: &[&str], threads: &str) -> (i32, Vec<u8>) {
    let out = Command::new(bin()).args(args).env("ORDCHECK_THREADS", threads).output().unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let (fig_a, fig_b, rep_a, rep_b) = (path("fig_a.csv"), path("fig_b.csv"), path("rep_a.json"), path("rep_b.json"));
    let commands: Vec<(Vec<String>, Vec<String>, Option<(String, String)>)> = {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let same = |v: &[&str]| (s(v), s(v), None);
        vec![
            same(&["dist", "--shape", "0.7", "--lambda", "1,2,3", "--t", "0.1,1,10", "--aux"]),
            same(&["--format", "csv", "dist", "--shape", "2", "--rate", "1", "--q", "0.1,0.5,0.9"]),
            same(&["check-order", "--order", "lr", "--shape", "2", "--lambda", "1.5,2", "--theta", "1,2.5"]),
            same(&["check-order", "--order", "hr", "--shape", "0.5", "--lambda", "1,1", "--theta", "0.5,1.5"]),
            same(&["check-majorization", "--x", "1.5,2", "--y", "1,2.5"]),
            same(&["verify-theorem", "--id", "th16", "--trials", "50", "--seed", "3"]),
            same(&["scan", "--alpha-lo", "1.5", "--alpha-hi", "3", "--n", "3", "--trials", "100", "--seed", "4"]),
            same(&["--format", "csv", "scan", "--alpha-lo", "1.5", "--alpha-hi", "3", "--trials", "100", "--seed", "4"]),
            same(&["mc-compare", "--shape", "0.5", "--lambda", "1,1", "--theta", "0.5,1.5", "--n", "20000", "--seed", "9"]),
            (
                s(&["verify-theorem", "--id", "th01", "--trials", "40", "--seed", "2", "--out", &rep_a]),
                s(&["verify-theorem", "--id", "th01", "--trials", "40", "--seed", "2", "--out", &rep_b]),
                Some((rep_a.clone(), rep_b.clone())),
            ),
            (
                s(&["reproduce-figure", "--figure", "2", "--out", &fig_a]),
                s(&["reproduce-figure", "--figure", "2", "--out", &fig_b]),
                Some((fig_a.clone(), fig_b.clone())),
            ),
        ]
    };
    let mut notes = Vec::new();
    for (first, second, files) in &commands {
        let a: Vec<&str> = first.iter().map(String::as_str).collect();
        let b: Vec<&str> = second.iter().map(String::as_str).collect();
        // Different thread counts must not change the data either.
        let (ca, oa) = run_cli(&a, "1");
        let (cb, ob) = run_cli(&b, "4");
        let name = first.iter().find(|x| !x.starts_with('-') && *x != "csv").cloned().unwrap_or_default();
        if ca == 1 || cb == 1 {
            notes.push(format!("{name}: usage error"));
        }
        // Paths differ between the two figure runs, so compare everything
        // but that echo.
        let strip = |o: &[u8], p: &str| String::from_utf8_lossy(o).replace(p, "<out>");
        let same_stdout = match files {
            Some((pa, pb)) => strip(&oa, pa) == strip(&ob, pb),
            None => oa == ob,
        };
        let same_files = files
            .as_ref()
            .is_none_or(|(pa, pb)| Path::new(pa).exists() && std::fs::read(pa).unwrap() == std::fs::read(pb).unwrap());
        if ca != cb || !same_stdout || !same_files {
            notes.push(format!("{name}: differs"));
        }
    }
    outcome(notes.is_empty(), format!("{} commands re-run {}", commands.len(), notes.join("; ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 8] = [
        ("1 lemma suite", criterion_1, Some(Duration::from_secs(5))),
        ("2 identity suite", criterion_2, None),
        ("3 theorem suite", criterion_3, Some(Duration::from_secs(300))),
        ("4 counterexamples", criterion_4, None),
        ("5 order-chain consistency", criterion_5, None),
        ("6 monte carlo cross-check", criterion_6, Some(Duration::from_secs(120))),
        ("7 scanner sanity", criterion_7, None),
        ("8 cli determinism", criterion_8, None),
    ];
    let mut failed = 0;
    for (name, f, limit) in criteria {
        let start = Instant::now();
        let o = f();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let pass = o.pass && in_time;
        if !pass {
            failed += 1;
        }
        let budget = limit.map(|l| format!(" / {}s", l.as_secs())).unwrap_or_default();
        println!(
            "{} criterion {name}: {} [{:.2}s{budget}]",
            if pass { "PASS" } else { "FAIL" },
            o.detail.trim_end(),
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
