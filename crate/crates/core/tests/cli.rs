use std::process::{Command, Output};

use serde_json::Value;

fn ordcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ordcheck")).args(args).output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn check_order_exit_codes() {
    let o = ordcheck(&["check-order", "--order", "lr", "--shape", "2", "--lambda", "1.5,2", "--theta", "1,2.5"]);
    assert_eq!(o.status.code(), Some(2));
    let v = json(&o);
    assert_eq!(v["verdict"], "violated");
    assert_eq!(v["order"], "lr");
    assert!(v["witness_t"].as_f64().unwrap() > 0.0);
    assert_eq!(v["grid"]["points"], 2048);
    assert_eq!(v["schema_version"], 1);

    let o = ordcheck(&["check-order", "--order", "rh", "--shape", "0.5", "--lambda", "1,1", "--theta", "0.5,1.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["verdict"], "holds_on_grid");

    let o = ordcheck(&["check-order", "--order", "st", "--shape", "1.3", "--lambda", "2,7", "--theta", "2,7"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn usage_errors_go_to_stderr() {
    let o = ordcheck(&["check-order", "--order", "lr", "--shape", "2", "--lambda", "1.5,2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());

    let o = ordcheck(&["check-order", "--order", "lr", "--shape", "2", "--lambda", "1,x", "--theta", "1,2"]);
    assert_eq!(o.status.code(), Some(1));

    let o = ordcheck(&["check-order", "--order", "lr", "--shape", "2", "--lambda", "1,2", "--theta", "1,2", "--points", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grid"));

    assert_eq!(ordcheck(&["--help"]).status.code(), Some(0));
    assert_eq!(ordcheck(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn check_majorization() {
    let o = ordcheck(&["check-majorization", "--x", "1.5,2", "--y", "1,2.5"]);
    assert_eq!(json(&o)["holds"], true);
    let o = ordcheck(&["check-majorization", "--x", "1,1", "--y", "3,3", "--weak"]);
    let v = json(&o);
    assert_eq!(v["holds"], false);
    assert_eq!(v["relation"], "weakly_majorized");
    let o = ordcheck(&["check-majorization", "--x", "1,1", "--y", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn dist_values() {
    let o = ordcheck(&["dist", "--shape", "1", "--rate", "1", "--cdf", "--t", "1"]);
    let v = json(&o);
    assert!((v["rows"][0]["cdf"].as_f64().unwrap() - 0.6321206).abs() < 1e-7);

    let o = ordcheck(&["--format", "csv", "dist", "--shape", "1", "--lambda", "1,2", "--q", "0.5"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("q,quantile"));
    let t: f64 = lines.next().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    // (1 - e^-t)(1 - e^-2t) = 1/2
    assert!(((1.0 - (-t).exp()) * (1.0 - (-2.0 * t).exp()) - 0.5).abs() < 1e-9);

    let o = ordcheck(&["dist", "--shape", "0.5", "--rate", "1", "--aux", "--t", "1"]);
    let v = json(&o);
    assert!(v["rows"][0]["w"].as_f64().unwrap() < 0.0);
    assert!(v["rows"][0].get("cdf").is_none());

    assert_eq!(ordcheck(&["dist", "--shape", "1", "--rate", "1"]).status.code(), Some(1));
    assert_eq!(ordcheck(&["dist", "--shape", "1", "--rate", "1", "--lambda", "1", "--t", "1"]).status.code(), Some(1));
}

#[test]
fn verify_theorem_command() {
    for id in ["th09", "th15"] {
        let o = ordcheck(&["verify-theorem", "--id", id, "--trials", "100", "--seed", "7"]);
        assert_eq!(o.status.code(), Some(0), "{id}");
        let v = json(&o);
        assert_eq!(v["passes"], 100);
        assert_eq!(v["failures"].as_array().unwrap().len(), 0);
    }
    let o = ordcheck(&["verify-theorem", "--id", "nosuch"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nosuch"));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = ordcheck(&["verify-theorem", "--id", "cor1", "--trials", "20", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["id"], "cor1");
}

#[test]
fn reproduce_figures() {
    let dir = tempfile::tempdir().unwrap();
    for (fig, alpha) in [("1", 2.0), ("2", 0.3), ("3", 1.3)] {
        let path = dir.path().join(format!("fig{fig}.csv"));
        let o = ordcheck(&["reproduce-figure", "--figure", fig, "--out", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let v = json(&o);
        assert_eq!(v["verdict"], "violated");
        assert_eq!(v["alpha"], alpha);
        assert!(v["witness"]["t"].as_f64().unwrap() > 0.0);

        let bytes = std::fs::read(&path).unwrap();
        assert!(!bytes.contains(&b'\r'));
        let text = String::from_utf8(bytes).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,ratio"));
        let rows: Vec<(f64, f64)> = lines
            .map(|l| {
                let (t, r) = l.split_once(',').unwrap();
                // 17 significant digits in exponent form.
                assert_eq!(r.split('e').next().unwrap().trim_start_matches('-').len(), 18);
                (t.parse().unwrap(), r.parse().unwrap())
            })
            .collect();
        assert_eq!(rows.len(), 2048);
        assert!(rows.windows(2).all(|p| p[1].0 > p[0].0));
        let rises = rows.windows(2).any(|p| p[1].1 > p[0].1);
        let falls = rows.windows(2).any(|p| p[1].1 < p[0].1 * (1.0 - 1e-9));
        assert!(rises && falls, "figure {fig} ratio should be non-monotone");
    }
    let o = ordcheck(&["reproduce-figure", "--figure", "4", "--out", "x.csv"]);
    assert_eq!(o.status.code(), Some(1));
    let o = ordcheck(&["reproduce-figure", "--figure", "1", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn scan_and_mc_compare() {
    let o = ordcheck(&["scan", "--alpha-lo", "0", "--alpha-hi", "1", "--n", "2", "--trials", "200", "--seed", "3"]);
    assert_eq!(json(&o)["count"], 0);
    let o = ordcheck(&["scan", "--alpha-lo", "1.5", "--alpha-hi", "3", "--n", "2", "--trials", "50", "--target", "weakmaj"]);
    assert!(json(&o)["count"].as_u64().unwrap() > 0);
    assert_eq!(ordcheck(&["scan", "--target", "other"]).status.code(), Some(1));

    let o = ordcheck(&["mc-compare", "--shape", "0.5", "--lambda", "1,1", "--theta", "0.5,1.5", "--n", "20000", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["dkw"]["pass"], true);
    assert_eq!(v["st"]["agrees"], true);
    assert_eq!(ordcheck(&["mc-compare", "--shape", "1", "--lambda", "1", "--n", "0"]).status.code(), Some(1));
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["verify-theorem", "--id", "th17", "--trials", "40", "--seed", "5"];
    let one = Command::new(env!("CARGO_BIN_EXE_ordcheck")).args(args).env("ORDCHECK_THREADS", "1").output().unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_ordcheck")).args(args).env("ORDCHECK_THREADS", "8").output().unwrap();
    assert_eq!(one.stdout, many.stdout);
}
