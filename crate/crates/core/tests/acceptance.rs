//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Criteria listed in `EXPECTED_RED` are known to be unattainable as
//! stated; they are evaluated at full strength and reported, but do not
//! fail the run. Any other failing criterion exits nonzero.

use std::time::{Duration, Instant};

use current_lab::cli;
use current_lab::report::Report;
use current_lab::search::{period_ratio, solve_ratio};
use current_lab::periods::HyperellipticCurve;
use current_lab::suite;
use num_complex::Complex64;
use serde_json::Value;

/// 3: the commutator defect equals minus the complex cocycle.
/// 4: the literal block sum `L^{Z1} + i L^{Z2}` is not `L^Y`.
/// 7: ratio 1 lies below the attainable range for `(t, r) = (2, 3)`.
const EXPECTED_RED: [u32; 3] = [3, 4, 7];

const SEED: u64 = 0;

struct Outcome {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    budget: Option<Duration>,
}

fn checks(report: &Report, prefixes: &[&str]) -> (bool, Vec<String>) {
    let mut failed = Vec::new();
    let mut seen = 0;
    for c in &report.checks {
        if prefixes.iter().any(|p| c.check.starts_with(p)) {
            seen += 1;
            if !c.pass {
                failed.push(format!("{} = {:e} (tol {:e})", c.check, c.value[0].hypot(c.value[1]), c.tolerance));
            }
        }
    }
    (seen > 0 && failed.is_empty(), failed)
}

fn criterion(id: u32, title: &'static str, budget: Option<f64>, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = f();
    let elapsed = start.elapsed();
    let budget = budget.map(Duration::from_secs_f64);
    let in_time = budget.is_none_or(|b| elapsed <= b);
    Outcome { id, title, pass: pass && in_time, detail, elapsed, budget }
}

fn summary(ok: bool, failed: Vec<String>) -> (bool, String) {
    (ok, if failed.is_empty() { String::new() } else { failed.join("; ") })
}

fn golden() -> Value {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/golden.json")).expect("golden fixture");
    serde_json::from_str(&text).expect("golden json")
}

fn num(v: &Value) -> f64 {
    v.as_str().expect("string number").parse().expect("number")
}

fn main() {
    let mut outcomes = Vec::new();

    outcomes.push(criterion(1, "torus periods and charges", Some(1.0), || {
        let r = suite::periods(&HyperellipticCurve::new(1.0, 2.0, 3.0).unwrap()).unwrap();
        let (ok, f) = checks(&r, &["torus."]);
        summary(ok, f)
    }));

    outcomes.push(criterion(2, "cocycle suite, 50 triples, n = 64", Some(30.0), || {
        let r = suite::verify_cocycles(64, SEED, 50).unwrap();
        let (ok, f) = checks(&r, &["cocycle.", "bracket."]);
        summary(ok, f)
    }));

    let mut fock = None;
    outcomes.push(criterion(3, "Fock commutator defect, 20 pairs, P = 4", Some(120.0), || {
        let r = suite::verify_fock(16, 1, 4, SEED, 20).unwrap();
        let (ok, f) = checks(&r, &["fock.defect.off_scalar", "fock.defect.matches_cocycle_complex", "fock.defect.real_z"]);
        fock = Some(r);
        summary(ok, f)
    }));
    let fock = fock.expect("fock report");

    outcomes.push(criterion(4, "antihermiticity and block identity", None, || {
        let (ok, f) = checks(&fock, &["fock.antihermiticity.rep_lz", "fock.block_identity.literal"]);
        summary(ok, f)
    }));

    outcomes.push(criterion(5, "phi jumps and consistency chain", Some(60.0), || {
        let r = suite::verify_phi(64, SEED, 50).unwrap();
        let (ok, f) = checks(&r, &["phi."]);
        let pinned = r.data["pinned_constant"].clone();
        let (ok, mut detail) = summary(ok, f);
        detail = format!("pinned constant {pinned}{}{detail}", if detail.is_empty() { "" } else { "; " });
        (ok, detail)
    }));

    outcomes.push(criterion(6, "hyperelliptic periods and tau", Some(10.0), || {
        let cv = HyperellipticCurve::new(1.0, 2.0, 3.0).unwrap();
        let r = suite::periods(&cv).unwrap();
        let (mut ok, mut f) = checks(&r, &["alpha.", "tau."]);
        let g = golden();
        for entry in g["curves"].as_array().unwrap() {
            let c = HyperellipticCurve::new(num(&entry["s"]), num(&entry["t"]), num(&entry["r"])).unwrap();
            let pd = current_lab::periods::full_periods(&c).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let z = &entry["tau"][i][j];
                    let expect = Complex64::new(num(&z[0]), num(&z[1]));
                    let d = (pd.tau[(i, j)] - expect).norm();
                    if d > 1e-9 {
                        ok = false;
                        f.push(format!("tau[{i}][{j}] of ({}, {}, {}) off golden by {d:e}", c.s, c.t, c.r));
                    }
                }
            }
        }
        summary(ok, f)
    }));

    outcomes.push(criterion(7, "rational-ratio search 1/1 and round trip", Some(30.0), || {
        let r = suite::search((1, 1), 2.0, 3.0).unwrap();
        let (mut ok, mut f) = checks(&r, &["search."]);
        if let Some(range) = r.data.get("attainable_range") {
            f.push(format!("attainable ratio range {range}"));
        }
        let s0 = 1.3;
        let known = period_ratio(&HyperellipticCurve::new(s0, 2.0, 3.0).unwrap()).unwrap();
        match solve_ratio(known, 2.0, 3.0) {
            Ok(sol) if (sol.s - s0).abs() <= 1e-9 => {}
            Ok(sol) => {
                ok = false;
                f.push(format!("round trip recovered s = {} instead of {s0}", sol.s));
            }
            Err(e) => {
                ok = false;
                f.push(format!("round trip failed: {e}"));
            }
        }
        summary(ok, f)
    }));

    outcomes.push(criterion(8, "deterministic reports", None, || {
        let mut f = Vec::new();
        let runs: [&[&str]; 4] = [
            &["verify-cocycles", "--seed", "5"],
            &["verify-phi", "--seed", "5"],
            &["periods", "--curve", "0.5,1,4"],
            &["search", "--target", "6/5"],
        ];
        for args in runs {
            let once = || {
                let (mut out, mut err) = (Vec::new(), Vec::new());
                cli::run(std::iter::once("current-lab").chain(args.iter().copied()), &mut out, &mut err);
                out
            };
            if once() != once() {
                f.push(format!("{} differs between runs", args.join(" ")));
            }
        }
        (f.is_empty(), f.join("; "))
    }));

    let mut unexpected = 0;
    for o in &outcomes {
        let red_ok = EXPECTED_RED.contains(&o.id);
        let time = match o.budget {
            Some(b) => format!("{:.2} s / {:.0} s", o.elapsed.as_secs_f64(), b.as_secs_f64()),
            None => format!("{:.2} s", o.elapsed.as_secs_f64()),
        };
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let note = if !o.pass && red_ok { " [expected]" } else { "" };
        let detail = if o.detail.is_empty() { String::new() } else { format!(": {}", o.detail) };
        println!("{tag} {} {} ({time}){note}{detail}", o.id, o.title);
        if !o.pass && !red_ok {
            unexpected += 1;
        }
        if o.pass && red_ok {
            println!("     criterion {} passed although listed as expected red", o.id);
        }
    }
    if unexpected > 0 {
        eprintln!("{unexpected} acceptance criteria failed");
        std::process::exit(1);
    }
}
