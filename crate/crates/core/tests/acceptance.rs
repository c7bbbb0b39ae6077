//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the libtest
//! harness so the lines always reach the terminal.

mod common;

use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_traits::Zero;
use staircase::cantor::CantorScheme;
use staircase::cli::spec_file::presets;
use staircase::foundation::{frac, int, inv_pow3, pow2};
use staircase::nullsets::{ClosedNullSet, Generator};
use staircase::partition::{check_eq1, locate_cell, Cell};
use staircase::verify::{
    check_derivative, check_growth_bound_at, check_monotone, check_singular, points_of_m, sample_pairs,
    sample_unit_rationals, Report, Verdict,
};
use staircase::{Interval, Rational, SingularFunction};

use common::{sf, sf_with, small_rationals, CantorOracle, OracleAnswer};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn failures(r: &Report) -> Vec<String> {
    r.cases
        .iter()
        .filter(|c| c.verdict == Verdict::Fail)
        .map(|c| format!("{} observed={} bound={} {}", c.input, c.observed, c.bound, c.note.as_deref().unwrap_or("")))
        .collect()
}

fn endpoints() -> Outcome {
    let eps = pow2(-40);
    let start = Instant::now();
    for p in presets() {
        let sf = SingularFunction::new(p.spec.to_chain().map_err(|e| e.to_string())?);
        for x in [int(0), int(1)] {
            let e = sf.f_eval(&x, &eps).map_err(|e| format!("{}: {e}", p.name))?;
            ensure(e.contains(&x) && e.width() <= eps, || format!("{}: f({x}) enclosure {e}", p.name))?;
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("4 presets x {{0, 1}} at 2^-40 in {took:.2?}"))
}

/// Growth bound on two presets; returns the cells met on the way for the
/// cell-inequality criterion.
fn growth(cells: &Mutex<Vec<(Rational, Rational, Cell)>>) -> Outcome {
    let eps = pow2(-30);
    let start = Instant::now();
    let mut cases = 0;
    for name in ["midpoint", "cantor-chain"] {
        let sf = sf(name);
        for n in 1..=8u32 {
            let points = sample_unit_rationals(1000 + u64::from(n), 1000);
            let level = sf.chain().level(n);
            let r = check_growth_bound_at(level.clone(), &points, &eps, |x, e| {
                let (v, cell) = sf.g_eval_traced(n, x, e)?;
                if let Some(c) = &cell {
                    cells.lock().unwrap().push((c.gap_lo.clone(), c.gap_hi.clone(), c.clone()));
                }
                Ok((v, cell))
            })
            .map_err(|e| e.to_string())?;
            let bad = failures(&r);
            ensure(bad.is_empty() && r.cases.len() == 1000, || {
                format!("{name} level {n}: {} failures, first: {}", bad.len(), bad.first().cloned().unwrap_or_default())
            })?;
            cases += r.cases.len();
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(120), || format!("took {took:?}"))?;
    Ok(format!("{cases} cases, 0 failures, eps 2^-30, in {took:.2?}"))
}

fn cell_inequality(cells: &[(Rational, Rational, Cell)]) -> Outcome {
    ensure(!cells.is_empty(), || "no cells were produced".into())?;
    for (a, b, cell) in cells {
        ensure(check_eq1(a, b, std::slice::from_ref(cell)), || format!("cell {cell} in ({a}, {b})"))?;
    }
    Ok(format!("{} cells, all strict", cells.len()))
}

fn derivative() -> Outcome {
    let eps = pow2(-40);
    let exponents: Vec<u32> = (8..=20).collect();
    let start = Instant::now();
    let mut admitted = 0;
    let mut points = 0;
    for (name, pts) in [
        ("midpoint", vec![int(0), frac(1, 2), int(1)]),
        ("rationals-dense", points_of_m(sf("rationals-dense").chain(), 6, 20, 0)),
    ] {
        let sf = sf(name);
        ensure(name != "rationals-dense" || pts.len() == 20, || format!("sampled {} points", pts.len()))?;
        let mut here = 0;
        for a in &pts {
            let r = check_derivative(&sf, a, &exponents, &eps).map_err(|e| format!("{name} a={a}: {e}"))?;
            let bad = failures(&r);
            ensure(bad.is_empty(), || format!("{name}: {}", bad.join("; ")))?;
            here += r.summary.passed;
        }
        ensure(here > 0, || format!("{name}: no admissible step"))?;
        admitted += here;
        points += pts.len();
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(300), || format!("took {took:?}"))?;
    Ok(format!("{points} points, {admitted} admissible steps, all within |h| + 2eps/|h|, in {took:.2?}"))
}

fn singular() -> Outcome {
    let r = check_singular(&sf("midpoint"), 200, 0, 24, &frac(1, 20), &frac(9, 10)).map_err(|e| e.to_string())?;
    let fraction = &r.params["fraction"];
    ensure(r.passed(), || format!("fraction {fraction} below quota 9/10"))?;
    Ok(format!("heuristic: {}/200 points with min |DQ| < 1/20 (quota 9/10)", r.summary.passed))
}

fn monotone() -> Outcome {
    let dense = check_monotone(&sf_with("midpoint", true), &sample_pairs(6, 500), 60).map_err(|e| e.to_string())?;
    ensure(dense.summary.passed == 500, || {
        format!("densified midpoint: {} strict of 500 ({} failed)", dense.summary.passed, dense.summary.failed)
    })?;
    let mut others = 0;
    for name in ["endpoints", "midpoint", "cantor-chain", "rationals-dense"] {
        let r = check_monotone(&sf(name), &sample_pairs(60, 100), 60).map_err(|e| e.to_string())?;
        ensure(r.summary.failed == 0, || format!("{name}: {}", failures(&r).join("; ")))?;
        others += r.cases.len();
    }
    Ok(format!("500/500 strict on densified midpoint; {others} pairs on plain presets with no failure"))
}

fn oracles() -> Outcome {
    let oracle = CantorOracle::new();
    let tiny = inv_pow3(common::DEPTH);
    let copies = [(int(0), int(1)), (frac(1, 2), frac(11, 18)), (frac(1, 4), frac(1, 4) + frac(1, 27))];
    let mut exact = 0;
    let mut inside = 0;
    for (i, (a, b)) in copies.iter().enumerate() {
        let set = ClosedNullSet::from_generators([Generator::AffineCantor { a: a.clone(), b: b.clone() }])
            .map_err(|e| e.to_string())?;
        for x in small_rationals(70 + i as u64, 100, 10_000) {
            let member = set.contains(&x).map_err(|e| e.to_string())?;
            let dist = set.dist_to(&x).map_err(|e| e.to_string())?;
            match oracle.query(a, b, &x) {
                OracleAnswer::Outside(d) => {
                    ensure(!member && dist == d, || format!("copy {i} x={x}: got ({member}, {dist}), want {d}"))?;
                    exact += 1;
                }
                OracleAnswer::Inside => {
                    ensure(dist <= (b - a) * &tiny && member == dist.is_zero(), || {
                        format!("copy {i} x={x}: inside the depth-20 cover but dist {dist}")
                    })?;
                    inside += 1;
                }
            }
        }
        // Ternary expansions using only 0 and 2: 0.0202…, 0.2020…, 0.0022…, 0.002002…
        for c in [int(0), int(1), frac(1, 4), frac(3, 4), frac(1, 10), frac(1, 13), frac(2, 3)] {
            let x = a + (b - a) * c;
            let ok = oracle.query(a, b, &x) == OracleAnswer::Inside
                && set.contains(&x).map_err(|e| e.to_string())?
                && set.dist_to(&x).map_err(|e| e.to_string())?.is_zero();
            ensure(ok, || format!("copy {i}: member {x} not recognised"))?;
            inside += 1;
        }
    }

    let sf = sf("endpoints");
    let eps_f = pow2(-30);
    let eps_g = pow2(-40);
    for x in sample_unit_rationals(77, 100) {
        let f = sf.f_eval(&x, &eps_f).map_err(|e| e.to_string())?;
        let g = direct_g1(&sf, &x, &eps_g)?;
        ensure(f.lo() <= g.hi() && g.lo() <= f.hi(), || format!("x={x}: f {f} vs g1 {g}"))?;
    }
    Ok(format!("(a) {exact} exact + {inside} within 3^-20 of the cover; (b) 100/100 f = g1 within widths"))
}

/// `g₁` straight from its partition cell and staircase.
fn direct_g1(sf: &SingularFunction, x: &Rational, eps: &Rational) -> Result<Interval, String> {
    if x.is_zero() || *x == int(1) {
        return Ok(Interval::point(x.clone()));
    }
    let cell = locate_cell(&int(0), &int(1), x).map_err(|e| e.to_string())?;
    if *x == cell.p_lo {
        return Ok(Interval::point(x.clone()));
    }
    let scheme = CantorScheme::new(sf.chain(), 1, cell).map_err(|e| e.to_string())?;
    scheme.phi_eval(x, eps).map_err(|e| e.to_string())
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_staircase"))
            .args(["verify", "--spec", "midpoint", "--suite", "all", "--seed", "7"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (first, second) = (run()?, run()?);
    ensure(!first.stdout.is_empty(), || "empty report".into())?;
    ensure(first.stdout == second.stdout, || "reports differ".into())?;
    Ok(format!("two runs, {} identical bytes", first.stdout.len()))
}

fn main() {
    let cells = Mutex::new(Vec::new());
    let results: Vec<(&str, Outcome)> = vec![
        ("1 endpoint exactness", endpoints()),
        ("2 growth bound", growth(&cells)),
        ("3 cell inequality", cell_inequality(&cells.lock().unwrap())),
        ("4 derivative sandwich", derivative()),
        ("5 singularity", singular()),
        ("6 strict monotonicity", monotone()),
        ("7 oracle equivalences", oracles()),
        ("8 determinism", determinism()),
    ];
    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
