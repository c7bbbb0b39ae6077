//! Checks that turn properties of `f` and `gₙ` into reproducible reports.
//!
//! Certified checks compare exact rational enclosures against exact bounds.
//! The singularity check is statistical and says so in its report.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::foundation::{self, frac, int, pow2, render, Enclosure, Interval, Rational};
use crate::nullsets::{ClosedNullSet, Generator, LevelChain};
use crate::partition::{locate_cell, Cell};
use crate::SingularFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Case {
    pub index: usize,
    pub input: String,
    pub bound: String,
    pub observed: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Case {
    fn new(input: String, bound: String, observed: String, verdict: Verdict) -> Self {
        Case { index: 0, input, bound, observed, verdict, note: None }
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    fn error(input: String, err: &Error) -> Self {
        Case::new(input, String::new(), String::new(), Verdict::Fail).note(err.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub verdict: Verdict,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub unresolved: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub check: String,
    pub heuristic: bool,
    pub params: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub cases: Vec<Case>,
    pub summary: Summary,
}

impl Report {
    fn build(check: &str, params: BTreeMap<String, String>, seed: Option<u64>, mut cases: Vec<Case>) -> Self {
        for (i, c) in cases.iter_mut().enumerate() {
            c.index = i;
        }
        let count = |v: Verdict| cases.iter().filter(|c| c.verdict == v).count();
        let failed = count(Verdict::Fail);
        let summary = Summary {
            verdict: if failed == 0 { Verdict::Pass } else { Verdict::Fail },
            total: cases.len(),
            passed: count(Verdict::Pass),
            failed,
            skipped: count(Verdict::Skipped),
            unresolved: count(Verdict::Unresolved),
        };
        Report { check: check.to_string(), heuristic: false, params, seed, cases, summary }
    }

    pub fn passed(&self) -> bool {
        self.summary.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn params<const N: usize>(pairs: [(&str, String); N]) -> BTreeMap<String, String> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// `count` rationals `k/2^64` with `k` drawn from ChaCha8 seeded by `seed`.
pub fn sample_unit_rationals(seed: u64, count: usize) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let denom = pow2(64);
    (0..count)
        .map(|_| Rational::from_integer(rng.next_u64().into()) / &denom)
        .collect()
}

/// `count` pairs `x₁ < x₂` of seeded grid rationals.
pub fn sample_pairs(seed: u64, count: usize) -> Vec<(Rational, Rational)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let denom = pow2(64);
    let mut draw = || Rational::from_integer(rng.next_u64().into()) / &denom;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (x, y) = (draw(), draw());
        match x.cmp(&y) {
            std::cmp::Ordering::Less => out.push((x, y)),
            std::cmp::Ordering::Greater => out.push((y, x)),
            std::cmp::Ordering::Equal => {}
        }
    }
    out
}

/// Growth bound `|gₙ(x) − x| <= dist(x, Fₙ)² + eps` at seeded points; every
/// partition cell met along the way must satisfy the cell inequality.
pub fn check_growth_bound(sf: &SingularFunction, n: u32, count: usize, seed: u64, eps: &Rational) -> Result<Report> {
    let points = sample_unit_rationals(seed, count);
    let mut report = check_growth_bound_at(sf.chain().level(n), &points, eps, |x, e| sf.g_eval_traced(n, x, e))?;
    report.params.insert("level".into(), n.to_string());
    report.params.insert("count".into(), count.to_string());
    report.seed = Some(seed);
    Ok(report)
}

/// Growth bound for an arbitrary evaluator, at explicit points.
pub fn check_growth_bound_at<E>(level: ClosedNullSet, points: &[Rational], eps: &Rational, eval: E) -> Result<Report>
where
    E: Fn(&Rational, &Rational) -> Result<(Enclosure, Option<Cell>)> + Sync,
{
    let cases = points
        .par_iter()
        .map(|x| {
            let input = render(x);
            let dist = match level.dist_to(x) {
                Ok(d) => d,
                Err(e) => return Case::error(input, &e),
            };
            let (value, cell) = match eval(x, eps) {
                Ok(v) => v,
                Err(e) => return Case::error(input, &e),
            };
            let bound = &dist * &dist + eps;
            let observed = value.max_abs_deviation(x);
            let eq1 = cell.as_ref().is_none_or(Cell::satisfies_eq1);
            let verdict = if observed <= bound && eq1 { Verdict::Pass } else { Verdict::Fail };
            let note = match &cell {
                Some(c) => format!("cell={c} eq1={eq1}"),
                None => "x in F".to_string(),
            };
            Case::new(input, render(&bound), render(&observed), verdict).note(note)
        })
        .collect();
    Ok(Report::build("growth", params([("eps", render(eps))]), None, cases))
}

/// Difference-quotient sandwich at a point of `M`:
/// `|DQ − 2^(1−n)| <= |h| + 2·eps/|h|` for `h = ±2^-m`, `|h| < ρ(a)`.
pub fn check_derivative(sf: &SingularFunction, a: &Rational, exponents: &[u32], eps: &Rational) -> Result<Report> {
    let n = sf.level_of(a)?;
    let claimed = sf.claimed_derivative(a)?;
    let rho = sf.constancy_radius(a)?;
    let fa = sf.f_eval(a, eps)?;
    let steps: Vec<Rational> = exponents
        .iter()
        .flat_map(|&m| {
            let h = pow2(-i64::from(m));
            [h.clone(), -h]
        })
        .collect();
    let cases = steps
        .par_iter()
        .map(|h| {
            let x = a + h;
            let input = format!("a={} h={}", render(a), render(h));
            if !foundation::is_unit(&x) {
                return Case::new(input, String::new(), String::new(), Verdict::Skipped)
                    .note("a+h outside [0, 1]");
            }
            let abs_h = h.abs();
            if abs_h >= rho {
                return Case::new(input, String::new(), String::new(), Verdict::Skipped)
                    .note("filtered: |h| >= constancy radius");
            }
            let fx = match sf.f_eval(&x, eps) {
                Ok(v) => v,
                Err(e) => return Case::error(input, &e),
            };
            let dq = quotient(&fa, &fx, h);
            let bound = &abs_h + eps * int(2) / &abs_h;
            let observed = dq.max_abs_deviation(&claimed);
            let verdict = if observed <= bound { Verdict::Pass } else { Verdict::Fail };
            let margin = &bound - &observed;
            Case::new(input, render(&bound), render(&observed), verdict)
                .note(format!("dq={dq} margin={}", render(&margin)))
        })
        .collect();
    Ok(Report::build(
        "derivative",
        params([
            ("a", render(a)),
            ("level", n.to_string()),
            ("claimed", render(&claimed)),
            ("rho", render(&rho)),
            ("eps", render(eps)),
        ]),
        None,
        cases,
    ))
}

/// Enclosure of `(f(a+h) − f(a))/h` from enclosures of both values.
fn quotient(fa: &Enclosure, fx: &Enclosure, h: &Rational) -> Enclosure {
    let lo = (fx.lo() - fa.hi()) / h;
    let hi = (fx.hi() - fa.lo()) / h;
    if h.is_positive() {
        Interval::new(lo, hi).expect("ordered quotient")
    } else {
        Interval::new(hi, lo).expect("ordered quotient")
    }
}

/// Heuristic a.e.-zero-derivative check. A point counts when some
/// `h = 2^-10 … 2^-h_exp` gives a difference quotient with certified
/// `|DQ| < threshold`; the report passes if the fraction of such points
/// reaches `quota`.
pub fn check_singular(
    sf: &SingularFunction,
    count: usize,
    seed: u64,
    h_exp: u32,
    threshold: &Rational,
    quota: &Rational,
) -> Result<Report> {
    if count == 0 {
        return Err(Error::Precondition("count must be positive".into()));
    }
    if h_exp < 10 {
        return Err(Error::Precondition("h_exp must be at least 10".into()));
    }
    let eps = pow2(-i64::from(h_exp) - 24);
    let points = sample_unit_rationals(seed, count);
    let cases: Vec<Case> = points
        .par_iter()
        .map(|x| {
            let input = render(x);
            let fx = match sf.f_eval(x, &eps) {
                Ok(v) => v,
                Err(e) => return Case::error(input, &e),
            };
            let mut best: Option<Rational> = None;
            for m in 10..=h_exp {
                let step = pow2(-i64::from(m));
                let h = if x + &step <= Rational::one() { step } else { -step };
                let fy = match sf.f_eval(&(x + &h), &eps) {
                    Ok(v) => v,
                    Err(e) => return Case::error(input, &e),
                };
                let dq = quotient(&fx, &fy, &h).max_abs_deviation(&Rational::zero());
                if best.as_ref().is_none_or(|b| dq < *b) {
                    best = Some(dq);
                }
            }
            let best = best.expect("at least one step");
            let verdict = if best < *threshold { Verdict::Pass } else { Verdict::Unresolved };
            Case::new(input, render(threshold), render(&best), verdict)
        })
        .collect();
    let mut report = Report::build(
        "singular",
        params([
            ("count", count.to_string()),
            ("h_exp", h_exp.to_string()),
            ("threshold", render(threshold)),
            ("quota", render(quota)),
            ("eps", render(&eps)),
        ]),
        Some(seed),
        cases,
    );
    report.heuristic = true;
    let hits = frac(report.summary.passed as i64, count as i64);
    report.params.insert("fraction".into(), render(&hits));
    report.summary.verdict = if hits >= *quota { Verdict::Pass } else { Verdict::Fail };
    Ok(report)
}

/// Strict increase on pairs `x₁ < x₂`: refine until `lower f(x₂) > upper f(x₁)`.
/// Running out of bits gives `unresolved`; only a certified decrease fails.
pub fn check_monotone(sf: &SingularFunction, pairs: &[(Rational, Rational)], max_bits: u32) -> Result<Report> {
    if let Some((x1, x2)) = pairs.iter().find(|(x1, x2)| x1 >= x2) {
        return Err(Error::Precondition(format!(
            "pair ({}, {}) is not strictly ordered",
            render(x1),
            render(x2)
        )));
    }
    let mut schedule: Vec<u32> = (8..max_bits).step_by(8).collect();
    schedule.push(max_bits.max(1));
    let cases = pairs
        .par_iter()
        .map(|(x1, x2)| {
            let input = format!("{} < {}", render(x1), render(x2));
            let mut last_gap = None;
            for &bits in &schedule {
                let eps = pow2(-i64::from(bits));
                let (f1, f2) = match (sf.f_eval(x1, &eps), sf.f_eval(x2, &eps)) {
                    (Ok(a), Ok(b)) => (a, b),
                    (Err(e), _) | (_, Err(e)) => return Case::error(input, &e),
                };
                let gap = f2.lo() - f1.hi();
                if gap.is_positive() {
                    return Case::new(input, format!("eps=2^-{bits}"), render(&gap), Verdict::Pass)
                        .note("strict");
                }
                if f2.hi() < f1.lo() {
                    return Case::new(input, format!("eps=2^-{bits}"), render(&gap), Verdict::Fail)
                        .note("certified decrease");
                }
                last_gap = Some(gap);
            }
            let gap = last_gap.expect("nonempty schedule");
            Case::new(input, format!("eps=2^-{max_bits}"), render(&gap), Verdict::Unresolved)
                .note("nondecreasing-consistent, strictness unresolved")
        })
        .collect();
    Ok(Report::build(
        "monotone",
        params([("pairs", pairs.len().to_string()), ("max_bits", max_bits.to_string())]),
        None,
        cases,
    ))
}

/// Cell inequality and exact abutment of neighbouring cells at seeded points
/// of each level's gaps.
pub fn check_partition(sf: &SingularFunction, levels: &[u32], count: usize, seed: u64) -> Result<Report> {
    let points = sample_unit_rationals(seed, count);
    let jobs: Vec<(u32, &Rational)> = levels.iter().flat_map(|&n| points.iter().map(move |x| (n, x))).collect();
    let cases = jobs
        .par_iter()
        .map(|&(n, x)| {
            let input = format!("n={n} x={}", render(x));
            let level = sf.chain().level(n);
            let (a, b) = match level.gap_component(x) {
                Ok(g) => g,
                Err(Error::InSet(_)) => {
                    return Case::new(input, String::new(), String::new(), Verdict::Skipped).note("x in F")
                }
                Err(e) => return Case::error(input, &e),
            };
            let cell = match locate_cell(&a, &b, x) {
                Ok(c) => c,
                Err(e) => return Case::error(input, &e),
            };
            let prev = cell.prev();
            let next = cell.next();
            let abut = prev.p_hi == cell.p_lo && next.p_lo == cell.p_hi;
            let relocates = locate_cell(&a, &b, &cell.p_hi).is_ok_and(|c| c == next);
            let eq1 = [&prev, &cell, &next].iter().all(|c| c.satisfies_eq1());
            let width = cell.width();
            let left = &cell.p_lo - &a;
            let right = &b - &cell.p_hi;
            let bound = foundation::min(&(&left * &left), &(&right * &right));
            let ok = abut && relocates && eq1;
            Case::new(input, render(&bound), render(&width), if ok { Verdict::Pass } else { Verdict::Fail })
                .note(format!("gap=({}, {}) cell={cell} eq1={eq1} abut={abut}", render(&a), render(&b)))
        })
        .collect();
    let listed: Vec<String> = levels.iter().map(u32::to_string).collect();
    Ok(Report::build(
        "partition",
        params([("levels", listed.join(",")), ("count", count.to_string())]),
        Some(seed),
        cases,
    ))
}

/// Points of `M` with level at most `max_level`, at most `count` of them,
/// chosen by a seeded shuffle and returned sorted.
pub fn points_of_m(chain: &LevelChain, max_level: u32, count: usize, seed: u64) -> Vec<Rational> {
    let mut pts = BTreeSet::new();
    let set = chain.level(max_level);
    for g in set.generators() {
        match g {
            Generator::Point(q) => {
                pts.insert(q);
            }
            Generator::AffineCantor { a, b } => {
                pts.insert(a);
                pts.insert(b);
            }
            Generator::DyadicGrid { bits } => {
                let scale: i64 = 1 << bits.min(20);
                pts.extend((0..=scale).map(|k| frac(k, scale)));
            }
            Generator::Rationals { max_denominator } => {
                let q_max = max_denominator.min(1 << 12) as i64;
                for q in 1..=q_max {
                    pts.extend((0..=q).map(|p| frac(p, q)));
                }
            }
        }
    }
    let mut pts: Vec<Rational> = pts.into_iter().collect();
    if pts.len() > count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        pts.shuffle(&mut rng);
        pts.truncate(count);
        pts.sort();
    }
    pts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Growth,
    Derivative,
    Singular,
    Monotone,
    Partition,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Suite> {
        Some(match s {
            "growth" => Suite::Growth,
            "derivative" => Suite::Derivative,
            "singular" => Suite::Singular,
            "monotone" => Suite::Monotone,
            "partition" => Suite::Partition,
            "all" => Suite::All,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Growth => "growth",
            Suite::Derivative => "derivative",
            Suite::Singular => "singular",
            Suite::Monotone => "monotone",
            Suite::Partition => "partition",
            Suite::All => "all",
        }
    }
}

/// Defaults for `verify`. The singular threshold and quota were calibrated
/// once on the `midpoint` preset (seed 0: 200/200 points below threshold)
/// and frozen.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub count: Option<usize>,
    pub max_growth_level: u32,
    pub growth_eps_bits: u32,
    pub derivative_max_level: u32,
    pub derivative_points: usize,
    pub derivative_exponents: Vec<u32>,
    pub derivative_eps_bits: u32,
    pub singular_count: usize,
    pub singular_h_exp: u32,
    pub singular_threshold: Rational,
    pub singular_quota: Rational,
    pub monotone_pairs: usize,
    pub monotone_max_bits: u32,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            count: None,
            max_growth_level: 8,
            growth_eps_bits: 30,
            derivative_max_level: 6,
            derivative_points: 20,
            derivative_exponents: (8..=20).collect(),
            derivative_eps_bits: 40,
            singular_count: 200,
            singular_h_exp: 24,
            singular_threshold: frac(1, 20),
            singular_quota: frac(9, 10),
            monotone_pairs: 100,
            monotone_max_bits: 60,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub pass: bool,
    pub reports: Vec<Report>,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn run_suite(sf: &SingularFunction, suite: Suite, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut reports = Vec::new();
    let wants = |s: Suite| suite == s || suite == Suite::All;
    let count = |default: usize| cfg.count.unwrap_or(default);
    let top = sf.chain().stable_from().unwrap_or(cfg.max_growth_level).min(cfg.max_growth_level);
    let levels: Vec<u32> = (1..=top).collect();
    if wants(Suite::Growth) {
        let eps = pow2(-i64::from(cfg.growth_eps_bits));
        for &n in &levels {
            reports.push(check_growth_bound(sf, n, count(200), cfg.seed.wrapping_add(u64::from(n)), &eps)?);
        }
    }
    if wants(Suite::Partition) {
        reports.push(check_partition(sf, &levels, count(200), cfg.seed)?);
    }
    if wants(Suite::Derivative) {
        let eps = pow2(-i64::from(cfg.derivative_eps_bits));
        let pts = points_of_m(sf.chain(), cfg.derivative_max_level, count(cfg.derivative_points), cfg.seed);
        for a in &pts {
            let mut r = check_derivative(sf, a, &cfg.derivative_exponents, &eps)?;
            r.seed = Some(cfg.seed);
            reports.push(r);
        }
    }
    if wants(Suite::Singular) {
        reports.push(check_singular(
            sf,
            count(cfg.singular_count),
            cfg.seed,
            cfg.singular_h_exp,
            &cfg.singular_threshold,
            &cfg.singular_quota,
        )?);
    }
    if wants(Suite::Monotone) {
        let pairs = sample_pairs(cfg.seed, count(cfg.monotone_pairs));
        let mut r = check_monotone(sf, &pairs, cfg.monotone_max_bits)?;
        r.seed = Some(cfg.seed);
        reports.push(r);
    }
    let pass = reports.iter().all(Report::passed);
    Ok(SuiteReport { suite: suite.name().into(), seed: cfg.seed, pass, reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nullsets::{point, Stream};

    fn midpoint() -> SingularFunction {
        SingularFunction::new(
            LevelChain::finite(vec![vec![point(0, 1), point(1, 1)], vec![point(1, 2)]]).unwrap(),
        )
    }

    #[test]
    fn samples_are_reproducible() {
        assert_eq!(sample_unit_rationals(3, 10), sample_unit_rationals(3, 10));
        assert_ne!(sample_unit_rationals(3, 10), sample_unit_rationals(4, 10));
        assert!(sample_unit_rationals(1, 100).iter().all(foundation::is_unit));
        assert!(sample_pairs(9, 50).iter().all(|(a, b)| a < b));
    }

    #[test]
    fn growth_examples() {
        let sf = midpoint();
        let eps = pow2(-20);
        let level = sf.chain().level(2);
        let r = check_growth_bound_at(level.clone(), &[frac(3, 8), frac(1, 2), int(0)], &eps, |x, e| {
            sf.g_eval_traced(2, x, e)
        })
        .unwrap();
        assert!(r.passed());
        assert_eq!(r.cases[0].bound, render(&(frac(1, 64) + &eps)));
        assert_eq!(r.cases[1].observed, "0");

        let liar = check_growth_bound_at(level, &[frac(3, 8)], &eps, |x, _| {
            Ok((Interval::point(x + frac(1, 4)), None))
        })
        .unwrap();
        assert!(!liar.passed());
        assert_eq!(liar.summary.failed, 1);
    }

    #[test]
    fn derivative_examples() {
        let sf = midpoint();
        let eps = pow2(-40);
        let r = check_derivative(&sf, &frac(1, 2), &[4, 12], &eps).unwrap();
        assert_eq!(r.params["rho"], "3/160");
        // 2^-4 = 1/16 exceeds 3/160, so both signs are filtered
        assert_eq!(r.cases[0].verdict, Verdict::Skipped);
        assert_eq!(r.cases[1].verdict, Verdict::Skipped);
        assert_eq!(r.cases[2].verdict, Verdict::Pass);
        assert_eq!(r.cases[3].verdict, Verdict::Pass);
        assert!(r.passed());

        let r = check_derivative(&sf, &int(0), &[10], &eps).unwrap();
        assert_eq!(r.params["claimed"], "1");
        assert_eq!(r.cases[0].verdict, Verdict::Pass);
        assert_eq!(r.cases[1].verdict, Verdict::Skipped);

        assert!(matches!(check_derivative(&sf, &frac(1, 3), &[10], &eps), Err(Error::NotInM { .. })));
    }

    #[test]
    fn singular_preconditions_and_vacuous_threshold() {
        let sf = midpoint();
        assert!(check_singular(&sf, 0, 1, 24, &frac(1, 20), &frac(9, 10)).is_err());
        let r = check_singular(&sf, 5, 1, 12, &int(2), &int(1)).unwrap();
        assert!(r.heuristic);
        assert!(r.passed());
        assert_eq!(r.summary.passed, 5);
    }

    #[test]
    fn monotone_examples() {
        let sf = midpoint();
        let r = check_monotone(&sf, &[(int(0), int(1))], 60).unwrap();
        assert_eq!(r.cases[0].verdict, Verdict::Pass);
        assert!(check_monotone(&sf, &[(frac(1, 4), frac(1, 4))], 60).is_err());
    }

    #[test]
    fn partition_report_passes() {
        let sf = midpoint();
        let r = check_partition(&sf, &[1, 2], 25, 11).unwrap();
        assert!(r.passed());
        assert_eq!(r.summary.total, 50);
    }

    #[test]
    fn points_of_m_is_deterministic() {
        let chain = LevelChain::new(vec![], Some(Stream::Rationals), false, Default::default()).unwrap();
        let a = points_of_m(&chain, 6, 20, 7);
        assert_eq!(a.len(), 20);
        assert_eq!(a, points_of_m(&chain, 6, 20, 7));
        assert!(a.iter().all(|q| chain.level_of(q).unwrap() <= 6));
        let all = points_of_m(&chain, 6, 1000, 7);
        assert_eq!(all.len(), 43);
    }
}
