//! Closed Lebesgue-null subsets of `[0, 1]` and nested level chains.
//!
//! A [`ClosedNullSet`] is a finite union of generators: isolated points,
//! affine copies of the ternary Cantor set, and two compact descriptions of
//! finite point families (a dyadic grid and a Farey sequence). Every query
//! (membership, distance, nearest points on either side) is decided exactly.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::foundation::{self, frac, int, is_unit, pow2, render, require_unit, Interval, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Generator {
    Point(Rational),
    /// Image of the ternary Cantor set under `t ↦ a + (b − a)t`.
    AffineCantor { a: Rational, b: Rational },
    /// All dyadic points `k·2^-bits` in `[0, 1]`.
    DyadicGrid { bits: u32 },
    /// All rationals in `[0, 1]` with reduced denominator at most `max_denominator`.
    Rationals { max_denominator: u64 },
}

impl Generator {
    fn validate(&self) -> Result<()> {
        match self {
            Generator::Point(q) => require_unit(q),
            Generator::AffineCantor { a, b } => {
                if !(is_unit(a) && is_unit(b) && a < b) {
                    return Err(Error::Precondition(format!(
                        "affine Cantor copy needs 0 <= a < b <= 1, got a={}, b={}",
                        render(a),
                        render(b)
                    )));
                }
                Ok(())
            }
            Generator::DyadicGrid { .. } => Ok(()),
            Generator::Rationals { max_denominator } => {
                if *max_denominator == 0 {
                    return Err(Error::Precondition("max_denominator must be positive".into()));
                }
                Ok(())
            }
        }
    }
}

/// Finite union of [`Generator`]s; closed and of measure zero.
#[derive(Debug, Clone, Default)]
pub struct ClosedNullSet {
    points: Arc<BTreeSet<Rational>>,
    cantors: Arc<Vec<(Rational, Rational)>>,
    grid_bits: Option<u32>,
    max_denominator: Option<u64>,
}

impl ClosedNullSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_generators<I: IntoIterator<Item = Generator>>(gens: I) -> Result<Self> {
        let mut set = Self::empty();
        set.extend(gens)?;
        Ok(set)
    }

    pub fn points<I: IntoIterator<Item = Rational>>(pts: I) -> Result<Self> {
        Self::from_generators(pts.into_iter().map(Generator::Point))
    }

    pub fn extend<I: IntoIterator<Item = Generator>>(&mut self, gens: I) -> Result<()> {
        for g in gens {
            g.validate()?;
            match g {
                Generator::Point(q) => {
                    Arc::make_mut(&mut self.points).insert(q);
                }
                Generator::AffineCantor { a, b } => {
                    let cantors = Arc::make_mut(&mut self.cantors);
                    if !cantors.iter().any(|(x, y)| *x == a && *y == b) {
                        cantors.push((a, b));
                    }
                }
                Generator::DyadicGrid { bits } => {
                    self.grid_bits = Some(self.grid_bits.map_or(bits, |b| b.max(bits)));
                }
                Generator::Rationals { max_denominator } => {
                    self.max_denominator =
                        Some(self.max_denominator.map_or(max_denominator, |m| m.max(max_denominator)));
                }
            }
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
            && self.cantors.is_empty()
            && self.grid_bits.is_none()
            && self.max_denominator.is_none()
    }

    pub fn generators(&self) -> Vec<Generator> {
        let mut out: Vec<Generator> = self.points.iter().cloned().map(Generator::Point).collect();
        out.extend(
            self.cantors
                .iter()
                .map(|(a, b)| Generator::AffineCantor { a: a.clone(), b: b.clone() }),
        );
        out.extend(self.grid_bits.map(|bits| Generator::DyadicGrid { bits }));
        out.extend(self.max_denominator.map(|max_denominator| Generator::Rationals { max_denominator }));
        out
    }

    /// Membership, decided exactly.
    pub fn contains(&self, x: &Rational) -> Result<bool> {
        require_unit(x)?;
        Ok(self.contains_unchecked(x))
    }

    fn contains_unchecked(&self, x: &Rational) -> bool {
        if self.points.contains(x) {
            return true;
        }
        if let Some(bits) = self.grid_bits {
            if x.denom().bits() <= u64::from(bits) + 1 && (x.denom() & (x.denom() - 1u32)).is_zero() {
                return true;
            }
        }
        if let Some(q) = self.max_denominator {
            if *x.denom() <= BigInt::from(q) {
                return true;
            }
        }
        self.cantors.iter().any(|(a, b)| {
            if x < a || x > b {
                return false;
            }
            let t = (x - a) / (b - a);
            let (lo, _) = ternary_neighbors(&t);
            lo == t
        })
    }

    /// Largest set point `<= x`.
    pub fn floor_point(&self, x: &Rational) -> Option<Rational> {
        let mut best: Option<Rational> = self.points.range(..=x.clone()).next_back().cloned();
        let mut take = |c: Option<Rational>| {
            if let Some(c) = c {
                if best.as_ref().is_none_or(|b| c > *b) {
                    best = Some(c);
                }
            }
        };
        for (a, b) in self.cantors.iter() {
            take(cantor_floor_ceil(a, b, x).0);
        }
        if let Some(bits) = self.grid_bits {
            take(grid_floor_ceil(bits, x).0);
        }
        if let Some(q) = self.max_denominator {
            take(farey_floor_ceil(q, x).0);
        }
        best
    }

    /// Smallest set point `>= x`.
    pub fn ceil_point(&self, x: &Rational) -> Option<Rational> {
        let mut best: Option<Rational> = self.points.range(x.clone()..).next().cloned();
        let mut take = |c: Option<Rational>| {
            if let Some(c) = c {
                if best.as_ref().is_none_or(|b| c < *b) {
                    best = Some(c);
                }
            }
        };
        for (a, b) in self.cantors.iter() {
            take(cantor_floor_ceil(a, b, x).1);
        }
        if let Some(bits) = self.grid_bits {
            take(grid_floor_ceil(bits, x).1);
        }
        if let Some(q) = self.max_denominator {
            take(farey_floor_ceil(q, x).1);
        }
        best
    }

    /// Exact distance from `x` to the set; `None` when the set is empty.
    /// Accepts any rational, not only points of `[0, 1]`.
    pub fn distance(&self, x: &Rational) -> Option<Rational> {
        let below = self.floor_point(x).map(|p| x - p);
        let above = self.ceil_point(x).map(|p| p - x);
        match (below, above) {
            (Some(l), Some(r)) => Some(foundation::min(&l, &r)),
            (l, r) => l.or(r),
        }
    }

    pub fn dist_to(&self, x: &Rational) -> Result<Rational> {
        require_unit(x)?;
        self.distance(x).ok_or(Error::EmptySet)
    }

    /// The connected component `(a, b)` of `[0, 1] ∖ self` containing `x`.
    pub fn gap_component(&self, x: &Rational) -> Result<(Rational, Rational)> {
        require_unit(x)?;
        if self.contains_unchecked(x) {
            return Err(Error::InSet(x.clone()));
        }
        match (self.floor_point(x), self.ceil_point(x)) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::MissingEndpoints),
        }
    }
}

/// Nearest points of the ternary Cantor set below and above `t ∈ [0, 1]`;
/// both equal `t` when `t` is in the set.
///
/// Reads the ternary expansion of `t` by long division. The first digit `1`
/// places `t` inside a removed middle third unless the expansion stops right
/// there (`0.d…d1 = 0.d…d0222…`). A repeating remainder without any `1`
/// means the expansion only uses digits `0` and `2`.
pub fn ternary_neighbors(t: &Rational) -> (Rational, Rational) {
    debug_assert!(is_unit(t));
    if t.is_one() {
        return (t.clone(), t.clone());
    }
    let q = t.denom().clone();
    let mut r = t.numer().clone();
    let mut prefix = BigInt::zero();
    let mut scale = BigInt::one();
    let mut seen = HashSet::new();
    loop {
        r *= 3;
        scale *= 3;
        let digit = (&r / &q).to_u8().expect("ternary digit");
        r %= &q;
        if digit == 1 {
            if r.is_zero() {
                return (t.clone(), t.clone());
            }
            let base = &prefix * 3;
            return (
                Rational::new(&base + 1, scale.clone()),
                Rational::new(base + 2, scale),
            );
        }
        prefix = prefix * 3 + digit;
        if r.is_zero() || !seen.insert(r.clone()) {
            return (t.clone(), t.clone());
        }
    }
}

fn cantor_floor_ceil(a: &Rational, b: &Rational, x: &Rational) -> (Option<Rational>, Option<Rational>) {
    if x < a {
        return (None, Some(a.clone()));
    }
    if x > b {
        return (Some(b.clone()), None);
    }
    let span = b - a;
    let t = (x - a) / &span;
    let (lo, hi) = ternary_neighbors(&t);
    (Some(a + &span * lo), Some(a + span * hi))
}

fn grid_floor_ceil(bits: u32, x: &Rational) -> (Option<Rational>, Option<Rational>) {
    let zero = Rational::zero();
    let one = Rational::one();
    if *x < zero {
        return (None, Some(zero));
    }
    if *x > one {
        return (Some(one), None);
    }
    let scale = pow2(i64::from(bits));
    let y = x * &scale;
    (
        Some(Rational::from_integer(foundation::floor(&y)) / &scale),
        Some(Rational::from_integer(foundation::ceil(&y)) / scale),
    )
}

/// Neighbours of `x` in the Farey sequence of order `max_den`, found by a
/// Stern–Brocot descent that takes whole runs of same-direction steps at once.
fn farey_floor_ceil(max_den: u64, x: &Rational) -> (Option<Rational>, Option<Rational>) {
    let zero = Rational::zero();
    let one = Rational::one();
    if *x < zero {
        return (None, Some(zero));
    }
    if *x > one {
        return (Some(one), None);
    }
    let q_max = BigInt::from(max_den);
    if *x.denom() <= q_max {
        return (Some(x.clone()), Some(x.clone()));
    }
    // a/b < x < c/d, adjacent, both with denominator <= q_max.
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    let (mut c, mut d) = (BigInt::one(), BigInt::one());
    let (xn, xd) = (x.numer(), x.denom());
    loop {
        if &b + &d > q_max {
            break;
        }
        // x < (a+c)/(b+d) ⇔ xn·(b+d) < xd·(a+c)
        let go_left = xn * (&b + &d) < xd * (&a + &c);
        if go_left {
            // largest k with x < (c + k·a)/(d + k·b), i.e. k·(xn·b − xd·a) < xd·c − xn·d
            let num = xd * &c - xn * &d;
            let den = xn * &b - xd * &a;
            let k_fit = (&num + &den - 1u32) / &den - 1u32;
            let k_den = (&q_max - &d) / &b;
            let k = k_fit.min(k_den);
            c += &k * &a;
            d += &k * &b;
        } else {
            let num = xn * &b - xd * &a;
            let den = xd * &c - xn * &d;
            let k_fit = (&num + &den - 1u32) / &den - 1u32;
            let k_den = (&q_max - &b) / &d;
            let k = k_fit.min(k_den);
            a += &k * &c;
            b += &k * &d;
        }
    }
    (Some(Rational::new(a, b)), Some(Rational::new(c, d)))
}

/// Finds a closed interval `K ⊂ interior(J)` disjoint from `avoid` with
/// `|K| <= |J|/4`.
///
/// Candidate centres run over the dyadic grid of `J`: depth 1, 2, 3, … and,
/// within a depth, odd `k` ascending, `c = left(J) + k·2^-depth·|J|`. The first
/// centre at positive distance `d` from both `avoid` and `∂J` wins and yields
/// `[c − d/4, c + d/4]`, with the half-width capped at `|J|/8`.
pub fn clear_subinterval(j: &Interval, avoid: &ClosedNullSet, scan_depth_cap: u32) -> Result<Interval> {
    let len = j.width();
    if !len.is_positive() {
        return Err(Error::Precondition(format!("degenerate interval {j}")));
    }
    let cap = &len / int(8);
    for depth in 1..=scan_depth_cap {
        let step = &len * pow2(-i64::from(depth));
        let count: u64 = 1 << depth.min(63);
        let mut k = 1u64;
        while k < count {
            let c = j.lo() + &step * int(k as i64);
            let to_edge = foundation::min(&(&c - j.lo()), &(j.hi() - &c));
            let d = match avoid.distance(&c) {
                Some(da) => foundation::min(&da, &to_edge),
                None => to_edge,
            };
            if d.is_positive() {
                let half = foundation::min(&(d / int(4)), &cap);
                return Interval::new(&c - &half, &c + &half);
            }
            k += 2;
        }
    }
    Err(Error::ScanDepthExceeded(scan_depth_cap))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Level `n` holds every reduced fraction in `[0, 1]` with denominator `<= 2n − 1`.
    Rationals,
}

impl Stream {
    pub fn max_denominator(self, level: u32) -> u64 {
        match self {
            Stream::Rationals => 2 * u64::from(level) - 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub stream_level_cap: u32,
    pub scan_depth_cap: u32,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { stream_level_cap: 64, scan_depth_cap: 20 }
    }
}

/// The nested family `F₁ ⊂ F₂ ⊂ …` whose union is `M`.
///
/// Explicit levels are stored cumulatively, so nesting holds by
/// construction. Past the last explicit level the chain is constant unless a
/// stream or densification keeps adding points.
#[derive(Debug, Clone)]
pub struct LevelChain {
    declared: Vec<Vec<Generator>>,
    cumulative: Vec<ClosedNullSet>,
    stream: Option<Stream>,
    densify: bool,
    caps: Caps,
}

impl LevelChain {
    pub fn new(
        levels: Vec<Vec<Generator>>,
        stream: Option<Stream>,
        densify: bool,
        caps: Caps,
    ) -> Result<Self> {
        let mut cumulative = Vec::with_capacity(levels.len());
        let mut acc = ClosedNullSet::empty();
        for gens in &levels {
            acc.extend(gens.iter().cloned())?;
            cumulative.push(acc.clone());
        }
        let chain = LevelChain { declared: levels, cumulative, stream, densify, caps };
        let first = chain.level(1);
        if !(first.contains_unchecked(&Rational::zero()) && first.contains_unchecked(&Rational::one())) {
            return Err(Error::MissingEndpoints);
        }
        Ok(chain)
    }

    pub fn finite(levels: Vec<Vec<Generator>>) -> Result<Self> {
        Self::new(levels, None, false, Caps::default())
    }

    pub fn with_densify(mut self, densify: bool) -> Self {
        self.densify = densify;
        self
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    pub fn densify(&self) -> bool {
        self.densify
    }

    pub fn stream(&self) -> Option<Stream> {
        self.stream
    }

    pub fn declared_levels(&self) -> &[Vec<Generator>] {
        &self.declared
    }

    /// `Fₙ` for `n >= 1`.
    pub fn level(&self, n: u32) -> ClosedNullSet {
        assert!(n >= 1, "levels are numbered from 1");
        let mut set = match self.cumulative.len() {
            0 => ClosedNullSet::empty(),
            len => self.cumulative[(n as usize).min(len) - 1].clone(),
        };
        if self.densify {
            set.grid_bits = Some(set.grid_bits.map_or(n, |b| b.max(n)));
        }
        if let Some(stream) = self.stream {
            let q = stream.max_denominator(n);
            set.max_denominator = Some(set.max_denominator.map_or(q, |m| m.max(q)));
        }
        set
    }

    /// First level from which `Fₙ` no longer changes, if any.
    pub fn stable_from(&self) -> Option<u32> {
        if self.densify || self.stream.is_some() {
            None
        } else {
            Some(self.cumulative.len().max(1) as u32)
        }
    }

    /// Smallest `n` with `a ∈ Fₙ`.
    pub fn level_of(&self, a: &Rational) -> Result<u32> {
        require_unit(a)?;
        let limit = self.stable_from().unwrap_or(self.caps.stream_level_cap);
        for n in 1..=limit {
            if self.level(n).contains_unchecked(a) {
                return Ok(n);
            }
        }
        match self.stable_from() {
            Some(levels) => Err(Error::NotInM { point: a.clone(), levels }),
            None => Err(Error::LevelCapExhausted { point: a.clone(), cap: limit }),
        }
    }
}

pub fn point(n: i64, d: i64) -> Generator {
    Generator::Point(frac(n, d))
}
