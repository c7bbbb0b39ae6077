#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use staircase::cli::spec_file::preset;
use staircase::foundation::{frac, min};
use staircase::{Rational, SingularFunction};

pub const DEPTH: u32 = 20;

pub fn sf(name: &str) -> SingularFunction {
    sf_with(name, false)
}

pub fn sf_with(name: &str, densify: bool) -> SingularFunction {
    let mut spec = preset(name).unwrap_or_else(|| panic!("no preset {name}"));
    spec.densify |= densify;
    SingularFunction::new(spec.to_chain().expect("preset builds"))
}

/// Seeded rationals `p/q` in `[0, 1]` with `q <= max_den`.
pub fn small_rationals(seed: u64, count: usize, max_den: i64) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let q = rng.gen_range(1..=max_den);
            frac(rng.gen_range(0..=q), q)
        })
        .collect()
}

/// The `2^DEPTH` closed intervals `[l, l+1]·3^-DEPTH` of the depth-`DEPTH`
/// ternary Cantor approximation, listed by left numerator `l`, built by
/// repeatedly keeping the outer thirds.
pub struct CantorOracle {
    lefts: Vec<u64>,
    scale: Rational,
}

#[derive(Debug, PartialEq, Eq)]
pub enum OracleAnswer {
    /// Outside the approximation: not in the set, at this exact distance.
    Outside(Rational),
    /// Inside one of the depth-`DEPTH` intervals.
    Inside,
}

impl CantorOracle {
    pub fn new() -> Self {
        let mut lefts = vec![0u64];
        for _ in 0..DEPTH {
            lefts = lefts.iter().flat_map(|&l| [3 * l, 3 * l + 2]).collect();
        }
        CantorOracle { lefts, scale: frac(1, 3i64.pow(DEPTH)) }
    }

    fn left(&self, i: usize) -> Rational {
        Rational::from_integer(self.lefts[i].into()) * &self.scale
    }

    fn right(&self, i: usize) -> Rational {
        Rational::from_integer((self.lefts[i] + 1).into()) * &self.scale
    }

    /// Answer for the copy `a + (b − a)·C` at `x`.
    pub fn query(&self, a: &Rational, b: &Rational, x: &Rational) -> OracleAnswer {
        let w = b - a;
        let t = (x - a) / &w;
        let count = self.lefts.partition_point(|&l| Rational::from_integer(l.into()) * &self.scale <= t);
        let mut best: Option<Rational> = None;
        if count > 0 {
            let i = count - 1;
            let r = self.right(i);
            if t <= r {
                return OracleAnswer::Inside;
            }
            best = Some(&t - r);
        }
        if count < self.lefts.len() {
            let d = self.left(count) - &t;
            best = Some(best.map_or(d.clone(), |b| min(&b, &d)));
        }
        OracleAnswer::Outside(best.expect("nonempty oracle") * w)
    }
}
