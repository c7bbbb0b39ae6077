//! Infinite partitions of an open gap `(a, b)` accumulating only at `a` and `b`.
//!
//! Base points are geometric towards both ends,
//! `a + L·2^(z−1)` for `z <= 0` and `b − L·2^(−z−1)` for `z >= 0` (`L = b − a`),
//! and each base interval of length `ℓ` is cut into `k = ⌊ℓ/m⌋ + 1` equal
//! cells, `m = min((p*_z − a)², (b − p*_{z+1})²)`. Every cell then satisfies
//!
//! ```text
//! p_hi − p_lo < min((p_lo − a)², (b − p_hi)²)
//! ```
//!
//! Nothing is materialized: a cell is located from `x` with two exact
//! logarithm/floor computations.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::foundation::{self, ceil_log2, floor_log2, pow2, Interval, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cell {
    pub gap_lo: Rational,
    pub gap_hi: Rational,
    pub p_lo: Rational,
    pub p_hi: Rational,
    pub base_index: i64,
    pub sub_index: BigInt,
    pub parts: BigInt,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.p_lo, self.p_hi)
    }
}

fn base_point(a: &Rational, b: &Rational, z: i64) -> Rational {
    let len = b - a;
    if z <= 0 {
        a + len * pow2(z - 1)
    } else {
        b - len * pow2(-z - 1)
    }
}

fn base_cell_layout(a: &Rational, b: &Rational, z: i64) -> (Rational, Rational, BigInt) {
    let lo = base_point(a, b, z);
    let hi = base_point(a, b, z + 1);
    let left = &lo - a;
    let right = b - &hi;
    let m = foundation::min(&(&left * &left), &(&right * &right));
    let parts = foundation::floor(&((&hi - &lo) / m)) + 1u32;
    (lo, hi, parts)
}

fn cell_at(a: &Rational, b: &Rational, z: i64, i: BigInt) -> Cell {
    let (lo, hi, parts) = base_cell_layout(a, b, z);
    let sub = (&hi - &lo) / Rational::from_integer(parts.clone());
    let p_lo = &lo + &sub * Rational::from_integer(i.clone());
    let p_hi = if &i + 1u32 == parts { hi } else { &p_lo + &sub };
    Cell {
        gap_lo: a.clone(),
        gap_hi: b.clone(),
        p_lo,
        p_hi,
        base_index: z,
        sub_index: i,
        parts,
    }
}

/// The cell `[p_lo, p_hi)` of the partition of `(a, b)` containing `x`.
pub fn locate_cell(a: &Rational, b: &Rational, x: &Rational) -> Result<Cell> {
    if !(a < x && x < b) {
        return Err(Error::OutsideGap { x: Box::new(x.clone()), a: Box::new(a.clone()), b: Box::new(b.clone()) });
    }
    let len = b - a;
    let mid = a + &len / foundation::int(2);
    let z = if *x < mid {
        floor_log2(&((x - a) / &len)) + 1
    } else {
        -ceil_log2(&((b - x) / &len)) - 1
    };
    let (lo, hi, parts) = base_cell_layout(a, b, z);
    debug_assert!(lo <= *x && *x < hi);
    let sub = (&hi - &lo) / Rational::from_integer(parts);
    let i = foundation::floor(&((x - &lo) / sub));
    Ok(cell_at(a, b, z, i))
}

impl Cell {
    pub fn interval(&self) -> Interval {
        Interval::new(self.p_lo.clone(), self.p_hi.clone()).expect("cell endpoints ordered")
    }

    pub fn width(&self) -> Rational {
        &self.p_hi - &self.p_lo
    }

    /// Strict, exact check of the cell inequality.
    pub fn satisfies_eq1(&self) -> bool {
        let left = &self.p_lo - &self.gap_lo;
        let right = &self.gap_hi - &self.p_hi;
        self.gap_lo < self.p_lo
            && self.p_lo < self.p_hi
            && self.p_hi < self.gap_hi
            && self.width() < foundation::min(&(&left * &left), &(&right * &right))
    }

    pub fn prev(&self) -> Cell {
        if self.sub_index.is_zero() {
            let (_, _, parts) = base_cell_layout(&self.gap_lo, &self.gap_hi, self.base_index - 1);
            cell_at(&self.gap_lo, &self.gap_hi, self.base_index - 1, parts - 1u32)
        } else {
            cell_at(&self.gap_lo, &self.gap_hi, self.base_index, &self.sub_index - 1u32)
        }
    }

    pub fn next(&self) -> Cell {
        if &self.sub_index + 1u32 == self.parts {
            cell_at(&self.gap_lo, &self.gap_hi, self.base_index + 1, BigInt::zero())
        } else {
            cell_at(&self.gap_lo, &self.gap_hi, self.base_index, &self.sub_index + BigInt::one())
        }
    }
}

/// `true` iff every cell satisfies the strict inequality for the gap `(a, b)`.
pub fn check_eq1(a: &Rational, b: &Rational, cells: &[Cell]) -> bool {
    cells
        .iter()
        .all(|c| c.gap_lo == *a && c.gap_hi == *b && c.satisfies_eq1())
}
