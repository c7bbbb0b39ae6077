//! Cantor staircases living inside a single partition cell.
//!
//! The scheme is a binary tree of closed intervals. The root is a clear
//! subinterval of the cell; the two children of a node at depth `ℓ` are clear
//! subintervals of its left and right thirds, chosen to miss the chain level
//! `F_{n+ℓ+1}`. The limit set `C` is a Cantor set that eventually escapes every
//! point of `M ∖ Fₙ`. The measure `ν` gives mass `2^-ℓ` to each depth-`ℓ` node
//! and
//!
//! ```text
//! φ(x) = p_lo + (p_hi − p_lo)·ν(C ∩ [p_lo, x])
//! ```
//!
//! is the staircase on the cell.

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::foundation::{self, ceil_log2, int, pow2, Enclosure, Interval, Rational};
use crate::nullsets::{clear_subinterval, LevelChain};
use crate::partition::Cell;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Left,
    Right,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Left => "L",
            Branch::Right => "R",
        })
    }
}

/// Parses a path such as `"LRL"`.
pub fn parse_path(s: &str) -> Result<Vec<Branch>> {
    s.chars()
        .map(|c| match c {
            'L' => Ok(Branch::Left),
            'R' => Ok(Branch::Right),
            other => Err(Error::Precondition(format!("invalid path step {other:?}"))),
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct CantorScheme<'c> {
    chain: &'c LevelChain,
    level: u32,
    cell: Cell,
    root: Interval,
}

/// Where a point sits relative to the two children of a node.
enum Slot {
    BeforeLeft,
    InLeft,
    Between,
    InRight,
    AfterRight,
}

impl<'c> CantorScheme<'c> {
    /// Scheme for `gₙ` on `cell`, where `cell` lies in a gap of `Fₙ`.
    pub fn new(chain: &'c LevelChain, level: u32, cell: Cell) -> Result<Self> {
        let root = clear_subinterval(&cell.interval(), &chain.level(level), chain.caps().scan_depth_cap)?;
        Ok(CantorScheme { chain, level, cell, root })
    }

    pub fn cell(&self) -> &Cell {
        &self.cell
    }

    pub fn root(&self) -> &Interval {
        &self.root
    }

    /// Children of a node sitting at `depth`.
    pub fn children(&self, node: &Interval, depth: u32) -> Result<(Interval, Interval)> {
        let avoid = self.chain.level(self.level + depth + 1);
        let cap = self.chain.caps().scan_depth_cap;
        let third = node.width() / int(3);
        let left = Interval::new(node.lo().clone(), node.lo() + &third)?;
        let right = Interval::new(node.hi() - &third, node.hi().clone())?;
        Ok((clear_subinterval(&left, &avoid, cap)?, clear_subinterval(&right, &avoid, cap)?))
    }

    pub fn node(&self, path: &[Branch]) -> Result<Interval> {
        let mut node = self.root.clone();
        for (depth, step) in path.iter().enumerate() {
            let (l, r) = self.children(&node, depth as u32)?;
            node = match step {
                Branch::Left => l,
                Branch::Right => r,
            };
        }
        Ok(node)
    }

    /// All nodes at `depth`, left to right. Exponential in `depth`.
    pub fn level_nodes(&self, depth: u32) -> Result<Vec<Interval>> {
        let mut nodes = vec![self.root.clone()];
        for d in 0..depth {
            let mut next = Vec::with_capacity(nodes.len() * 2);
            for n in &nodes {
                let (l, r) = self.children(n, d)?;
                next.push(l);
                next.push(r);
            }
            nodes = next;
        }
        Ok(nodes)
    }

    fn slot(x: &Rational, left: &Interval, right: &Interval) -> Slot {
        if x < left.lo() {
            Slot::BeforeLeft
        } else if x <= left.hi() {
            Slot::InLeft
        } else if x < right.lo() {
            Slot::Between
        } else if x <= right.hi() {
            Slot::InRight
        } else {
            Slot::AfterRight
        }
    }

    /// Enclosure of `ν(C ∩ [p_lo, x])` of width at most `2^-depth`.
    pub fn nu_cdf(&self, x: &Rational, depth: u32) -> Result<Enclosure> {
        if x < self.root.lo() {
            return Ok(Interval::point(Rational::zero()));
        }
        if x > self.root.hi() {
            return Ok(Interval::point(Rational::one()));
        }
        let mut node = self.root.clone();
        let mut below = Rational::zero();
        let mut mass = Rational::one();
        for d in 0..depth {
            let (l, r) = self.children(&node, d)?;
            let half = &mass / int(2);
            match Self::slot(x, &l, &r) {
                Slot::BeforeLeft => return Ok(Interval::point(below)),
                Slot::InLeft => node = l,
                Slot::Between => return Ok(Interval::point(below + half)),
                Slot::InRight => {
                    below += &half;
                    node = r;
                }
                Slot::AfterRight => return Ok(Interval::point(below + mass)),
            }
            mass = half;
        }
        let upper = &below + &mass;
        Interval::new(below, upper)
    }

    /// Enclosure of `φ(x)` of width at most `eps`.
    pub fn phi_eval(&self, x: &Rational, eps: &Rational) -> Result<Enclosure> {
        let cell = &self.cell;
        if x < &cell.p_lo || x > &cell.p_hi {
            return Err(Error::OutsideCell {
                x: Box::new(x.clone()),
                lo: Box::new(cell.p_lo.clone()),
                hi: Box::new(cell.p_hi.clone()),
            });
        }
        if !eps.is_positive() {
            return Err(Error::Precondition("eps must be positive".into()));
        }
        if x <= self.root.lo() {
            return Ok(Interval::point(cell.p_lo.clone()));
        }
        if x >= self.root.hi() {
            return Ok(Interval::point(cell.p_hi.clone()));
        }
        let span = cell.width();
        let depth = depth_for(&span, eps);
        let nu = self.nu_cdf(x, depth)?;
        Interval::new(&cell.p_lo + &span * nu.lo(), &cell.p_lo + &span * nu.hi())
    }

    /// Radius `r > 0` such that `φ` is constant on `(x − r, x + r)`, found by
    /// descending until `x` falls outside both children of the current node.
    /// Returns `None` if `x` is still inside a node at `max_depth`.
    ///
    /// `x` must lie strictly inside the cell; the walls start at the cell
    /// edges.
    pub fn flat_radius(&self, x: &Rational, max_depth: u32) -> Result<Option<Rational>> {
        let cell = &self.cell;
        if !(&cell.p_lo < x && x < &cell.p_hi) {
            return Err(Error::OutsideCell {
                x: Box::new(x.clone()),
                lo: Box::new(cell.p_lo.clone()),
                hi: Box::new(cell.p_hi.clone()),
            });
        }
        let mut left_wall = cell.p_lo.clone();
        let mut right_wall = cell.p_hi.clone();
        let radius = |lo: &Rational, hi: &Rational| Some(foundation::min(&(x - lo), &(hi - x)));
        if x < self.root.lo() {
            return Ok(radius(&left_wall, self.root.lo()));
        }
        if x > self.root.hi() {
            return Ok(radius(self.root.hi(), &right_wall));
        }
        let mut node = self.root.clone();
        for d in 0..max_depth {
            let (l, r) = self.children(&node, d)?;
            match Self::slot(x, &l, &r) {
                Slot::BeforeLeft => return Ok(radius(&left_wall, l.lo())),
                Slot::Between => return Ok(radius(l.hi(), r.lo())),
                Slot::AfterRight => return Ok(radius(r.hi(), &right_wall)),
                Slot::InLeft => {
                    right_wall = foundation::min(&right_wall, r.lo());
                    node = l;
                }
                Slot::InRight => {
                    left_wall = foundation::max(&left_wall, l.hi());
                    node = r;
                }
            }
        }
        Ok(None)
    }

    /// `p_lo` edge case of [`Self::flat_radius`]: the left flat of this cell
    /// joined with the right flat of the previous cell.
    pub fn edge_radius(&self, previous: &CantorScheme<'_>) -> Rational {
        let p = &self.cell.p_lo;
        debug_assert_eq!(previous.cell.p_hi, *p);
        foundation::min(&(self.root.lo() - p), &(p - previous.root.hi()))
    }

    /// Total length of the depth-`d` nodes never exceeds `|root|·(2/3)^d`
    /// (each child is at most a third of its parent).
    pub fn length_bound(&self, depth: u32) -> Rational {
        self.root.width() * num_traits::pow(foundation::frac(2, 3), depth as usize)
    }
}

/// Smallest depth `d` with `span·2^-d <= eps`.
pub fn depth_for(span: &Rational, eps: &Rational) -> u32 {
    let d = ceil_log2(&(span / eps)).max(0) as u32;
    debug_assert!(span * pow2(-i64::from(d)) <= *eps);
    d
}
