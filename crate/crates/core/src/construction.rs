//! The functions `gₙ` and `f = Σ 2⁻ⁿ gₙ`.
//!
//! `gₙ` is the identity on `Fₙ`. On each gap of `Fₙ` it is assembled cell by
//! cell from the staircases of [`crate::cantor`], which pin the partition
//! points and stay within their cell, so `|gₙ(x) − x| <= dist(x, Fₙ)²`.
//!
//! At a point `a` first appearing in level `n`, the terms `k < n` are flat
//! near `a` and the remaining tail has derivative exactly `Σ_{k>=n} 2⁻ᵏ =
//! 2^(1−n)`.

use num_traits::{One, Signed, Zero};

use crate::cantor::CantorScheme;
use crate::error::{Error, Result};
use crate::foundation::{self, ceil_log2, enclose_sum, pad, pow2, require_unit, Enclosure, Interval, Rational};
use crate::nullsets::LevelChain;
use crate::partition::{locate_cell, Cell};

#[derive(Debug, Clone)]
pub struct SingularFunction {
    chain: LevelChain,
}

/// Number of series terms used by [`SingularFunction::f_eval`]:
/// `N = ⌈log₂(2/eps)⌉`, at least one.
pub fn terms_for(eps: &Rational) -> u32 {
    let two = foundation::int(2);
    ceil_log2(&(two / eps)).max(1) as u32
}

impl SingularFunction {
    pub fn new(chain: LevelChain) -> Self {
        SingularFunction { chain }
    }

    pub fn chain(&self) -> &LevelChain {
        &self.chain
    }

    pub fn level_of(&self, a: &Rational) -> Result<u32> {
        self.chain.level_of(a)
    }

    fn check_eps(eps: &Rational) -> Result<()> {
        if eps.is_positive() {
            Ok(())
        } else {
            Err(Error::Precondition("eps must be positive".into()))
        }
    }

    /// Enclosure of `gₙ(x)` of width at most `eps`.
    pub fn g_eval(&self, n: u32, x: &Rational, eps: &Rational) -> Result<Enclosure> {
        self.g_eval_traced(n, x, eps).map(|(e, _)| e)
    }

    /// Like [`Self::g_eval`], also returning the partition cell used (none
    /// when `x ∈ Fₙ`).
    pub fn g_eval_traced(&self, n: u32, x: &Rational, eps: &Rational) -> Result<(Enclosure, Option<Cell>)> {
        if n == 0 {
            return Err(Error::Precondition("levels are numbered from 1".into()));
        }
        require_unit(x)?;
        Self::check_eps(eps)?;
        let level = self.chain.level(n);
        if level.contains(x)? {
            return Ok((Interval::point(x.clone()), None));
        }
        let (a, b) = level.gap_component(x)?;
        let cell = locate_cell(&a, &b, x)?;
        if *x == cell.p_lo {
            return Ok((Interval::point(x.clone()), Some(cell)));
        }
        let scheme = CantorScheme::new(&self.chain, n, cell)?;
        let value = scheme.phi_eval(x, eps)?;
        Ok((value, Some(scheme.cell().clone())))
    }

    /// Enclosure of `f(x)` of width at most `eps`: the first `N` terms, each
    /// to `eps/(2N)`, plus the tail `[0, 2^-N]`.
    pub fn f_eval(&self, x: &Rational, eps: &Rational) -> Result<Enclosure> {
        require_unit(x)?;
        Self::check_eps(eps)?;
        let terms = terms_for(eps);
        let term_eps = eps / foundation::int(2 * i64::from(terms));
        let stable = self.chain.stable_from();
        let mut values: Vec<(Rational, Enclosure)> = Vec::with_capacity(terms as usize);
        let mut reused: Option<Enclosure> = None;
        for n in 1..=terms {
            // Fₙ constant from `stable` on, hence gₙ too.
            let g = match (stable, &reused) {
                (Some(s), Some(e)) if n > s => e.clone(),
                _ => {
                    let e = self.g_eval(n, x, &term_eps)?;
                    if stable.is_some_and(|s| n >= s) {
                        reused = Some(e.clone());
                    }
                    e
                }
            };
            values.push((pow2(-i64::from(n)), g));
        }
        let head = enclose_sum(values.iter().map(|(w, e)| (w, e)));
        Ok(pad(&head, &Rational::zero(), &pow2(-i64::from(terms))))
    }

    /// `f'(a) = 2^(1−n)` where `n` is the level of `a`.
    pub fn claimed_derivative(&self, a: &Rational) -> Result<Rational> {
        let n = self.level_of(a)?;
        Ok(pow2(1 - i64::from(n)))
    }

    /// `ρ > 0` such that every `gₖ` with `k < level_of(a)` is constant on
    /// `(a − ρ, a + ρ)`. Level-one points have no such terms and get `1`.
    pub fn constancy_radius(&self, a: &Rational) -> Result<Rational> {
        let n = self.level_of(a)?;
        let mut rho = Rational::one();
        for k in 1..n {
            let r = self.flat_radius_of_term(k, a, n - k)?;
            rho = foundation::min(&rho, &r);
        }
        Ok(rho)
    }

    /// Constancy radius of `gₖ` around `a ∉ Fₖ`, where `a ∈ F_{k+depth}`.
    fn flat_radius_of_term(&self, k: u32, a: &Rational, depth: u32) -> Result<Rational> {
        let level = self.chain.level(k);
        let (lo, hi) = level.gap_component(a)?;
        let cell = locate_cell(&lo, &hi, a)?;
        if *a == cell.p_lo {
            let here = CantorScheme::new(&self.chain, k, cell.clone())?;
            let before = CantorScheme::new(&self.chain, k, cell.prev())?;
            return Ok(here.edge_radius(&before));
        }
        let scheme = CantorScheme::new(&self.chain, k, cell)?;
        scheme.flat_radius(a, depth)?.ok_or_else(|| {
            Error::Precondition(format!("point {} not excluded by depth {depth}", foundation::render(a)))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foundation::{frac, int};
    use crate::nullsets::point;

    fn midpoint() -> SingularFunction {
        SingularFunction::new(
            LevelChain::finite(vec![vec![point(0, 1), point(1, 1)], vec![point(1, 2)]]).unwrap(),
        )
    }

    fn endpoints() -> SingularFunction {
        SingularFunction::new(LevelChain::finite(vec![vec![point(0, 1), point(1, 1)]]).unwrap())
    }

    #[test]
    fn level_and_derivative_examples() {
        let sf = midpoint();
        assert_eq!(sf.level_of(&int(0)).unwrap(), 1);
        assert_eq!(sf.level_of(&frac(1, 2)).unwrap(), 2);
        assert!(matches!(sf.level_of(&frac(1, 3)), Err(Error::NotInM { .. })));
        assert_eq!(sf.claimed_derivative(&int(1)).unwrap(), int(1));
        assert_eq!(sf.claimed_derivative(&frac(1, 2)).unwrap(), frac(1, 2));
        assert!(matches!(sf.claimed_derivative(&frac(1, 3)), Err(Error::NotInM { .. })));
    }

    #[test]
    fn g_examples() {
        let sf = midpoint();
        let eps = pow2(-20);
        assert_eq!(sf.g_eval(2, &frac(1, 2), &eps).unwrap(), Interval::point(frac(1, 2)));
        assert_eq!(sf.g_eval(1, &int(0), &eps).unwrap(), Interval::point(int(0)));
        let e = sf.g_eval(2, &frac(3, 8), &eps).unwrap();
        let bound = Interval::new(frac(3, 8) - frac(1, 64), frac(3, 8) + frac(1, 64)).unwrap();
        assert!(bound.contains_interval(&e), "{e}");
        assert!(e.width() <= eps);
    }

    #[test]
    fn f_endpoints() {
        let sf = midpoint();
        let eps = pow2(-40);
        let e0 = sf.f_eval(&int(0), &eps).unwrap();
        assert!(e0.contains(&int(0)) && *e0.hi() <= eps);
        let e1 = sf.f_eval(&int(1), &eps).unwrap();
        assert!(e1.contains(&int(1)) && e1.width() <= eps);
    }

    #[test]
    fn f_equals_g1_for_single_level() {
        let sf = endpoints();
        let eps = pow2(-20);
        let x = frac(1, 4);
        let f = sf.f_eval(&x, &eps).unwrap();
        let g = sf.g_eval(1, &x, &pow2(-40)).unwrap();
        assert!(f.lo() <= g.hi() && g.lo() <= f.hi());
        assert!(f.width() <= eps);
    }

    #[test]
    fn constancy_radius_at_midpoint() {
        let sf = midpoint();
        assert_eq!(sf.constancy_radius(&int(0)).unwrap(), int(1));
        // 1/2 is the left end of g₁'s cell [1/2, 11/20], whose root is
        // [83/160, 85/160]; the previous cell [9/20, 1/2] has root [75/160, 77/160].
        assert_eq!(sf.constancy_radius(&frac(1, 2)).unwrap(), frac(3, 160));
    }

    #[test]
    fn radius_shrinks_as_levels_are_added() {
        let two = midpoint();
        let three = SingularFunction::new(
            LevelChain::finite(vec![
                vec![point(0, 1), point(1, 1)],
                vec![point(1, 2)],
                vec![point(1, 2), point(37, 100)],
            ])
            .unwrap(),
        );
        let r2 = two.constancy_radius(&frac(1, 2)).unwrap();
        let r3 = three.constancy_radius(&frac(1, 2)).unwrap();
        assert!(r3 <= r2);
        let r = three.constancy_radius(&frac(37, 100)).unwrap();
        assert!(r.is_positive());
    }
}
