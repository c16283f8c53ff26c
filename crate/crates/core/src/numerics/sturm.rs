//! Sturm sequences and exact real-root counting on rational intervals.
//!
//! Endpoint roots are handled with exact one-sided sign limits instead of
//! perturbing the endpoints: the sign of `q` just right of `x` is the sign of
//! its first nonzero derivative at `x`, and just left of `x` the same sign times
//! `(-1)^m` where `m` is the order of that derivative.

use std::cmp::Ordering;

use rug::Rational;

use super::poly::RationalPolynomial;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SturmChain {
    seq: Vec<RationalPolynomial>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RootCount {
    /// Distinct real roots in the half-open span `(lo, hi]`.
    pub count: usize,
    pub lo_is_root: bool,
    pub hi_is_root: bool,
}

impl RootCount {
    /// Distinct roots in the closed span `[lo, hi]`.
    pub fn closed(&self) -> usize {
        self.count + usize::from(self.lo_is_root)
    }
}

enum Side {
    Left,
    Right,
}

fn one_sided_sign(q: &RationalPolynomial, x: &Rational, side: Side) -> Ordering {
    let mut d = q.clone();
    let mut order = 0usize;
    while !d.is_zero() {
        let s = d.sign_at(x);
        if s != Ordering::Equal {
            return match side {
                Side::Right => s,
                Side::Left if order % 2 == 1 => s.reverse(),
                Side::Left => s,
            };
        }
        d = d.derivative();
        order += 1;
    }
    Ordering::Equal
}

fn variations(signs: impl Iterator<Item = Ordering>) -> usize {
    let mut last = Ordering::Equal;
    let mut count = 0;
    for s in signs {
        if s == Ordering::Equal {
            continue;
        }
        if last != Ordering::Equal && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

impl SturmChain {
    pub fn new(p: &RationalPolynomial) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::arg("Sturm chain of the zero polynomial"));
        }
        let mut seq = vec![p.primitive()];
        let dp = p.derivative();
        if !dp.is_zero() {
            seq.push(dp.primitive());
            loop {
                let n = seq.len();
                let r = seq[n - 2].rem(&seq[n - 1])?;
                if r.is_zero() {
                    break;
                }
                seq.push((-&r).primitive());
            }
        }
        Ok(Self { seq })
    }

    pub fn sequence(&self) -> &[RationalPolynomial] {
        &self.seq
    }

    pub fn variations_at(&self, x: &Rational) -> usize {
        variations(self.seq.iter().map(|q| q.sign_at(x)))
    }

    pub fn variations_right_of(&self, x: &Rational) -> usize {
        variations(self.seq.iter().map(|q| one_sided_sign(q, x, Side::Right)))
    }

    pub fn variations_left_of(&self, x: &Rational) -> usize {
        variations(self.seq.iter().map(|q| one_sided_sign(q, x, Side::Left)))
    }

    /// Distinct roots of the chain's polynomial in `(lo, hi]`.
    pub fn count(&self, lo: &Rational, hi: &Rational) -> Result<RootCount> {
        if lo > hi {
            return Err(Error::arg(format!("empty span ({lo}, {hi}]")));
        }
        let p = &self.seq[0];
        let lo_is_root = p.sign_at(lo) == Ordering::Equal;
        let hi_is_root = p.sign_at(hi) == Ordering::Equal;
        if lo == hi {
            return Ok(RootCount {
                count: 0,
                lo_is_root,
                hi_is_root,
            });
        }
        let open = self
            .variations_right_of(lo)
            .checked_sub(self.variations_left_of(hi))
            .ok_or_else(|| Error::Inconsistent("Sturm variation count went negative".into()))?;
        Ok(RootCount {
            count: open + usize::from(hi_is_root),
            lo_is_root,
            hi_is_root,
        })
    }
}

/// Number of distinct real roots of `p` in `(lo, hi]`, with endpoint-root flags.
pub fn sturm_count(p: &RationalPolynomial, lo: &Rational, hi: &Rational) -> Result<RootCount> {
    SturmChain::new(p)?.count(lo, hi)
}

/// Disjoint spans `(a, b]` inside `(lo, hi]`, each holding exactly one root of `p`,
/// bisected until `b - a <= width`.
pub fn isolate_roots(
    p: &RationalPolynomial,
    lo: &Rational,
    hi: &Rational,
    width: &Rational,
) -> Result<Vec<(Rational, Rational)>> {
    if width.cmp0() != Ordering::Greater {
        return Err(Error::arg("isolation width must be positive"));
    }
    let chain = SturmChain::new(p)?;
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone())];
    while let Some((a, b)) = stack.pop() {
        let n = chain.count(&a, &b)?.count;
        if n == 0 {
            continue;
        }
        if n == 1 && Rational::from(&b - &a) <= *width {
            out.push((a, b));
            continue;
        }
        let m = Rational::from(&a + &b) / 2u32;
        stack.push((m.clone(), b));
        stack.push((a, m));
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn unit() -> (Rational, Rational) {
        (q(0, 1), q(1, 1))
    }

    #[test]
    fn fixed_point_polynomial_has_one_root_in_unit_interval() {
        let (lo, hi) = unit();
        let p2 = RationalPolynomial::from_i64s(&[-1, 1, 0, 1]);
        assert_eq!(sturm_count(&p2, &lo, &hi).unwrap().count, 1);
    }

    #[test]
    fn constant_has_no_roots() {
        let (lo, hi) = unit();
        let c = sturm_count(&RationalPolynomial::one(), &lo, &hi).unwrap();
        assert_eq!(c.count, 0);
        assert!(!c.lo_is_root && !c.hi_is_root);
    }

    #[test]
    fn quarter_shift_square() {
        let (lo, hi) = unit();
        let p = RationalPolynomial::from_coeffs(vec![q(-1, 4), q(0, 1), q(1, 1)]);
        assert_eq!(sturm_count(&p, &lo, &hi).unwrap().count, 1);
    }

    #[test]
    fn endpoint_roots_are_reported_and_counted_half_open() {
        // r (r - 1) (r - 1/2): roots 0, 1/2, 1
        let p = &(&RationalPolynomial::x() * &RationalPolynomial::from_i64s(&[-1, 1]))
            * &RationalPolynomial::from_coeffs(vec![q(-1, 2), q(1, 1)]);
        let (lo, hi) = unit();
        let c = sturm_count(&p, &lo, &hi).unwrap();
        assert_eq!(c.count, 2);
        assert!(c.lo_is_root && c.hi_is_root);
        assert_eq!(c.closed(), 3);
    }

    #[test]
    fn repeated_roots_are_counted_once() {
        let p = &RationalPolynomial::from_i64s(&[-1, 2]).pow(3) * &RationalPolynomial::from_i64s(&[1, 1]);
        let c = sturm_count(&p, &q(-2, 1), &q(2, 1)).unwrap();
        assert_eq!(c.count, 2);
        let c = sturm_count(&p, &q(1, 2), &q(2, 1)).unwrap();
        assert_eq!(c.count, 0);
        assert!(c.lo_is_root);
    }

    #[test]
    fn isolation_brackets_golden_fixed_point() {
        let p2 = RationalPolynomial::from_i64s(&[-1, 1, 0, 1]);
        let (lo, hi) = unit();
        let roots = isolate_roots(&p2, &lo, &hi, &q(1, 1 << 30)).unwrap();
        assert_eq!(roots.len(), 1);
        let (a, b) = &roots[0];
        assert!(*a < q(682328, 1_000_000) && *b > q(682327, 1_000_000));
    }

    #[test]
    fn zero_polynomial_is_rejected() {
        let (lo, hi) = unit();
        assert!(sturm_count(&RationalPolynomial::zero(), &lo, &hi).is_err());
    }

    proptest! {
        #[test]
        fn counts_distinct_rational_roots(
            roots in prop::collection::btree_set(-40i64..40, 1..6),
            lo in -45i64..45,
            span in 0i64..60,
        ) {
            let mut p = RationalPolynomial::one();
            for &a in &roots {
                p = &p * &RationalPolynomial::from_coeffs(vec![q(-a, 4), q(1, 1)]);
            }
            let hi = lo + span;
            let expected = roots.iter().filter(|&&a| lo < a && a <= hi).count();
            let c = sturm_count(&p, &q(lo, 4), &q(hi, 4)).unwrap();
            prop_assert_eq!(c.count, expected);
            prop_assert_eq!(c.lo_is_root, roots.contains(&lo));
        }
    }
}
