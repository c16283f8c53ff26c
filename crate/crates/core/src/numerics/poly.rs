//! Dense univariate polynomials with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::{Integer, Rational};

use super::interval::{parse_rational, Interval};
use crate::error::{Error, Result};

/// Coefficients are stored lowest degree first; the leading coefficient is
/// nonzero unless the polynomial is zero, which is stored as an empty list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RationalPolynomial {
    coeffs: Vec<Rational>,
}

impl RationalPolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::from(1))
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Self::monomial(Rational::from(1), 1)
    }

    pub fn monomial(c: Rational, deg: usize) -> Self {
        let mut coeffs = vec![Rational::new(); deg + 1];
        coeffs[deg] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.cmp0().is_eq()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64s(cs: &[i64]) -> Self {
        Self::from_coeffs(cs.iter().map(|&c| Rational::from(c)).collect())
    }

    pub fn from_sparse(terms: &[(usize, Rational)]) -> Self {
        let deg = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let mut coeffs = vec![Rational::new(); deg + 1];
        for (d, c) in terms {
            coeffs[*d] += c;
        }
        Self::from_coeffs(coeffs)
    }

    /// Parses whitespace-separated `degree:coefficient` terms, e.g. `"0:-1 2:-1/2"`.
    pub fn parse_sparse(s: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for tok in s.split_whitespace() {
            let (d, c) = tok
                .split_once(':')
                .ok_or_else(|| Error::arg(format!("bad term {tok:?}")))?;
            let d: usize = d
                .parse()
                .map_err(|_| Error::arg(format!("bad degree in {tok:?}")))?;
            terms.push((d, parse_rational(c)?));
        }
        Ok(Self::from_sparse(&terms))
    }

    /// Inverse of [`parse_sparse`](Self::parse_sparse).
    pub fn to_sparse(&self) -> String {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.cmp0().is_eq())
            .map(|(d, c)| format!("{d}:{c}"))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    /// Horner evaluation with outward rounding; encloses `{p(t) : t in x}`.
    pub fn eval_interval(&self, x: &Interval) -> Interval {
        let prec = x.prec();
        let mut acc = Interval::from_i64(0, prec);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &Interval::from_rational(c, prec);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| Rational::from(c * Integer::from(i)))
                .collect(),
        )
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| Rational::from(c * s)).collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// `self(other(x))`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * other) + &Self::constant(c.clone());
        }
        acc
    }

    /// Euclidean division: `self = den * quot + rem` with `deg rem < deg den`.
    pub fn div_rem(&self, den: &Self) -> Result<(Self, Self)> {
        let lead = den.leading().ok_or(Error::ZeroDivisor)?;
        let dd = den.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::new(); rem.len() - dd];
        let lead_inv = Rational::from(lead.recip_ref());
        for i in (0..quot.len()).rev() {
            let c = Rational::from(&rem[i + dd] * &lead_inv);
            if c.cmp0().is_eq() {
                continue;
            }
            for (j, dc) in den.coeffs.iter().enumerate() {
                rem[i + j] -= Rational::from(&c * dc);
            }
            quot[i] = c;
        }
        rem.truncate(dd);
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    pub fn rem(&self, den: &Self) -> Result<Self> {
        Ok(self.div_rem(den)?.1)
    }

    /// Scales to a monic polynomial; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => self.scale(&Rational::from(l.recip_ref())),
            None => Self::zero(),
        }
    }

    /// Positive rational multiple with coprime integer coefficients.
    ///
    /// Multiplying by a positive constant keeps every sign, which is all a
    /// Sturm chain needs, and keeps coefficient growth in check.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut den_lcm = Integer::from(1);
        for c in &self.coeffs {
            den_lcm.lcm_mut(c.denom());
        }
        let mut num_gcd = Integer::new();
        for c in &self.coeffs {
            let scaled = Integer::from(c.numer() * &den_lcm) / c.denom();
            num_gcd.gcd_mut(&scaled);
        }
        self.scale(&Rational::from((den_lcm, num_gcd)))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.primitive();
        let mut b = other.primitive();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor").primitive();
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self / gcd(self, self')`, which has the same distinct roots and no repeated ones.
    pub fn squarefree_part(&self) -> Self {
        if self.degree().map_or(true, |d| d == 0) {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            return self.clone();
        }
        self.div_rem(&g).expect("gcd is nonzero").0
    }

    pub fn sign_at(&self, x: &Rational) -> std::cmp::Ordering {
        self.eval(x).cmp0()
    }
}

/// Quotient and remainder of exact polynomial division.
pub fn poly_div_exact(
    num: &RationalPolynomial,
    den: &RationalPolynomial,
) -> Result<(RationalPolynomial, RationalPolynomial)> {
    num.div_rem(den)
}

impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let var = "r";
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.cmp0().is_eq() {
                continue;
            }
            let neg = c.cmp0().is_lt();
            let mag = Rational::from(c.abs_ref());
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag == 1;
            match (i, unit) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "{var}")?,
                (1, false) => write!(f, "{mag}*{var}")?,
                (_, true) => write!(f, "{var}^{i}")?,
                (_, false) => write!(f, "{mag}*{var}^{i}")?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a RationalPolynomial> for &'a RationalPolynomial {
    type Output = RationalPolynomial;
    fn add(self, o: &'a RationalPolynomial) -> RationalPolynomial {
        let n = self.coeffs.len().max(o.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), o.coeffs.get(i)) {
                (Some(a), Some(b)) => Rational::from(a + b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => Rational::new(),
            })
            .collect();
        RationalPolynomial::from_coeffs(coeffs)
    }
}

impl Neg for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn neg(self) -> RationalPolynomial {
        RationalPolynomial {
            coeffs: self.coeffs.iter().map(|c| Rational::from(-c)).collect(),
        }
    }
}

impl<'a> Sub<&'a RationalPolynomial> for &'a RationalPolynomial {
    type Output = RationalPolynomial;
    fn sub(self, o: &'a RationalPolynomial) -> RationalPolynomial {
        self + &(-o)
    }
}

impl<'a> Mul<&'a RationalPolynomial> for &'a RationalPolynomial {
    type Output = RationalPolynomial;
    fn mul(self, o: &'a RationalPolynomial) -> RationalPolynomial {
        if self.is_zero() || o.is_zero() {
            return RationalPolynomial::zero();
        }
        let mut coeffs = vec![Rational::new(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.cmp0().is_eq() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                coeffs[i + j] += Rational::from(a * b);
            }
        }
        RationalPolynomial::from_coeffs(coeffs)
    }
}

macro_rules! owned_polyop {
    ($tr:ident, $m:ident) => {
        impl $tr<RationalPolynomial> for RationalPolynomial {
            type Output = RationalPolynomial;
            fn $m(self, o: RationalPolynomial) -> RationalPolynomial {
                (&self).$m(&o)
            }
        }
    };
}

owned_polyop!(Add, add);
owned_polyop!(Sub, sub);
owned_polyop!(Mul, mul);

impl Neg for RationalPolynomial {
    type Output = RationalPolynomial;
    fn neg(self) -> RationalPolynomial {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rug::Float;

    fn p(cs: &[i64]) -> RationalPolynomial {
        RationalPolynomial::from_i64s(cs)
    }

    #[test]
    fn d2_is_exactly_p2_squared() {
        let d2 = p(&[1, -2, 1, -2, 2, 0, 1]);
        let p2 = p(&[-1, 1, 0, 1]);
        let (q, r) = poly_div_exact(&d2, &(&p2 * &p2)).unwrap();
        assert_eq!(q, RationalPolynomial::one());
        assert!(r.is_zero());
    }

    #[test]
    fn identity_divisor() {
        let a = p(&[3, 0, -1, 5]);
        let (q, r) = poly_div_exact(&a, &RationalPolynomial::one()).unwrap();
        assert_eq!(q, a);
        assert!(r.is_zero());
    }

    #[test]
    fn degree_one_euclid_step() {
        let (q, r) = poly_div_exact(&p(&[1, 0, 1]), &RationalPolynomial::x()).unwrap();
        assert_eq!(q, RationalPolynomial::x());
        assert_eq!(r, RationalPolynomial::one());
    }

    #[test]
    fn zero_divisor_errors() {
        assert_eq!(
            poly_div_exact(&p(&[1]), &RationalPolynomial::zero()),
            Err(Error::ZeroDivisor)
        );
    }

    #[test]
    fn normalization_drops_leading_zeros() {
        let a = p(&[1, 2, 0, 0]);
        assert_eq!(a.degree(), Some(1));
        assert_eq!(p(&[0, 0]).degree(), None);
    }

    #[test]
    fn sparse_round_trip() {
        let a = RationalPolynomial::parse_sparse("0:-1 1:1 2:-1/2 3:-1").unwrap();
        assert_eq!(a.to_sparse(), "0:-1 1:1 2:-1/2 3:-1");
        assert_eq!(a.to_string(), "-1 + r - 1/2*r^2 - r^3");
    }

    #[test]
    fn gcd_and_squarefree() {
        // (r - 1)^2 (r + 2)
        let a = &p(&[-1, 1]).pow(2) * &p(&[2, 1]);
        let g = a.gcd(&a.derivative());
        assert_eq!(g, p(&[-1, 1]));
        assert_eq!(a.squarefree_part().monic(), (&p(&[-1, 1]) * &p(&[2, 1])).monic());
    }

    #[test]
    fn interval_eval_brackets_root() {
        let a = p(&[-1, 1, 0, 1]);
        let x = Interval::new(Float::with_val(128, 0.68), Float::with_val(128, 0.69)).unwrap();
        assert!(a.eval_interval(&x).contains_zero());
        let one = RationalPolynomial::one();
        let v = one.eval_interval(&x);
        assert!(v.lo() == &1 && v.hi() == &1);
        let id = RationalPolynomial::x().eval_interval(&x);
        assert_eq!(id, x);
    }

    #[test]
    fn compose_matches_eval() {
        let a = p(&[1, -3, 2]);
        let b = p(&[0, 1, 1]);
        let c = a.compose(&b);
        let t = Rational::from((2, 7));
        assert_eq!(c.eval(&t), a.eval(&b.eval(&t)));
    }

    fn small_poly() -> impl Strategy<Value = RationalPolynomial> {
        prop::collection::vec((-20i64..=20, 1i64..=6), 0..7).prop_map(|cs| {
            RationalPolynomial::from_coeffs(
                cs.into_iter().map(|(n, d)| Rational::from((n, d))).collect(),
            )
        })
    }

    proptest! {
        #[test]
        fn division_recovers_quotient_and_remainder(q in small_poly(), den in small_poly(), r in small_poly()) {
            prop_assume!(den.degree().is_some_and(|d| d >= 1));
            let r = r.rem(&den).unwrap();
            let num = &(&den * &q) + &r;
            let (q2, r2) = poly_div_exact(&num, &den).unwrap();
            prop_assert_eq!(q2, q);
            prop_assert_eq!(r2, r);
        }

        #[test]
        fn interval_eval_encloses_exact_value(a in small_poly(), lo in -50i64..50, w in 0i64..40, t in 0i64..=100) {
            let lo_q = Rational::from((lo, 16));
            let hi_q = Rational::from((lo + w, 16));
            let x = Interval::new(
                Float::with_val(80, &lo_q),
                Float::with_val(80, &hi_q),
            ).unwrap();
            let pt = &lo_q + Rational::from((w * t, 1600));
            prop_assert!(a.eval_interval(&x).contains_rational(&a.eval(&pt)));
        }

        #[test]
        fn interval_eval_is_inclusion_monotone(a in small_poly(), lo in -30i64..30, w in 0i64..20, grow in 0i64..10) {
            let inner = Interval::new(
                Float::with_val(96, lo) / 8u32,
                Float::with_val(96, lo + w) / 8u32,
            ).unwrap();
            let outer = Interval::new(
                Float::with_val(96, lo - grow) / 8u32,
                Float::with_val(96, lo + w + grow) / 8u32,
            ).unwrap();
            prop_assert!(a.eval_interval(&inner).subset_of(&a.eval_interval(&outer)));
        }
    }
}
