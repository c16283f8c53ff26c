//! Closed intervals with outward (directed) rounding on MPFR floats.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::{Constant, Round};
use rug::ops::{AssignRound, Pow};
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

fn rd<T>(prec: u32, val: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(prec, val, Round::Down).0
}

fn ru<T>(prec: u32, val: T) -> Float
where
    Float: AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(prec, val, Round::Up).0
}

fn min_f(a: Float, b: Float) -> Float {
    if b < a {
        b
    } else {
        a
    }
}

fn max_f(a: Float, b: Float) -> Float {
    if b > a {
        b
    } else {
        a
    }
}

/// A closed interval `[lo, hi]` with both endpoints at the same precision.
///
/// Every operation rounds `lo` toward `-inf` and `hi` toward `+inf`, so the
/// result encloses the exact image of the inputs.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    lo: Float,
    hi: Float,
}

impl Interval {
    pub fn new(lo: Float, hi: Float) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::arg("interval endpoint is NaN"));
        }
        if lo > hi {
            return Err(Error::arg(format!("interval lo {lo} exceeds hi {hi}")));
        }
        let prec = lo.prec().max(hi.prec());
        Ok(Self {
            lo: rd(prec, &lo),
            hi: ru(prec, &hi),
        })
    }

    fn raw(lo: Float, hi: Float) -> Self {
        let lo = if lo.is_nan() {
            Float::with_val(lo.prec(), rug::float::Special::NegInfinity)
        } else {
            lo
        };
        let hi = if hi.is_nan() {
            Float::with_val(hi.prec(), rug::float::Special::Infinity)
        } else {
            hi
        };
        Self { lo, hi }
    }

    pub fn entire(prec: u32) -> Self {
        Self {
            lo: Float::with_val(prec, rug::float::Special::NegInfinity),
            hi: Float::with_val(prec, rug::float::Special::Infinity),
        }
    }

    pub fn point(x: Float) -> Self {
        Self {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        Self {
            lo: rd(prec, q),
            hi: ru(prec, q),
        }
    }

    pub fn from_integer(z: &Integer, prec: u32) -> Self {
        Self {
            lo: rd(prec, z),
            hi: ru(prec, z),
        }
    }

    pub fn from_i64(v: i64, prec: u32) -> Self {
        Self {
            lo: rd(prec, v),
            hi: ru(prec, v),
        }
    }

    pub fn from_f64(v: f64, prec: u32) -> Self {
        Self {
            lo: rd(prec, v),
            hi: ru(prec, v),
        }
    }

    /// Enclosure of the decimal or fraction literal `s` (e.g. `"0.5025"`, `"1/3"`).
    pub fn parse(s: &str, prec: u32) -> Result<Self> {
        Ok(Self::from_rational(&parse_rational(s)?, prec))
    }

    pub fn ln2(prec: u32) -> Self {
        Self {
            lo: rd(prec, Constant::Log2),
            hi: ru(prec, Constant::Log2),
        }
    }

    /// The golden mean `(1 + sqrt 5) / 2`.
    pub fn golden_ratio(prec: u32) -> Self {
        let five = Self::from_i64(5, prec);
        let s = five.sqrt().expect("sqrt of 5");
        (&s + &Self::from_i64(1, prec)).div_pow2(1)
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.lo.prec()
    }

    pub fn width(&self) -> Float {
        ru(self.prec(), &self.hi - &self.lo)
    }

    pub fn width_f64(&self) -> f64 {
        self.width().to_f64_round(Round::Up)
    }

    pub fn mid(&self) -> Float {
        let mut m = Float::with_val(self.prec() + 1, &self.lo + &self.hi);
        m /= 2u32;
        m
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64()
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn hull(&self, other: &Self) -> Self {
        let prec = self.prec().max(other.prec());
        Self {
            lo: rd(prec, min_f(self.lo.clone(), other.lo.clone())),
            hi: ru(prec, max_f(self.hi.clone(), other.hi.clone())),
        }
    }

    pub fn intersect(&self, other: &Self) -> Option<Self> {
        let prec = self.prec().max(other.prec());
        let lo = max_f(self.lo.clone(), other.lo.clone());
        let hi = min_f(self.hi.clone(), other.hi.clone());
        if lo > hi {
            None
        } else {
            Some(Self {
                lo: rd(prec, &lo),
                hi: ru(prec, &hi),
            })
        }
    }

    /// Endpoint-wise maximum; encloses `max(x, y)` for `x` in self and `y` in other.
    pub fn max(&self, other: &Self) -> Self {
        let prec = self.prec().max(other.prec());
        Self {
            lo: rd(prec, max_f(self.lo.clone(), other.lo.clone())),
            hi: ru(prec, max_f(self.hi.clone(), other.hi.clone())),
        }
    }

    pub fn min(&self, other: &Self) -> Self {
        let prec = self.prec().max(other.prec());
        Self {
            lo: rd(prec, min_f(self.lo.clone(), other.lo.clone())),
            hi: ru(prec, min_f(self.hi.clone(), other.hi.clone())),
        }
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// True when every point of self lies in other.
    pub fn subset_of(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn contains_float(&self, x: &Float) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_rational(&self, q: &Rational) -> bool {
        self.lo <= *q && self.hi >= *q
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.cmp0() != Some(Ordering::Greater) && self.hi.cmp0() != Some(Ordering::Less)
    }

    /// Certified strict comparison: every point of self is below every point of other.
    pub fn certainly_lt(&self, other: &Self) -> bool {
        self.hi < other.lo
    }

    pub fn certainly_gt(&self, other: &Self) -> bool {
        self.lo > other.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo.cmp0() == Some(Ordering::Greater)
    }

    pub fn is_negative(&self) -> bool {
        self.hi.cmp0() == Some(Ordering::Less)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.lo.cmp0().is_some_and(|o| o != Ordering::Less)
    }

    /// Outward rounding to a (usually lower) precision.
    pub fn round_to(&self, prec: u32) -> Self {
        Self {
            lo: rd(prec, &self.lo),
            hi: ru(prec, &self.hi),
        }
    }

    /// Multiplication by `2^-e`, exact.
    pub fn div_pow2(&self, e: u32) -> Self {
        let mut lo = self.lo.clone();
        let mut hi = self.hi.clone();
        lo >>= e;
        hi >>= e;
        Self { lo, hi }
    }

    pub fn abs(&self) -> Self {
        if self.is_nonnegative() {
            self.clone()
        } else if self.hi.cmp0() != Some(Ordering::Greater) {
            -self
        } else {
            let prec = self.prec();
            let neg_lo = Float::with_val(prec, -&self.lo);
            Self {
                lo: Float::new(prec),
                hi: max_f(neg_lo, self.hi.clone()),
            }
        }
    }

    pub fn recip(&self) -> Self {
        &Self::from_i64(1, self.prec()) / self
    }

    /// Integer power; exact image including even powers of intervals straddling zero.
    pub fn powi(&self, n: u32) -> Self {
        let prec = self.prec();
        if n == 0 {
            return Self::from_i64(1, prec);
        }
        if n == 1 {
            return self.clone();
        }
        if n % 2 == 1 || self.is_nonnegative() {
            return Self::raw(rd(prec, (&self.lo).pow(n)), ru(prec, (&self.hi).pow(n)));
        }
        let a = self.abs();
        Self::raw(rd(prec, (&a.lo).pow(n)), ru(prec, (&a.hi).pow(n)))
    }

    pub fn sqr(&self) -> Self {
        self.powi(2)
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.lo.cmp0() == Some(Ordering::Less) || self.lo.is_nan() {
            return Err(Error::domain("sqrt", format!("lower end {} is negative", self.lo)));
        }
        let prec = self.prec();
        Ok(Self::raw(rd(prec, self.lo.sqrt_ref()), ru(prec, self.hi.sqrt_ref())))
    }

    pub fn ln(&self) -> Result<Self> {
        if self.lo.cmp0() != Some(Ordering::Greater) {
            return Err(Error::domain("log", format!("lower end {} is not positive", self.lo)));
        }
        let prec = self.prec();
        Ok(Self::raw(rd(prec, self.lo.ln_ref()), ru(prec, self.hi.ln_ref())))
    }

    pub fn exp(&self) -> Self {
        let prec = self.prec();
        Self::raw(rd(prec, self.lo.exp_ref()), ru(prec, self.hi.exp_ref()))
    }

    /// `self ^ y` for a real exponent interval, as `exp(y ln self)`.
    ///
    /// A base touching zero is accepted when the exponent is positive.
    pub fn pow(&self, y: &Interval) -> Result<Self> {
        if self.is_positive() {
            return Ok((y * &self.ln()?).exp());
        }
        if self.is_nonnegative() && y.is_positive() {
            let prec = self.prec().max(y.prec());
            if self.hi.is_zero() {
                return Ok(Self::from_i64(0, prec));
            }
            let top = Self::point(self.hi.clone());
            let e = (y * &top.ln()?).exp();
            return Ok(Self::raw(Float::new(prec), e.hi));
        }
        Err(Error::domain("pow", format!("base {self} with exponent {y}")))
    }

    pub fn pow_rational(&self, q: &Rational) -> Result<Self> {
        if *q.denom() == 1 && *q >= 0 {
            if let Some(n) = q.numer().to_u32() {
                return Ok(self.powi(n));
            }
        }
        self.pow(&Self::from_rational(q, self.prec()))
    }

    pub fn mul_rational(&self, q: &Rational) -> Self {
        self * &Self::from_rational(q, self.prec())
    }

    pub fn div_u64(&self, n: u64) -> Self {
        self / &Self::from_integer(&Integer::from(n), self.prec())
    }

    pub fn div_integer(&self, n: &Integer) -> Self {
        self / &Self::from_integer(n, self.prec())
    }

    pub fn mul_i64(&self, n: i64) -> Self {
        self * &Self::from_i64(n, self.prec())
    }

    /// Lower end as a decimal string, rounded down.
    pub fn lo_string(&self, digits: usize) -> String {
        self.lo.to_string_radix_round(10, Some(digits), Round::Down)
    }

    /// Upper end as a decimal string, rounded up.
    pub fn hi_string(&self, digits: usize) -> String {
        self.hi.to_string_radix_round(10, Some(digits), Round::Up)
    }

    /// Number of significant decimal digits that represent the working precision.
    pub fn full_digits(&self) -> usize {
        decimal_digits(self.prec())
    }
}

pub fn decimal_digits(prec: u32) -> usize {
    (prec as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
}

/// Parses `"a/b"`, an integer, or a decimal literal with optional exponent into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::arg("empty number"));
    }
    if t.contains('/') {
        return t
            .parse::<Rational>()
            .map_err(|e| Error::arg(format!("bad rational {t:?}: {e}")));
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = t[i + 1..]
                .parse()
                .map_err(|_| Error::arg(format!("bad exponent in {t:?}")))?;
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = match mant.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mant, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::arg(format!("bad number {t:?}")));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::arg(format!("bad number {t:?}")));
    }
    let digits = format!("{int_part}{frac_part}");
    let digits = if digits.is_empty() { "0".to_string() } else { digits };
    let num: Integer = digits.parse().map_err(|_| Error::arg(format!("bad number {t:?}")))?;
    let scale = exp - frac_part.len() as i64;
    let ten = Integer::from(10);
    let mut q = Rational::from(num);
    let mag = u32::try_from(scale.unsigned_abs())
        .map_err(|_| Error::arg(format!("exponent too large in {t:?}")))?;
    let p = ten.pow(mag);
    if scale >= 0 {
        q *= p;
    } else {
        q /= p;
    }
    if neg {
        q = -q;
    }
    Ok(q)
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or_else(|| self.full_digits());
        write!(f, "[{}, {}]", self.lo_string(digits), self.hi_string(digits))
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        let prec = self.prec();
        Interval {
            lo: Float::with_val(prec, -&self.hi),
            hi: Float::with_val(prec, -&self.lo),
        }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        -&self
    }
}

impl<'a> Add<&'a Interval> for &'a Interval {
    type Output = Interval;
    fn add(self, o: &'a Interval) -> Interval {
        let prec = self.prec().max(o.prec());
        Interval::raw(rd(prec, &self.lo + &o.lo), ru(prec, &self.hi + &o.hi))
    }
}

impl<'a> Sub<&'a Interval> for &'a Interval {
    type Output = Interval;
    fn sub(self, o: &'a Interval) -> Interval {
        let prec = self.prec().max(o.prec());
        Interval::raw(rd(prec, &self.lo - &o.hi), ru(prec, &self.hi - &o.lo))
    }
}

impl<'a> Mul<&'a Interval> for &'a Interval {
    type Output = Interval;
    fn mul(self, o: &'a Interval) -> Interval {
        let prec = self.prec().max(o.prec());
        if !self.is_finite() || !o.is_finite() {
            return Interval::entire(prec);
        }
        if self.is_nonnegative() && o.is_nonnegative() {
            return Interval::raw(rd(prec, &self.lo * &o.lo), ru(prec, &self.hi * &o.hi));
        }
        let pairs = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let mut lo = rd(prec, pairs[0].0 * pairs[0].1);
        let mut hi = ru(prec, pairs[0].0 * pairs[0].1);
        for (a, b) in &pairs[1..] {
            lo = min_f(lo, rd(prec, *a * *b));
            hi = max_f(hi, ru(prec, *a * *b));
        }
        Interval::raw(lo, hi)
    }
}

impl<'a> Div<&'a Interval> for &'a Interval {
    type Output = Interval;
    /// Division; a divisor containing zero yields the entire real line.
    fn div(self, o: &'a Interval) -> Interval {
        let prec = self.prec().max(o.prec());
        if o.contains_zero() || !self.is_finite() || !o.is_finite() {
            return Interval::entire(prec);
        }
        let pairs = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let mut lo = rd(prec, pairs[0].0 / pairs[0].1);
        let mut hi = ru(prec, pairs[0].0 / pairs[0].1);
        for (a, b) in &pairs[1..] {
            lo = min_f(lo, rd(prec, *a / *b));
            hi = max_f(hi, ru(prec, *a / *b));
        }
        Interval::raw(lo, hi)
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Interval> for Interval {
            type Output = Interval;
            fn $m(self, o: Interval) -> Interval {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Interval> for Interval {
            type Output = Interval;
            fn $m(self, o: &'a Interval) -> Interval {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<Interval> for &'a Interval {
            type Output = Interval;
            fn $m(self, o: Interval) -> Interval {
                self.$m(&o)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 128;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn sqrt_of_perfect_square_is_tight() {
        let r = Interval::from_i64(4, P).sqrt().unwrap();
        assert_eq!(r.lo(), &2);
        assert_eq!(r.hi(), &2);
    }

    #[test]
    fn sqrt_three_is_two_ulp_wide() {
        let r = Interval::from_i64(3, P).sqrt().unwrap();
        let reference = q("1.7320508075688772935274463415058723669428");
        assert!(r.contains_rational(&reference));
        let ulp = Float::with_val(P, 1u32) >> (P - 1);
        assert!(r.width() <= Float::with_val(P, &ulp * 2u32));
    }

    #[test]
    fn log_one_is_zero() {
        let r = Interval::from_i64(1, P).ln().unwrap();
        assert!(r.lo().is_zero() && r.hi().is_zero());
    }

    #[test]
    fn domain_errors() {
        assert!(Interval::from_i64(-1, P).sqrt().is_err());
        assert!(Interval::from_i64(0, P).ln().is_err());
        let x = Interval::new(Float::with_val(P, -1), Float::with_val(P, 1)).unwrap();
        assert!(x.pow(&Interval::from_rational(&q("1/2"), P)).is_err());
    }

    #[test]
    fn even_power_straddling_zero() {
        let x = Interval::new(Float::with_val(P, -2), Float::with_val(P, 1)).unwrap();
        let y = x.powi(2);
        assert!(y.lo().is_zero());
        assert_eq!(y.hi(), &4);
        let z = x.powi(3);
        assert_eq!(z.lo(), &-8);
        assert_eq!(z.hi(), &1);
    }

    #[test]
    fn real_power_matches_integer_power() {
        let x = Interval::from_rational(&q("3/7"), P);
        let a = x.pow(&Interval::from_i64(5, P)).unwrap();
        let b = x.powi(5);
        assert!(a.overlaps(&b));
        assert!(a.width_f64() < 1e-30);
    }

    #[test]
    fn pow_with_zero_base() {
        let x = Interval::new(Float::with_val(P, 0), Float::with_val(P, 0.25)).unwrap();
        let y = x.pow(&Interval::from_rational(&q("1/2"), P)).unwrap();
        assert!(y.lo().is_zero());
        assert!(y.contains_rational(&q("1/2")));
    }

    #[test]
    fn division_by_interval_with_zero_is_entire() {
        let x = Interval::from_i64(1, P);
        let z = Interval::new(Float::with_val(P, -1), Float::with_val(P, 1)).unwrap();
        assert!(!(&x / &z).is_finite());
    }

    #[test]
    fn parse_literals() {
        assert_eq!(q("0.5025"), Rational::from((201, 400)));
        assert_eq!(q("1e-3"), Rational::from((1, 1000)));
        assert_eq!(q("-2.5"), Rational::from((-5, 2)));
        assert_eq!(q("4.125"), Rational::from((33, 8)));
        assert_eq!(q("3/6"), Rational::from((1, 2)));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn golden_ratio_encloses_reference() {
        let g = Interval::golden_ratio(P);
        assert!(g.contains_rational(&q("1.6180339887498948482045868343656381177203")));
        assert!(g.width_f64() < 1e-36);
    }

    #[test]
    fn rounding_to_lower_precision_is_outward() {
        let third = Interval::from_rational(&q("1/3"), 256);
        let r = third.round_to(64);
        assert!(r.contains_rational(&q("1/3")));
        assert!(third.subset_of(&r));
    }
}
