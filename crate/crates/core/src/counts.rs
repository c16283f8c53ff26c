//! Labeling counts of the balls `Δ_n` of the k-tree.
//!
//! The hard-square (golden mean) shift has the two-symbol recursion
//! `B_{n+1}(0) = B_n^k`, `B_{n+1}(1) = B_n(0)^k`; a general matrix shift
//! advances the count vector by `x_i(n+1) = (M x(n))_i^k`. Both run exactly
//! with big integers and rationals while the numbers stay moderate, then
//! continue in log space with interval ratios.

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::matrix::TransitionMatrix;
use crate::numerics::{delta_size, Interval};

/// When to leave the exact regime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactCap {
    /// Last level computed with exact integers.
    pub max_level: i64,
    /// Bit budget for the largest exact integer involved.
    pub max_bits: u64,
}

impl Default for ExactCap {
    fn default() -> Self {
        Self {
            max_level: 30,
            max_bits: 1 << 22,
        }
    }
}

impl ExactCap {
    fn allows(&self, level: i64, bits: u64) -> bool {
        level <= self.max_level && bits <= self.max_bits
    }
}

fn check_arity(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::arg(format!("tree arity must be at least 2, got {k}")));
    }
    Ok(())
}

fn ln_integer(z: &Integer, prec: u32) -> Interval {
    Interval::from_integer(z, prec)
        .ln()
        .expect("counts are positive")
}

/// Exact counts of the golden-mean shift at level `n`: `b0` labelings of `Δ_n`
/// with root 0 and `b1` with root 1.
///
/// `b0` has on the order of `k^n` digits, so exact states are practical only
/// to moderate depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldenCountState {
    k: u32,
    n: i64,
    b0: Integer,
    b1: Integer,
}

impl GoldenCountState {
    /// Level `-1`, the empty tree convention `(1, 0)`.
    pub fn initial(k: u32) -> Result<Self> {
        check_arity(k)?;
        Ok(Self {
            k,
            n: -1,
            b0: Integer::from(1),
            b1: Integer::new(),
        })
    }

    pub fn at_level(k: u32, n: i64) -> Result<Self> {
        if n < -1 {
            return Err(Error::arg(format!("level must be at least -1, got {n}")));
        }
        let mut s = Self::initial(k)?;
        while s.n < n {
            s = s.step();
        }
        Ok(s)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn b0(&self) -> &Integer {
        &self.b0
    }

    pub fn b1(&self) -> &Integer {
        &self.b1
    }

    pub fn total(&self) -> Integer {
        Integer::from(&self.b0 + &self.b1)
    }

    pub fn step(&self) -> Self {
        let total = self.total();
        Self {
            k: self.k,
            n: self.n + 1,
            b0: total.pow(self.k),
            b1: Integer::from((&self.b0).pow(self.k)),
        }
    }

    /// `B_n(0) / B_n` in lowest terms.
    pub fn ratio(&self) -> Rational {
        Rational::from((self.b0.clone(), self.total()))
    }

    pub fn log_total(&self, prec: u32) -> Interval {
        ln_integer(&self.total(), prec)
    }

    /// `log B_n / |Δ_n|`, an upper bound for the entropy.
    pub fn entropy_upper_bound(&self, prec: u32) -> Result<Interval> {
        if self.n < 0 {
            return Err(Error::arg("upper bound needs level n >= 0"));
        }
        Ok(self
            .log_total(prec + 32)
            .div_integer(&delta_size(self.k, self.n as u32))
            .round_to(prec))
    }

    fn bits(&self) -> u64 {
        u64::from(self.b0.significant_bits().max(self.b1.significant_bits()))
    }
}

pub fn gm_step(s: &GoldenCountState) -> GoldenCountState {
    s.step()
}

pub fn gm_ratio(s: &GoldenCountState) -> Rational {
    s.ratio()
}

/// One level of the golden chain: exact data while it lasts, enclosures always.
#[derive(Clone, Debug)]
pub struct GoldenLevel {
    pub n: i64,
    pub exact: Option<GoldenCountState>,
    /// Enclosure of `r_n = B_n(0) / B_n`.
    pub ratio: Interval,
    /// Enclosure of `log B_n`.
    pub log_total: Interval,
}

impl GoldenLevel {
    pub fn ratio_exact(&self) -> Option<Rational> {
        self.exact.as_ref().map(GoldenCountState::ratio)
    }
}

/// Iterator over golden levels `-1, 0, 1, ...`.
#[derive(Clone, Debug)]
pub struct GoldenChain {
    k: u32,
    prec: u32,
    cap: ExactCap,
    next: Option<GoldenLevel>,
}

impl GoldenChain {
    pub fn new(k: u32, prec: u32, cap: ExactCap) -> Result<Self> {
        let s = GoldenCountState::initial(k)?;
        let level = GoldenLevel {
            n: -1,
            ratio: Interval::from_i64(1, prec),
            log_total: Interval::from_i64(0, prec),
            exact: Some(s),
        };
        Ok(Self {
            k,
            prec,
            cap,
            next: Some(level),
        })
    }

    fn advance(&self, cur: &GoldenLevel) -> GoldenLevel {
        let n = cur.n + 1;
        if let Some(s) = &cur.exact {
            if self.cap.allows(n, s.bits().saturating_mul(u64::from(self.k))) {
                let s = s.step();
                return GoldenLevel {
                    n,
                    ratio: Interval::from_rational(&s.ratio(), self.prec),
                    log_total: s.log_total(self.prec),
                    exact: Some(s),
                };
            }
        }
        let one = Interval::from_i64(1, self.prec);
        let growth = &one + &cur.ratio.powi(self.k);
        GoldenLevel {
            n,
            ratio: growth.recip(),
            log_total: &cur.log_total.mul_i64(i64::from(self.k)) + &growth.ln().expect("1 + r^k >= 1"),
            exact: None,
        }
    }
}

impl Iterator for GoldenChain {
    type Item = GoldenLevel;

    fn next(&mut self) -> Option<GoldenLevel> {
        let cur = self.next.take()?;
        self.next = Some(self.advance(&cur));
        Some(cur)
    }
}

/// Golden level `n` via the chain.
pub fn golden_level(k: u32, n: i64, prec: u32, cap: ExactCap) -> Result<GoldenLevel> {
    if n < -1 {
        return Err(Error::arg(format!("level must be at least -1, got {n}")));
    }
    Ok(GoldenChain::new(k, prec, cap)?
        .nth((n + 1) as usize)
        .expect("chain is infinite"))
}

/// A point of the probability simplex, exact or enclosed.
#[derive(Clone, Debug, PartialEq)]
pub enum RatioPoint {
    Exact(Vec<Rational>),
    Enclosure(Vec<Interval>),
}

impl RatioPoint {
    pub fn barycenter(d: usize) -> Self {
        RatioPoint::Exact(vec![Rational::from((1, d as u32)); d])
    }

    pub fn exact(entries: Vec<Rational>) -> Result<Self> {
        if entries.iter().any(|q| q.cmp0().is_lt()) {
            return Err(Error::arg("simplex point has a negative entry"));
        }
        let sum: Rational = entries.iter().sum();
        if sum != 1 {
            return Err(Error::arg(format!("simplex point sums to {sum}, not 1")));
        }
        Ok(RatioPoint::Exact(entries))
    }

    pub fn dim(&self) -> usize {
        match self {
            RatioPoint::Exact(v) => v.len(),
            RatioPoint::Enclosure(v) => v.len(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, RatioPoint::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&[Rational]> {
        match self {
            RatioPoint::Exact(v) => Some(v),
            RatioPoint::Enclosure(_) => None,
        }
    }

    pub fn to_intervals(&self, prec: u32) -> Vec<Interval> {
        match self {
            RatioPoint::Exact(v) => v.iter().map(|q| Interval::from_rational(q, prec)).collect(),
            RatioPoint::Enclosure(v) => v.clone(),
        }
    }

    fn bits(&self) -> u64 {
        match self {
            RatioPoint::Exact(v) => v
                .iter()
                .map(|q| u64::from(q.numer().significant_bits().max(q.denom().significant_bits())))
                .max()
                .unwrap_or(0),
            RatioPoint::Enclosure(_) => u64::MAX,
        }
    }
}

/// `((M r)^k, g_k(r))` exactly, with `g_k(r) = sum_j (M r)_j^k`.
pub fn simplex_image_exact(m: &TransitionMatrix, k: u32, r: &[Rational]) -> (Vec<Rational>, Rational) {
    let d = m.dim();
    let powers: Vec<Rational> = (0..d)
        .map(|i| {
            let s: Rational = (0..d).filter(|&j| m.get(i, j)).map(|j| &r[j]).sum();
            s.pow(k as i32)
        })
        .collect();
    let g: Rational = powers.iter().sum();
    (powers, g)
}

/// Interval form of [`simplex_image_exact`].
pub fn simplex_image_interval(
    m: &TransitionMatrix,
    k: u32,
    r: &[Interval],
    prec: u32,
) -> (Vec<Interval>, Interval) {
    let d = m.dim();
    let powers: Vec<Interval> = (0..d)
        .map(|i| {
            let mut s = Interval::from_i64(0, prec);
            for j in (0..d).filter(|&j| m.get(i, j)) {
                s = &s + &r[j];
            }
            s.powi(k)
        })
        .collect();
    let mut g = Interval::from_i64(0, prec);
    for y in &powers {
        g = &g + y;
    }
    (powers, g)
}

/// `T_k r = (M r)^k / g_k(r)` on enclosures, each coordinate as `1 / (1 + sum_{j != i} y_j / y_i)`.
///
/// Quotients of coordinates with identical rows in `m` are exactly 1.
pub fn simplex_map_interval(m: &TransitionMatrix, k: u32, r: &[Interval], prec: u32) -> Result<Vec<Interval>> {
    let (y, g) = simplex_image_interval(m, k, r, prec);
    if !g.is_positive() {
        return Err(Error::domain("simplex map", "g_k(r) is not certified positive"));
    }
    let zero = Interval::from_i64(0, prec);
    let one = Interval::from_i64(1, prec);
    Ok((0..y.len())
        .map(|i| {
            if y[i].is_positive() {
                let mut rest = zero.clone();
                for (j, yj) in y.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    if m.row(j) == m.row(i) {
                        rest = &rest + &one;
                    } else {
                        rest = &rest + &(yj / &y[i]);
                    }
                }
                (&one + &rest).recip()
            } else {
                let q = &y[i] / &g;
                q.intersect(&Interval::new(zero.lo().clone(), one.hi().clone()).expect("unit"))
                    .unwrap_or(q)
            }
        })
        .collect())
}

/// Count data for a general matrix shift at level `n >= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralCountState {
    matrix: TransitionMatrix,
    k: u32,
    n: u32,
    ratios: RatioPoint,
    log_mag: Interval,
}

impl GeneralCountState {
    /// Level 0: every symbol counted once, `|x(0)| = d`.
    pub fn initial(matrix: &TransitionMatrix, k: u32, prec: u32) -> Result<Self> {
        check_arity(k)?;
        let d = matrix.dim();
        Ok(Self {
            matrix: matrix.clone(),
            k,
            n: 0,
            ratios: RatioPoint::barycenter(d),
            log_mag: ln_integer(&Integer::from(d), prec),
        })
    }

    pub fn from_parts(
        matrix: &TransitionMatrix,
        k: u32,
        n: u32,
        ratios: RatioPoint,
        log_mag: Interval,
    ) -> Result<Self> {
        check_arity(k)?;
        if ratios.dim() != matrix.dim() {
            return Err(Error::arg("ratio dimension does not match the matrix"));
        }
        Ok(Self {
            matrix: matrix.clone(),
            k,
            n,
            ratios,
            log_mag,
        })
    }

    pub fn matrix(&self) -> &TransitionMatrix {
        &self.matrix
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn ratios(&self) -> &RatioPoint {
        &self.ratios
    }

    /// Enclosure of `log |x(n)|`.
    pub fn log_mag(&self) -> &Interval {
        &self.log_mag
    }

    pub fn prec(&self) -> u32 {
        self.log_mag.prec()
    }

    /// Enclosure of `log g_k(r(n))`.
    pub fn log_g(&self) -> Result<Interval> {
        let prec = self.prec();
        match &self.ratios {
            RatioPoint::Exact(r) => {
                let (_, g) = simplex_image_exact(&self.matrix, self.k, r);
                Interval::from_rational(&g, prec).ln()
            }
            RatioPoint::Enclosure(r) => simplex_image_interval(&self.matrix, self.k, r, prec).1.ln(),
        }
    }

    pub fn step(&self, cap: ExactCap) -> Result<Self> {
        let prec = self.prec();
        let n = self.n + 1;
        let log_g = self.log_g()?;
        let log_mag = &self.log_mag.mul_i64(i64::from(self.k)) + &log_g;
        let ratios = match &self.ratios {
            RatioPoint::Exact(r)
                if cap.allows(i64::from(n), self.ratios.bits().saturating_mul(u64::from(self.k))) =>
            {
                let (y, g) = simplex_image_exact(&self.matrix, self.k, r);
                if g.cmp0().is_eq() {
                    return Err(Error::domain("general step", "all-zero image vector"));
                }
                RatioPoint::Exact(y.into_iter().map(|yi| yi / &g).collect())
            }
            other => RatioPoint::Enclosure(simplex_map_interval(
                &self.matrix,
                self.k,
                &other.to_intervals(prec),
                prec,
            )?),
        };
        Ok(Self {
            matrix: self.matrix.clone(),
            k: self.k,
            n,
            ratios,
            log_mag,
        })
    }

    /// `log |x(n)| / |Δ_n|`, an upper bound for the entropy.
    pub fn entropy_upper_bound(&self) -> Interval {
        self.log_mag.div_integer(&delta_size(self.k, self.n))
    }
}

pub fn general_step(s: &GeneralCountState) -> Result<GeneralCountState> {
    s.step(ExactCap::default())
}

/// Exact count vector `x(n)` with `x(0) = (1, ..., 1)`: `x_i(n)` labelings of `Δ_n` with root `i`.
pub fn exact_counts(m: &TransitionMatrix, k: u32, n: u32) -> Result<Vec<Integer>> {
    check_arity(k)?;
    let d = m.dim();
    let mut x = vec![Integer::from(1); d];
    for _ in 0..n {
        x = (0..d)
            .map(|i| {
                let s: Integer = (0..d).filter(|&j| m.get(i, j)).map(|j| &x[j]).sum();
                s.pow(k)
            })
            .collect();
    }
    Ok(x)
}

/// Total number of labelings of `Δ_n`.
pub fn exact_total(m: &TransitionMatrix, k: u32, n: u32) -> Result<Integer> {
    Ok(exact_counts(m, k, n)?.into_iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::parse_rational;
    use proptest::prelude::*;

    const P: u32 = 128;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn initial_states() {
        let s = GoldenCountState::initial(2).unwrap();
        assert_eq!((s.b0().to_i64(), s.b1().to_i64()), (Some(1), Some(0)));
        let s = s.step();
        assert_eq!((s.b0().to_i64(), s.b1().to_i64(), s.n()), (Some(1), Some(1), 0));
        assert!(GoldenCountState::initial(1).is_err());
    }

    #[test]
    fn table_counts_for_binary_tree() {
        let s1 = GoldenCountState::at_level(2, 1).unwrap();
        assert_eq!((s1.b0().to_u64(), s1.b1().to_u64()), (Some(4), Some(1)));
        assert_eq!(s1.total(), 5);
        let s2 = gm_step(&s1);
        assert_eq!((s2.b0().to_u64(), s2.b1().to_u64()), (Some(25), Some(16)));
        let s4 = GoldenCountState::at_level(2, 4).unwrap();
        assert_eq!(s4.total(), 8_143_397);
        assert_eq!(*s4.b0(), 5_317_636);
    }

    #[test]
    fn ratios() {
        let r = |n| gm_ratio(&GoldenCountState::at_level(2, n).unwrap());
        assert_eq!(r(0), q("1/2"));
        assert_eq!(r(1), q("4/5"));
        assert_eq!(r(2), q("25/41"));
    }

    #[test]
    fn upper_bounds() {
        let s = GoldenCountState::at_level(2, 2).unwrap();
        let u = s.entropy_upper_bound(P).unwrap();
        assert!((u.mid_f64() - 41f64.ln() / 7.0).abs() < 1e-14);
        let s3 = GoldenCountState::at_level(3, 2).unwrap();
        let u3 = s3.entropy_upper_bound(P).unwrap();
        assert_eq!(s3.total(), 1241);
        assert!((u3.mid_f64() - 1241f64.ln() / 13.0).abs() < 1e-14);
        assert!(GoldenCountState::initial(2).unwrap().entropy_upper_bound(P).is_err());
    }

    #[test]
    fn full_shift_upper_bound_is_log_two() {
        let m = TransitionMatrix::full(2).unwrap();
        let mut s = GeneralCountState::initial(&m, 3, P).unwrap();
        for _ in 0..4 {
            let u = s.entropy_upper_bound();
            assert!(u.contains_float(Interval::ln2(P).lo()) && u.width_f64() < 1e-30);
            s = s.step(ExactCap::default()).unwrap();
        }
    }

    #[test]
    fn general_step_on_golden_matrix() {
        let m = TransitionMatrix::golden();
        let s = GeneralCountState::initial(&m, 2, P).unwrap();
        let s1 = general_step(&s).unwrap();
        assert_eq!(s1.ratios().as_exact().unwrap(), &[q("4/5"), q("1/5")]);
    }

    #[test]
    fn full_shift_ratios_stay_at_barycenter() {
        let m = TransitionMatrix::full(2).unwrap();
        let s = GeneralCountState::from_parts(
            &m,
            2,
            0,
            RatioPoint::exact(vec![q("1/3"), q("2/3")]).unwrap(),
            Interval::from_i64(0, P),
        )
        .unwrap();
        let s1 = general_step(&s).unwrap();
        assert_eq!(s1.ratios().as_exact().unwrap(), &[q("1/2"), q("1/2")]);
    }

    #[test]
    fn golden_and_general_ratios_agree() {
        let m = TransitionMatrix::golden();
        for k in 2..=4u32 {
            let mut g = GoldenCountState::at_level(k, 0).unwrap();
            let mut s = GeneralCountState::initial(&m, k, P).unwrap();
            for _ in 0..5 {
                assert_eq!(s.ratios().as_exact().unwrap()[0], g.ratio());
                let exact = g.log_total(P);
                assert!(s.log_mag().overlaps(&exact));
                g = g.step();
                s = general_step(&s).unwrap();
            }
        }
    }

    #[test]
    fn log_space_continuation_encloses_exact_values() {
        let exact: Vec<GoldenLevel> = GoldenChain::new(2, P, ExactCap::default())
            .unwrap()
            .take(9)
            .collect();
        let cap = ExactCap {
            max_level: 2,
            max_bits: u64::MAX,
        };
        let mixed: Vec<GoldenLevel> = GoldenChain::new(2, P, cap).unwrap().take(9).collect();
        for (a, b) in exact.iter().zip(&mixed) {
            assert_eq!(a.n, b.n);
            assert!(b.log_total.overlaps(&a.log_total));
            assert!(a.ratio.subset_of(&b.ratio));
            assert!(b.ratio.width_f64() < 1e-30);
        }
        assert!(mixed[8].exact.is_none());
    }

    #[test]
    fn exact_counts_match_golden_recursion() {
        let m = TransitionMatrix::golden();
        for n in 0..5u32 {
            let x = exact_counts(&m, 2, n).unwrap();
            let s = GoldenCountState::at_level(2, i64::from(n)).unwrap();
            assert_eq!(&x[0], s.b0());
            assert_eq!(&x[1], s.b1());
        }
    }

    proptest! {
        #[test]
        fn upper_bound_strictly_decreases_with_depth(k in 2u32..=3) {
            let mut s = GoldenCountState::at_level(k, 0).unwrap();
            let mut prev = s.entropy_upper_bound(P).unwrap();
            for _ in 0..5 {
                s = s.step();
                let u = s.entropy_upper_bound(P).unwrap();
                prop_assert!(u.certainly_lt(&prev));
                prev = u;
            }
        }

        #[test]
        fn ratio_stays_in_upper_half(k in 2u32..6, n in 0i64..6) {
            let r = GoldenCountState::at_level(k, n).unwrap().ratio();
            prop_assert!(r >= (1, 2) && r <= 1);
        }
    }
}
