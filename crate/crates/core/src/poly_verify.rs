//! Exact certificates that the hard-square strip values increase with `n`.
//!
//! With `c = (1 + s) / 2`, `s = sqrt(1 + 4 r^(k-1))`, the key quantity
//! `n_k(r) = c^(2k) - (1 + r^k)^(k-1) (c^k + 1)` splits as `A_k(r) + b_k(r) s`.
//! When `A_k < 0` on `[0, 1]`, `n_k` is negative wherever `b_k <= 0`, and elsewhere its
//! sign is opposite to the sign of `d_k = A_k^2 - b_k^2 (1 + 4 r^(k-1))`, and `d_k = q_k p_k^2` with
//! `p_k = r^(k+1) + r - 1`. A Sturm count showing `q_k > 0` on `[0, 1]` then gives
//! `n_k <= 0` with equality only at the irrational root of `p_k`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::Rational;

use crate::counts::GoldenCountState;
use crate::error::{Error, Result};
use crate::numerics::{isolate_roots, sturm_count, working_precision, Interval, RationalPolynomial as Poly};

const GOLDEN_LISTINGS: &str = include_str!("../data/golden_polys.txt");

/// `rad_free + rad_coeff * sqrt(radicand)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadicalExpr {
    pub rad_free: Poly,
    pub rad_coeff: Poly,
    pub radicand: Poly,
}

impl RadicalExpr {
    pub fn zero(radicand: Poly) -> Self {
        Self {
            rad_free: Poly::zero(),
            rad_coeff: Poly::zero(),
            radicand,
        }
    }

    pub fn eval_interval(&self, r: &Interval) -> Result<Interval> {
        let s = self.radicand.eval_interval(r).sqrt()?;
        Ok(&self.rad_free.eval_interval(r) + &(&self.rad_coeff.eval_interval(r) * &s))
    }

    fn mul(&self, o: &Self) -> Self {
        let a = &(&self.rad_free * &o.rad_free) + &(&(&self.rad_coeff * &o.rad_coeff) * &self.radicand);
        let b = &(&self.rad_free * &o.rad_coeff) + &(&self.rad_coeff * &o.rad_free);
        Self {
            rad_free: a,
            rad_coeff: b,
            radicand: self.radicand.clone(),
        }
    }

    fn pow(&self, n: u32) -> Self {
        let mut acc = Self {
            rad_free: Poly::one(),
            rad_coeff: Poly::zero(),
            radicand: self.radicand.clone(),
        };
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    fn scale_poly(&self, p: &Poly) -> Self {
        Self {
            rad_free: &self.rad_free * p,
            rad_coeff: &self.rad_coeff * p,
            radicand: self.radicand.clone(),
        }
    }

    fn sub(&self, o: &Self) -> Self {
        Self {
            rad_free: &self.rad_free - &o.rad_free,
            rad_coeff: &self.rad_coeff - &o.rad_coeff,
            radicand: self.radicand.clone(),
        }
    }
}

fn check_k(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::arg(format!("monotonicity polynomials need k >= 2, got {k}")));
    }
    Ok(())
}

/// `1 + 4 r^(k-1)`.
pub fn radicand(k: u32) -> Poly {
    &Poly::one() + &Poly::monomial(Rational::from(4), (k - 1) as usize)
}

/// `p_k(r) = r^(k+1) + r - 1`, whose root in `[0, 1]` is the fixed point of `r -> 1 / (1 + r^k)`.
pub fn fixed_point_polynomial(k: u32) -> Poly {
    &Poly::monomial(Rational::from(1), (k + 1) as usize) + &Poly::from_i64s(&[-1, 1])
}

/// Expands `n_k(r) = c^(2k) - (1 + r^k)^(k-1) (c^k + 1)` into `A_k + b_k sqrt(1 + 4 r^(k-1))`.
pub fn build_nk(k: u32) -> Result<RadicalExpr> {
    check_k(k)?;
    let half = Rational::from((1, 2));
    let c = RadicalExpr {
        rad_free: Poly::constant(half.clone()),
        rad_coeff: Poly::constant(half),
        radicand: radicand(k),
    };
    let ck = c.pow(k);
    let c2k = ck.mul(&ck);
    let v = &Poly::one() + &Poly::monomial(Rational::from(1), k as usize);
    let vk = v.pow(k - 1);
    let mut ck1 = ck.clone();
    ck1.rad_free = &ck1.rad_free + &Poly::one();
    Ok(c2k.sub(&ck1.scale_poly(&vk)))
}

/// `A^2 - b^2 * radicand`.
pub fn conjugate_square(expr: &RadicalExpr) -> Poly {
    &(&expr.rad_free * &expr.rad_free) - &(&(&expr.rad_coeff * &expr.rad_coeff) * &expr.radicand)
}

/// Certifies `A < 0` on `[0, 1]`.
///
/// That is all the sign transfer needs: where `b <= 0` both terms of `A + b s` are
/// negative, and where `b > 0` the conjugate `A - b s` is negative, so `n` and `d`
/// have opposite signs.
pub fn sign_split_check(expr: &RadicalExpr) -> Result<bool> {
    let zero = Rational::new();
    let one = Rational::from(1);
    if expr.rad_free.is_zero() {
        return Ok(false);
    }
    Ok(expr.rad_free.eval(&zero).cmp0().is_lt()
        && sturm_count(&expr.rad_free, &zero, &one)?.closed() == 0)
}

/// Polynomials in the printed normalization used by the reference listings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrintedForms {
    pub a: Poly,
    pub b: Poly,
    pub d: Poly,
    pub q: Poly,
}

/// Scale between computed and printed `A`, `b`: the `k = 3` listing factors out `1/2`.
pub fn printed_scale(k: u32) -> Rational {
    if k == 3 {
        Rational::from(2)
    } else {
        Rational::from(1)
    }
}

/// Reference listing for `k` (available for `k = 2..8`).
pub fn reference_listing(k: u32) -> Result<Option<PrintedForms>> {
    let mut found: HashMap<&str, Poly> = HashMap::new();
    for line in GOLDEN_LISTINGS.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (head, body) = line
            .split_once(':')
            .ok_or_else(|| Error::Inconsistent(format!("bad listing line {line:?}")))?;
        let mut parts = head.split_whitespace();
        let (Some(name), Some(kk)) = (parts.next(), parts.next()) else {
            return Err(Error::Inconsistent(format!("bad listing line {line:?}")));
        };
        if kk.parse::<u32>().ok() != Some(k) {
            continue;
        }
        let name = match name {
            "A" => "a",
            "b" => "b",
            "d" => "d",
            "q" => "q",
            other => return Err(Error::Inconsistent(format!("unknown listing {other:?}"))),
        };
        found.insert(name, Poly::parse_sparse(body)?);
    }
    if found.is_empty() {
        return Ok(None);
    }
    let mut take = |n: &str| {
        found
            .remove(n)
            .ok_or_else(|| Error::Inconsistent(format!("listing for k = {k} lacks {n}")))
    };
    Ok(Some(PrintedForms {
        a: take("a")?,
        b: take("b")?,
        d: take("d")?,
        q: take("q")?,
    }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityCertificate {
    pub k: u32,
    pub a_k: Poly,
    pub b_k: Poly,
    pub d_k: Poly,
    /// `d_k / p_k^2`.
    pub q_k: Poly,
    pub remainder_zero: bool,
    pub sign_split_ok: bool,
    /// Distinct roots of `q_k` in `(0, 1]`.
    pub roots_in_01: usize,
    pub value_at_0: Rational,
    /// `p_k` is monic with constant term `-1`, so its only rational root candidates are `±1`,
    /// neither of which is a root: every rational `r` has `p_k(r) != 0`.
    pub p_k_rational_root_free: bool,
    /// Levels `n = -1 ..= levels_checked` where `p_k(r_n) != 0` was also checked directly.
    pub levels_checked: i64,
    pub printed: PrintedForms,
}

impl MonotonicityCertificate {
    pub fn is_valid(&self) -> bool {
        self.remainder_zero
            && self.sign_split_ok
            && self.roots_in_01 == 0
            && self.value_at_0.cmp0().is_gt()
            && self.p_k_rational_root_free
    }

    /// Compares with the embedded reference listing; `None` when there is none for this `k`.
    pub fn matches_reference(&self) -> Result<Option<[(&'static str, bool); 4]>> {
        Ok(reference_listing(self.k)?.map(|r| {
            [
                ("A", r.a == self.printed.a),
                ("b", r.b == self.printed.b),
                ("d", r.d == self.printed.d),
                ("q", r.q == self.printed.q),
            ]
        }))
    }
}

/// Direct check of `p_k(r_n) != 0` along the exact hard-square ratios.
pub fn per_level_applicability(k: u32, levels: i64) -> Result<bool> {
    check_k(k)?;
    let p = fixed_point_polynomial(k);
    let mut s = GoldenCountState::initial(k)?;
    while s.n() <= levels {
        if p.eval(&s.ratio()).cmp0().is_eq() {
            return Ok(false);
        }
        s = s.step();
    }
    Ok(true)
}

fn rational_root_free(p: &Poly) -> bool {
    let monic_integral = p.leading().is_some_and(|l| *l == 1)
        && p.coeffs().iter().all(|c| *c.denom() == 1);
    let unit_constant = p.coeff(0) == 1 || p.coeff(0) == -1;
    monic_integral
        && unit_constant
        && !p.eval(&Rational::from(1)).cmp0().is_eq()
        && !p.eval(&Rational::from(-1)).cmp0().is_eq()
}

/// Runs the full certification pipeline for arity `k`.
pub fn certify_monotone(k: u32) -> Result<MonotonicityCertificate> {
    check_k(k)?;
    let expr = build_nk(k)?;
    let d = conjugate_square(&expr);
    let p = fixed_point_polynomial(k);
    let (q, rem) = d.div_rem(&(&p * &p))?;
    if !rem.is_zero() {
        return Err(Error::NonzeroRemainder { k });
    }
    let sign_split_ok = sign_split_check(&expr)?;
    let zero = Rational::new();
    let one = Rational::from(1);
    let roots_in_01 = sturm_count(&q.squarefree_part(), &zero, &one)?.count;
    let value_at_0 = q.eval(&zero);
    let s = printed_scale(k);
    let s2 = Rational::from(s.square_ref());
    let printed = PrintedForms {
        a: expr.rad_free.scale(&s),
        b: expr.rad_coeff.scale(&s),
        d: d.scale(&s2),
        q: q.clone(),
    };
    let levels_checked = match k {
        2..=4 => 6,
        _ => 4,
    };
    Ok(MonotonicityCertificate {
        k,
        a_k: expr.rad_free,
        b_k: expr.rad_coeff,
        d_k: d,
        q_k: q,
        remainder_zero: true,
        sign_split_ok,
        roots_in_01,
        value_at_0,
        p_k_rational_root_free: rational_root_free(&p) && per_level_applicability(k, levels_checked)?,
        levels_checked,
        printed,
    })
}

static CERT_CACHE: OnceLock<Mutex<HashMap<u32, Arc<MonotonicityCertificate>>>> = OnceLock::new();

/// [`certify_monotone`] memoized per `k`; concurrent callers may compute the same entry once each.
pub fn certify_monotone_cached(k: u32) -> Result<Arc<MonotonicityCertificate>> {
    let cache = CERT_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(c) = cache.lock().expect("cache lock").get(&k) {
        return Ok(c.clone());
    }
    let cert = Arc::new(certify_monotone(k)?);
    cache
        .lock()
        .expect("cache lock")
        .entry(k)
        .or_insert_with(|| cert.clone());
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceVerdict {
    pub k: u32,
    /// Enclosure of the root of `p_k` in `[0, 1]`.
    pub root: Interval,
    /// `T r - r`, `c r - 1`, `c^(k+1) - c^k - 1`, `c^(2k) - c^k v^(k-1) - v^(k-1)`, `p_k(r)`.
    pub residuals: [Interval; 5],
}

pub const RESIDUAL_NAMES: [&str; 5] = [
    "T(r) - r",
    "c r - 1",
    "c^(k+1) - c^k - 1",
    "c^(2k) - c^k v^(k-1) - v^(k-1)",
    "p_k(r)",
];

/// Isolates the root `r*` of `p_k` to width `1e-15` and checks that all equivalent
/// fixed-point identities hold there, by interval evaluation.
pub fn equivalences_check_with(k: u32, prec: u32) -> Result<EquivalenceVerdict> {
    check_k(k)?;
    let p = fixed_point_polynomial(k);
    let width = Rational::from((1, 1_000_000_000_000_000u64));
    let roots = isolate_roots(&p, &Rational::new(), &Rational::from(1), &width)?;
    let [(a, b)] = roots.as_slice() else {
        return Err(Error::Inconsistent(format!(
            "p_{k} has {} roots in (0, 1]",
            roots.len()
        )));
    };
    let r = Interval::new(
        Interval::from_rational(a, prec).lo().clone(),
        Interval::from_rational(b, prec).hi().clone(),
    )?;
    let one = Interval::from_i64(1, prec);
    let v = &one + &r.powi(k);
    let c = crate::strip::eigen_ratio(k, &r);
    let ck = c.powi(k);
    let vk = v.powi(k - 1);
    let residuals = [
        &v.recip() - &r,
        &(&c * &r) - &one,
        &(&c.powi(k + 1) - &ck) - &one,
        &(&c.powi(2 * k) - &(&ck * &vk)) - &vk,
        p.eval_interval(&r),
    ];
    for (name, res) in RESIDUAL_NAMES.iter().zip(&residuals) {
        if !res.contains_zero() {
            return Err(Error::Inconsistent(format!(
                "residual {name} = {res} excludes 0 at k = {k}"
            )));
        }
    }
    Ok(EquivalenceVerdict { k, root: r, residuals })
}

pub fn equivalences_check(k: u32) -> Result<EquivalenceVerdict> {
    equivalences_check_with(k, working_precision())
}

/// `lhs > rhs` is the inequality being checked.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub lhs: Interval,
    pub rhs: Interval,
}

impl Comparison {
    pub fn strict(&self) -> bool {
        self.lhs.certainly_gt(&self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EndpointVerdict {
    pub k: u32,
    /// `c(T0) > (T0)^(k-1) c(0)^k`.
    pub at_zero: Comparison,
    /// `c(T1) > (T1)^(k-1) c(1)^k`.
    pub at_one: Comparison,
    /// `(γ^k + 1) / 2 > ((γ + 1) / 2)^k`, the reduced form at `r = 1`.
    pub reduced_at_one: Comparison,
}

impl EndpointVerdict {
    pub fn holds(&self) -> bool {
        self.at_zero.strict() && self.at_one.strict() && self.reduced_at_one.strict()
    }
}

fn c_of(k: u32, r: &Interval) -> Interval {
    if k == 1 {
        return Interval::golden_ratio(r.prec());
    }
    crate::strip::eigen_ratio(k, r)
}

/// Evaluates `c(Tr) - (Tr)^(k-1) c(r)^k > 0` at `r = 0` and `r = 1`.
///
/// For `k = 1` both sides coincide identically, so the comparisons are not strict.
pub fn endpoint_checks_with(k: u32, prec: u32) -> Result<EndpointVerdict> {
    if k < 1 {
        return Err(Error::arg("endpoint checks need k >= 1"));
    }
    let one = Interval::from_i64(1, prec);
    let side = |r: &Interval| {
        let tr = (&one + &r.powi(k)).recip();
        Comparison {
            lhs: c_of(k, &tr),
            rhs: &tr.powi(k - 1) * &c_of(k, r).powi(k),
        }
    };
    let g = Interval::golden_ratio(prec);
    let reduced_at_one = Comparison {
        lhs: (&g.powi(k) + &one).div_pow2(1),
        rhs: (&g + &one).div_pow2(1).powi(k),
    };
    Ok(EndpointVerdict {
        k,
        at_zero: side(&Interval::from_i64(0, prec)),
        at_one: side(&one),
        reduced_at_one,
    })
}

pub fn endpoint_checks(k: u32) -> Result<EndpointVerdict> {
    endpoint_checks_with(k, working_precision())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeRow {
    pub r: Rational,
    pub q_value: Rational,
    /// `1 / (1 - r)^2`, the limiting profile as `k` grows.
    pub series_value: Rational,
}

/// `q_k(r)` against `1 / (1 - r)^2` at the sample points; observational only.
pub fn qk_asymptote_probe(k: u32, samples: &[Rational]) -> Result<Vec<ProbeRow>> {
    if samples.iter().any(|r| r.cmp0().is_lt() || *r >= 1) {
        return Err(Error::arg("probe samples must lie in [0, 1)"));
    }
    let cert = certify_monotone_cached(k)?;
    Ok(samples
        .iter()
        .map(|r| {
            let one_minus = Rational::from(1) - r.clone();
            ProbeRow {
                r: r.clone(),
                q_value: cert.q_k.eval(r),
                series_value: Rational::from(one_minus.square_ref()).recip(),
            }
        })
        .collect())
}

/// Sign of `n_k(r)` at a rational point, by interval evaluation of the radical form.
pub fn nk_sign_at(expr: &RadicalExpr, r: &Rational, prec: u32) -> Result<Option<std::cmp::Ordering>> {
    let x = Interval::from_rational(r, prec);
    let v = expr.eval_interval(&x)?;
    Ok(if v.is_negative() {
        Some(std::cmp::Ordering::Less)
    } else if v.is_positive() {
        Some(std::cmp::Ordering::Greater)
    } else if v.lo().is_zero() && v.hi().is_zero() {
        Some(std::cmp::Ordering::Equal)
    } else {
        None
    })
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
    fn nk_for_binary_tree() {
        let e = build_nk(2).unwrap();
        assert_eq!(e.rad_free, Poly::parse_sparse("0:-1 1:1 2:-1/2 3:-1").unwrap());
        assert_eq!(e.rad_coeff, Poly::parse_sparse("1:1 2:-1/2").unwrap());
        assert_eq!(
            conjugate_square(&e),
            Poly::from_i64s(&[1, -2, 1, -2, 2, 0, 1])
        );
    }

    #[test]
    fn nk_for_ternary_tree_matches_halved_listing() {
        let e = build_nk(3).unwrap();
        let printed = Poly::parse_sparse("0:-2 2:3 3:-6 4:9 5:-6 6:-1 8:-3").unwrap();
        assert_eq!(e.rad_free.scale(&Rational::from(2)), printed);
    }

    #[test]
    fn d4_shape() {
        let d = conjugate_square(&build_nk(4).unwrap());
        assert_eq!(d.degree(), Some(36));
        assert_eq!(d.coeff(0), 1);
        assert_eq!(d.coeff(36), 1);
        assert_eq!(d.coeff(32), 6);
    }

    #[test]
    fn zero_expression_squares_to_zero() {
        assert!(conjugate_square(&RadicalExpr::zero(radicand(3))).is_zero());
    }

    #[test]
    fn radical_form_agrees_with_direct_evaluation() {
        for k in 2..=6u32 {
            let e = build_nk(k).unwrap();
            let r = Interval::from_rational(&q("1/2"), P);
            let c = crate::strip::eigen_ratio(k, &r);
            let one = Interval::from_i64(1, P);
            let v = &one + &r.powi(k);
            let direct = &c.powi(2 * k) - &(&v.powi(k - 1) * &(&c.powi(k) + &one));
            assert!(e.eval_interval(&r).unwrap().overlaps(&direct), "k = {k}");
        }
    }

    #[test]
    fn sign_split_for_small_k() {
        for k in 2..=8 {
            assert!(sign_split_check(&build_nk(k).unwrap()).unwrap(), "k = {k}");
        }
    }

    #[test]
    fn certificates_for_two_and_three() {
        let c2 = certify_monotone(2).unwrap();
        assert_eq!(c2.q_k, Poly::one());
        assert!(c2.is_valid());
        let c3 = certify_monotone(3).unwrap();
        assert_eq!(
            c3.q_k,
            Poly::from_i64s(&[1, 2, 0, 4, 1, 0, 4, -2, 0, 0, -1])
        );
        assert!(c3.is_valid());
        assert_eq!(c3.matches_reference().unwrap().unwrap().map(|x| x.1), [true; 4]);
    }

    #[test]
    fn certificates_up_to_eight_match_listings() {
        let start = std::time::Instant::now();
        for k in 2..=8 {
            let c = certify_monotone(k).unwrap();
            assert!(c.is_valid(), "k = {k}");
            assert_eq!(c.value_at_0, 1);
            let m = c.matches_reference().unwrap().unwrap();
            assert!(m.iter().all(|x| x.1), "k = {k}: {m:?}");
        }
        assert!(start.elapsed().as_secs() < 60);
    }

    #[test]
    fn reference_listing_parses_all_k() {
        for k in 2..=8 {
            let l = reference_listing(k).unwrap().unwrap();
            assert_eq!(l.q.coeff(0), 1, "k = {k}");
        }
        assert!(reference_listing(9).unwrap().is_none());
    }

    #[test]
    fn equivalences_at_fixed_point() {
        let v = equivalences_check_with(2, P).unwrap();
        assert!(v.root.contains_rational(&q("0.6823278038280193")));
        assert!(v.root.width_f64() < 1e-15);
        assert!(v.residuals[1].contains_zero());
        assert!(equivalences_check_with(8, P).is_ok());
    }

    #[test]
    fn endpoints() {
        let v = endpoint_checks_with(2, P).unwrap();
        assert!(v.holds());
        // at r = 0: c(1) = γ against c(0)^2 = 1
        assert!(v.at_zero.lhs.overlaps(&Interval::golden_ratio(P)));
        assert!(v.at_zero.rhs.contains_rational(&q("1")));
        assert!(endpoint_checks_with(6, P).unwrap().holds());
        let k1 = endpoint_checks_with(1, P).unwrap();
        assert!(!k1.reduced_at_one.strict());
        assert!(k1.reduced_at_one.lhs.overlaps(&k1.reduced_at_one.rhs));
    }

    #[test]
    fn asymptote_probe_at_zero() {
        let rows = qk_asymptote_probe(2, &[q("0")]).unwrap();
        assert_eq!((rows[0].q_value.clone(), rows[0].series_value.clone()), (q("1"), q("1")));
        assert!(qk_asymptote_probe(2, &[q("1")]).is_err());
    }

    #[test]
    fn applicability_along_ratios() {
        assert!(per_level_applicability(2, 8).unwrap());
        assert!(rational_root_free(&fixed_point_polynomial(5)));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn nk_is_nonpositive_at_rationals(num in 0u64..=1000, k in 2u32..=4) {
            let r = Rational::from((num, 1000u64));
            let e = build_nk(k).unwrap();
            let sign = nk_sign_at(&e, &r, 256).unwrap();
            prop_assert_eq!(sign, Some(std::cmp::Ordering::Less));
        }
    }
}
