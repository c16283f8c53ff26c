//! Ratio-map dynamics: the interval map `T_k x = 1 / (1 + x^k)` on `[0, 1]` and the
//! simplex map `(T_k r)_i = (M r)_i^k / g_k(r)`.

use std::cmp::Ordering;

use rug::{Float, Integer, Rational};

use crate::counts::{simplex_image_exact, simplex_map_interval, RatioPoint};
use crate::error::{Error, Result};
use crate::matrix::TransitionMatrix;
use crate::numerics::{working_precision, Interval, RationalPolynomial as Poly};

/// The exponent `k > 0` of the maps.
#[derive(Clone, Debug, PartialEq)]
pub enum Arity {
    Integer(u32),
    Rational(Rational),
    /// An enclosure of a real `k`; every statement then holds for all `k` inside.
    Interval(Interval),
}

impl Arity {
    /// Reads `7`, `41/10`, `4.125` or `1e-1`; integral values become [`Arity::Integer`].
    pub fn parse(s: &str) -> Result<Self> {
        let q = crate::numerics::parse_rational(s)?;
        Self::from_rational(q)
    }

    pub fn from_rational(q: Rational) -> Result<Self> {
        if q.cmp0() != Ordering::Greater {
            return Err(Error::arg(format!("arity must be positive, got {q}")));
        }
        if *q.denom() == 1 {
            if let Some(k) = q.numer().to_u32() {
                return Ok(Arity::Integer(k));
            }
        }
        Ok(Arity::Rational(q))
    }

    pub fn from_interval(k: Interval) -> Result<Self> {
        if !k.is_positive() {
            return Err(Error::arg(format!("arity enclosure {k} is not positive")));
        }
        Ok(Arity::Interval(k))
    }

    pub fn as_integer(&self) -> Option<u32> {
        match self {
            Arity::Integer(k) => Some(*k),
            _ => None,
        }
    }

    pub fn enclosure(&self, prec: u32) -> Interval {
        match self {
            Arity::Integer(k) => Interval::from_i64(i64::from(*k), prec),
            Arity::Rational(q) => Interval::from_rational(q, prec),
            Arity::Interval(i) => i.round_to(prec),
        }
    }

    /// `x^k` for `x >= 0`.
    fn pow(&self, x: &Interval) -> Result<Interval> {
        match self {
            Arity::Integer(k) => Ok(x.powi(*k)),
            Arity::Rational(q) => x.pow_rational(q),
            Arity::Interval(k) => x.pow(&k.round_to(x.prec())),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapParams {
    pub k: Arity,
    /// `None` selects the interval map on `[0, 1]`.
    pub matrix: Option<TransitionMatrix>,
}

impl MapParams {
    pub fn interval_map(k: Arity) -> Self {
        Self { k, matrix: None }
    }

    /// The simplex map of `m`; counting semantics need an integer arity.
    pub fn simplex(m: TransitionMatrix, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::arg("arity must be positive"));
        }
        Ok(Self {
            k: Arity::Integer(k),
            matrix: Some(m),
        })
    }

    fn require_interval_map(&self, op: &str) -> Result<()> {
        if self.matrix.is_some() {
            return Err(Error::arg(format!("{op} is defined for the interval map only")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MapPoint {
    Exact(Rational),
    Scalar(Interval),
    Simplex(RatioPoint),
}

impl MapPoint {
    pub fn to_interval(&self, prec: u32) -> Option<Interval> {
        match self {
            MapPoint::Exact(q) => Some(Interval::from_rational(q, prec)),
            MapPoint::Scalar(i) => Some(i.clone()),
            MapPoint::Simplex(_) => None,
        }
    }
}

/// `1 / (1 + x^k)` exactly.
pub fn t_exact(k: u32, x: &Rational) -> Rational {
    let xk = Rational::from(rug::ops::Pow::pow(x, k as i32));
    (xk + 1u32).recip()
}

fn unit_interval(prec: u32) -> Interval {
    Interval::new(Float::new(prec), Float::with_val(prec, 1)).expect("ordered")
}

fn t_point(k: &Arity, x: &Float) -> Result<Interval> {
    let p = Interval::point(x.clone());
    Ok((&Interval::from_i64(1, x.prec()) + &k.pow(&p)?).recip())
}

/// Enclosure of `T_k` over `x ⊆ [0, 1]`, evaluated at the endpoints since `T_k` is decreasing.
pub fn t_interval(k: &Arity, x: &Interval) -> Result<Interval> {
    if !x.subset_of(&unit_interval(x.prec())) {
        return Err(Error::domain("interval map", format!("{x} is not inside [0, 1]")));
    }
    let at_hi = t_point(k, x.hi())?;
    let at_lo = t_point(k, x.lo())?;
    Ok(at_hi.hull(&at_lo))
}

/// `T_k'(x) = -k x^(k-1) / (1 + x^k)^2`.
pub fn t_derivative(k: &Arity, x: &Interval) -> Result<Interval> {
    let prec = x.prec();
    let one = Interval::from_i64(1, prec);
    let ke = k.enclosure(prec);
    let xkm1 = match k {
        Arity::Integer(k) => x.powi(k - 1),
        _ => x.pow(&(&ke - &one))?,
    };
    let denom = (&one + &k.pow(x)?).sqr();
    Ok(-&(&(&ke * &xkm1) / &denom))
}

/// `T_k^2` over `x ⊆ [0, 1]`, increasing, so again evaluated at the endpoints.
pub fn t2_interval(k: &Arity, x: &Interval) -> Result<Interval> {
    let lo = t_interval(k, &t_point(k, x.lo())?)?;
    let hi = t_interval(k, &t_point(k, x.hi())?)?;
    Ok(lo.hull(&hi))
}

/// One application of the map selected by `params`.
pub fn apply_t(params: &MapParams, x: &MapPoint) -> Result<MapPoint> {
    apply_t_with(params, x, working_precision())
}

pub fn apply_t_with(params: &MapParams, x: &MapPoint, prec: u32) -> Result<MapPoint> {
    match (&params.matrix, x) {
        (None, MapPoint::Exact(q)) => {
            if q.cmp0().is_lt() || *q > 1 {
                return Err(Error::domain("interval map", format!("{q} is not inside [0, 1]")));
            }
            match params.k.as_integer() {
                Some(k) => Ok(MapPoint::Exact(t_exact(k, q))),
                None => Ok(MapPoint::Scalar(t_interval(&params.k, &Interval::from_rational(q, prec))?)),
            }
        }
        (None, MapPoint::Scalar(i)) => Ok(MapPoint::Scalar(t_interval(&params.k, i)?)),
        (None, MapPoint::Simplex(p)) => {
            let k = params
                .k
                .as_integer()
                .ok_or_else(|| Error::arg("the simplex map needs an integer arity"))?;
            simplex_step(&TransitionMatrix::golden(), k, p, prec).map(MapPoint::Simplex)
        }
        (Some(m), MapPoint::Simplex(p)) => {
            let k = params
                .k
                .as_integer()
                .ok_or_else(|| Error::arg("the simplex map needs an integer arity"))?;
            simplex_step(m, k, p, prec).map(MapPoint::Simplex)
        }
        (Some(_), _) => Err(Error::arg("a matrix map acts on simplex points")),
    }
}

fn simplex_step(m: &TransitionMatrix, k: u32, p: &RatioPoint, prec: u32) -> Result<RatioPoint> {
    if p.dim() != m.dim() {
        return Err(Error::arg(format!(
            "point has {} coordinates, matrix has dimension {}",
            p.dim(),
            m.dim()
        )));
    }
    match p {
        RatioPoint::Exact(r) => {
            let (y, g) = simplex_image_exact(m, k, r);
            if g.cmp0() != Ordering::Greater {
                return Err(Error::domain("simplex map", "g_k(r) = 0"));
            }
            Ok(RatioPoint::Exact(y.into_iter().map(|v| v / &g).collect()))
        }
        RatioPoint::Enclosure(r) => Ok(RatioPoint::Enclosure(simplex_map_interval(m, k, r, prec)?)),
    }
}

/// `start, T start, ..., T^steps start`.
pub fn orbit_trace(params: &MapParams, start: &MapPoint, steps: usize) -> Result<Vec<MapPoint>> {
    let prec = working_precision();
    let mut out = Vec::with_capacity(steps + 1);
    out.push(start.clone());
    for _ in 0..steps {
        let next = apply_t_with(params, out.last().expect("nonempty"), prec)?;
        out.push(next);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stability {
    Attracting,
    Repelling,
    /// `|T'(u)|` could not be separated from 1.
    Marginal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedPointReport {
    pub u: Interval,
    /// `-k u^(k+1)`.
    pub derivative: Interval,
    pub stability: Stability,
}

fn fixed_point_residual(k: &Arity, x: &Interval) -> Result<Interval> {
    let one = Interval::from_i64(1, x.prec());
    Ok(&(&k.pow(x)? * x) + &(x - &one))
}

/// Certified sign of `x^(k+1) + x - 1`, or `None` when the enclosure straddles 0.
fn residual_sign(k: &Arity, x: &Rational, prec: u32) -> Result<Option<Ordering>> {
    if let Some(kk) = k.as_integer() {
        let v = Rational::from(rug::ops::Pow::pow(x, kk as i32 + 1)) + x - 1u32;
        return Ok(Some(v.cmp0()));
    }
    let r = fixed_point_residual(k, &Interval::from_rational(x, prec))?;
    Ok(if r.is_positive() {
        Some(Ordering::Greater)
    } else if r.is_negative() {
        Some(Ordering::Less)
    } else {
        None
    })
}

/// Bisection on `u^(k+1) + u - 1` over `[0, 1]` down to `width`.
///
/// For an arity enclosure the bisection stops once midpoint signs become undecidable;
/// the bracket then encloses the fixed points for every `k` inside.
pub fn fixed_point_with(params: &MapParams, width: &Rational, prec: u32) -> Result<FixedPointReport> {
    params.require_interval_map("fixed point")?;
    if width.cmp0() != Ordering::Greater {
        return Err(Error::arg("bisection width must be positive"));
    }
    let k = &params.k;
    let mut lo = Rational::new();
    let mut hi = Rational::from(1);
    while Rational::from(&hi - &lo) > *width {
        let mid = Rational::from(&lo + &hi) / 2u32;
        match residual_sign(k, &mid, prec)? {
            Some(Ordering::Less) => lo = mid,
            Some(Ordering::Greater) => hi = mid,
            Some(Ordering::Equal) => {
                lo = mid.clone();
                hi = mid;
            }
            None => break,
        }
    }
    let u = Interval::new(
        Interval::from_rational(&lo, prec).lo().clone(),
        Interval::from_rational(&hi, prec).hi().clone(),
    )?;
    let ke = k.enclosure(prec);
    let derivative = -&(&ke * &(&Interval::from_i64(1, prec) - &u));
    let direct = -&(&ke * &(&k.pow(&u)? * &u));
    let derivative = derivative.intersect(&direct).ok_or_else(|| {
        Error::Inconsistent(format!("derivative enclosures disagree at u = {u}"))
    })?;
    let mag = derivative.abs();
    let one = Interval::from_i64(1, prec);
    let stability = if mag.certainly_lt(&one) {
        Stability::Attracting
    } else if mag.certainly_gt(&one) {
        Stability::Repelling
    } else {
        Stability::Marginal
    };
    Ok(FixedPointReport {
        u,
        derivative,
        stability,
    })
}

pub fn fixed_point(params: &MapParams) -> Result<FixedPointReport> {
    fixed_point_with(params, &Rational::from((1, 1_000_000_000_000u64)), working_precision())
}

/// `u (1 + u^k) - 1` over the enclosure `u`.
pub fn defining_residual(k: &Arity, u: &Interval) -> Result<Interval> {
    let one = Interval::from_i64(1, u.prec());
    Ok(&(u * &(&one + &k.pow(u)?)) - &one)
}

/// `g(k) = 1 + k^(k/(k+1))`, with the limit `g(0) = 2`.
pub fn g_function(k: &Interval) -> Result<Interval> {
    let prec = k.prec();
    let one = Interval::from_i64(1, prec);
    if k.is_point() && k.lo().is_zero() {
        return Ok(Interval::from_i64(2, prec));
    }
    if !k.is_positive() {
        return Err(Error::domain("g", format!("k = {k} must be positive")));
    }
    let e = k / &(k + &one);
    Ok(&one + &k.pow(&e)?)
}

/// Encloses the arity where the fixed point loses stability, the root of `g(k) = k` in `[4, 5]`.
pub fn critical_k0_with(tolerance: &Rational, prec: u32) -> Result<Interval> {
    if tolerance.cmp0() != Ordering::Greater {
        return Err(Error::arg("tolerance must be positive"));
    }
    let phi = |k: &Rational| -> Result<Interval> {
        let ki = Interval::from_rational(k, prec);
        Ok(&g_function(&ki)? - &ki)
    };
    let mut lo = Rational::from(4);
    let mut hi = Rational::from(5);
    if !phi(&lo)?.is_positive() || !phi(&hi)?.is_negative() {
        return Err(Error::Inconsistent("g(k) - k does not change sign on [4, 5]".into()));
    }
    while Rational::from(&hi - &lo) > *tolerance {
        let mid = Rational::from(&lo + &hi) / 2u32;
        let v = phi(&mid)?;
        if v.is_positive() {
            lo = mid;
        } else if v.is_negative() {
            hi = mid;
        } else {
            break;
        }
    }
    Interval::new(
        Interval::from_rational(&lo, prec).lo().clone(),
        Interval::from_rational(&hi, prec).hi().clone(),
    )
}

pub fn critical_k0(tolerance: &Rational) -> Result<Interval> {
    critical_k0_with(tolerance, working_precision())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Period2Report {
    pub p1: Interval,
    pub p2: Interval,
    pub attracting: bool,
    /// The orbit collapsed onto the attracting fixed point.
    pub merged: bool,
    pub iterations: usize,
}

/// Limits of `T^(2n) 0` and `T^(2n+1) 0`.
///
/// When the fixed point attracts, both coincide with it. Otherwise the even iterates
/// are followed to convergence and a box `X` is certified with `T^2(X) ⊆ X`,
/// `X < u` and `|(T^2)'| < 1` on `X`; then `p1 ∈ X` and `p2 ∈ T(X)`.
pub fn period2_orbit_with(params: &MapParams, max_iterations: usize, prec: u32) -> Result<Period2Report> {
    params.require_interval_map("period-2 orbit")?;
    let fp = fixed_point_with(params, &Rational::from((1, 1_000_000_000_000u64)), prec)?;
    match fp.stability {
        Stability::Attracting => {
            return Ok(Period2Report {
                p1: fp.u.clone(),
                p2: fp.u,
                attracting: true,
                merged: true,
                iterations: 0,
            })
        }
        Stability::Marginal => {
            return Err(Error::Inconclusive(format!(
                "|T'(u)| = {} cannot be separated from 1",
                fp.derivative.abs()
            )))
        }
        Stability::Repelling => {}
    }
    let k = &params.k;
    let tol = Float::with_val(prec, 1) >> (prec.saturating_sub(16));
    let mut x = Float::new(prec);
    let mut iterations = 0;
    loop {
        let next = t2_interval(k, &Interval::point(x.clone()))?.mid();
        let change = Float::with_val(prec, &next - &x).abs();
        x = next;
        iterations += 1;
        if change <= tol {
            break;
        }
        if iterations >= max_iterations {
            return Err(Error::NotConverged {
                iterations,
                detail: format!("even iterates of 0 still moving near {}", x.to_f64()),
            });
        }
    }
    let one = Interval::from_i64(1, prec);
    for shift in [prec / 2, prec / 3, prec / 4, 24, 12] {
        let r = Float::with_val(prec, 1) >> shift;
        let Ok(bx) = Interval::new(Float::with_val(prec, &x - &r), Float::with_val(prec, &x + &r)) else {
            continue;
        };
        let Some(bx) = bx.intersect(&unit_interval(prec)) else {
            continue;
        };
        if !bx.certainly_lt(&fp.u) {
            continue;
        }
        let image = t2_interval(k, &bx)?;
        if !image.subset_of(&bx) {
            continue;
        }
        let tx = t_interval(k, &bx)?;
        let slope = &t_derivative(k, &tx)? * &t_derivative(k, &bx)?;
        if !slope.abs().certainly_lt(&one) {
            continue;
        }
        if !tx.certainly_gt(&fp.u) {
            continue;
        }
        return Ok(Period2Report {
            p1: bx,
            p2: tx,
            attracting: true,
            merged: false,
            iterations,
        });
    }
    Err(Error::CertificateFailed(format!(
        "no contracting box around the 2-cycle point near {}",
        x.to_f64()
    )))
}

pub fn period2_orbit(params: &MapParams) -> Result<Period2Report> {
    period2_orbit_with(params, 1_000_000, working_precision())
}

/// `T[0, p1] ⊆ [p2, 1]` and `T[p2, 1] ⊆ [1/2, p1]` on the reported enclosures.
pub fn ordering_ladder_holds(k: &Arity, report: &Period2Report) -> Result<bool> {
    let prec = report.p1.prec();
    let zero = Float::new(prec);
    let one = Float::with_val(prec, 1);
    let left = Interval::new(zero, report.p1.hi().clone())?;
    let right = Interval::new(report.p2.lo().clone(), one.clone())?;
    let left_target = Interval::new(report.p2.lo().clone(), one.clone())?;
    let right_target = Interval::new(Float::with_val(prec, 0.5), report.p1.hi().clone())?;
    Ok(t_interval(k, &left)?.subset_of(&left_target) && t_interval(k, &right)?.subset_of(&right_target))
}

/// Sampled basin check: every start `i / grid`, `0 <= i <= grid`, away from the fixed point
/// comes within `1e-8` of the reported orbit after `steps` applications of `T^2`.
///
/// Observational only; the inflection certificate carries the proof route.
pub fn sampled_basin_check(k: &Arity, report: &Period2Report, grid: u32, steps: usize) -> Result<bool> {
    let prec = report.p1.prec();
    let fp = fixed_point_with(&MapParams::interval_map(k.clone()), &Rational::from((1, 1u64 << 40)), prec)?;
    let eps = 1e-8;
    let targets = [report.p1.mid_f64(), report.p2.mid_f64()];
    let kf = k.enclosure(prec).mid_f64();
    for i in 0..=grid {
        let x0 = Rational::from((i, grid.max(1)));
        let xi = Interval::from_rational(&x0, prec);
        if !report.merged && xi.overlaps(&fp.u) {
            continue;
        }
        let mut xf = x0.to_f64();
        for _ in 0..steps {
            let t = 1.0 / (1.0 + xf.powf(kf));
            xf = 1.0 / (1.0 + t.powf(kf));
        }
        if targets.iter().all(|t| (xf - t).abs() > eps) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq)]
pub struct InflectionCertificate {
    pub k: u32,
    /// `j(y) = (k^2 - 1) y + (k - 1) + (k - 1)(y + 1)^k - (k^2 + 1) y (y + 1)^k`.
    pub j: Poly,
    pub constant: Rational,
    pub linear: Rational,
    /// Coefficients of `y^2 .. y^(k+1)` all negative.
    pub higher_negative: bool,
    /// Those coefficients equal `(k-1) C(k, i) - (k^2+1) C(k, i-1)`.
    pub matches_binomial_formula: bool,
    /// Sign changes in the coefficient sequence; one change means exactly one positive root.
    pub sign_changes: usize,
}

impl InflectionCertificate {
    pub fn unique_positive_root(&self) -> bool {
        self.constant.cmp0().is_gt() && self.linear.cmp0().is_gt() && self.higher_negative && self.sign_changes == 1
    }
}

fn binomial(n: u32, r: u32) -> Integer {
    if r > n {
        Integer::new()
    } else {
        Integer::from(Integer::binomial_u(n, r))
    }
}

/// Expands the polynomial governing the inflection points of `T_k^2` and checks its sign pattern.
pub fn inflection_certificate(k: u32) -> Result<InflectionCertificate> {
    if k < 3 {
        return Err(Error::arg(format!("inflection certificate needs k >= 3, got {k}")));
    }
    let ki = i64::from(k);
    let y = Poly::x();
    let yk = Poly::from_i64s(&[1, 1]).pow(k);
    let j = &(&Poly::from_i64s(&[ki - 1, ki * ki - 1]) + &yk.scale(&Rational::from(ki - 1)))
        - &(&y * &yk).scale(&Rational::from(ki * ki + 1));
    let constant = j.coeff(0);
    let linear = j.coeff(1);
    let higher_negative = (2..=k as usize + 1).all(|i| j.coeff(i).cmp0().is_lt());
    let matches_binomial_formula = (2..=k + 1).all(|i| {
        let f = Integer::from(ki - 1) * binomial(k, i) - Integer::from(ki * ki + 1) * binomial(k, i - 1);
        j.coeff(i as usize) == f
    });
    let mut sign_changes = 0;
    let mut last = Ordering::Equal;
    for c in j.coeffs() {
        let s = c.cmp0();
        if s == Ordering::Equal {
            continue;
        }
        if last != Ordering::Equal && s != last {
            sign_changes += 1;
        }
        last = s;
    }
    let cert = InflectionCertificate {
        k,
        j,
        constant,
        linear,
        higher_negative,
        matches_binomial_formula,
        sign_changes,
    };
    if !cert.unique_positive_root() || !cert.matches_binomial_formula {
        return Err(Error::CertificateFailed(format!(
            "inflection polynomial for k = {k} has an unexpected sign pattern: {}",
            cert.j
        )));
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counts::GoldenCountState;
    use proptest::prelude::*;

    const P: u32 = 128;

    fn q(s: &str) -> Rational {
        crate::numerics::parse_rational(s).unwrap()
    }

    fn golden(k: u32) -> MapParams {
        MapParams::interval_map(Arity::Integer(k))
    }

    #[test]
    fn endpoints_of_binary_map() {
        assert_eq!(t_exact(2, &q("0")), 1);
        assert_eq!(t_exact(2, &q("1")), q("1/2"));
        let p = golden(2);
        assert_eq!(apply_t(&p, &MapPoint::Exact(q("0"))).unwrap(), MapPoint::Exact(q("1")));
    }

    #[test]
    fn simplex_example() {
        let p = MapParams::simplex(TransitionMatrix::golden(), 2).unwrap();
        let x = MapPoint::Simplex(RatioPoint::barycenter(2));
        let img = apply_t(&p, &x).unwrap();
        assert_eq!(img, MapPoint::Simplex(RatioPoint::Exact(vec![q("4/5"), q("1/5")])));
    }

    #[test]
    fn full_shift_orbit_stays_at_barycenter() {
        let p = MapParams::simplex(TransitionMatrix::full(3).unwrap(), 3).unwrap();
        let o = orbit_trace(&p, &MapPoint::Simplex(RatioPoint::barycenter(3)), 5).unwrap();
        assert!(o.iter().all(|x| *x == MapPoint::Simplex(RatioPoint::barycenter(3))));
    }

    #[test]
    fn golden_orbit_from_half() {
        let o = orbit_trace(&golden(2), &MapPoint::Exact(q("1/2")), 3).unwrap();
        let want = ["1/2", "4/5", "25/41", "1681/2306"].map(|s| MapPoint::Exact(q(s)));
        assert_eq!(o, want);
    }

    #[test]
    fn fixed_point_for_binary_map() {
        let f = fixed_point(&golden(2)).unwrap();
        assert!(f.u.width_f64() <= 1e-12);
        assert!((f.u.mid_f64() - 0.682328).abs() < 1e-6);
        assert!((f.derivative.mid_f64() + 0.635345).abs() < 1e-6);
        assert_eq!(f.stability, Stability::Attracting);
        let t = t_interval(&Arity::Integer(2), &f.u).unwrap();
        assert!(t.overlaps(&f.u));
        let res = defining_residual(&Arity::Integer(2), &f.u).unwrap();
        assert!(res.lo().to_f64() >= -1e-10 && res.hi().to_f64() <= 1e-10);
    }

    #[test]
    fn stability_dichotomy() {
        for k in 2..=4 {
            assert_eq!(fixed_point(&golden(k)).unwrap().stability, Stability::Attracting, "k = {k}");
        }
        for k in 5..=8 {
            assert_eq!(fixed_point(&golden(k)).unwrap().stability, Stability::Repelling, "k = {k}");
        }
    }

    #[test]
    fn rational_arity_fixed_point() {
        let k = Arity::parse("9/2").unwrap();
        let f = fixed_point(&MapParams::interval_map(k.clone())).unwrap();
        assert_eq!(f.stability, Stability::Repelling);
        assert!(defining_residual(&k, &f.u).unwrap().contains_zero());
    }

    #[test]
    fn arity_enclosure_near_k0_is_marginal() {
        let k0 = critical_k0_with(&q("1/1000"), P).unwrap();
        let f = fixed_point_with(
            &MapParams::interval_map(Arity::from_interval(k0).unwrap()),
            &q("1/1000000"),
            P,
        )
        .unwrap();
        assert_eq!(f.stability, Stability::Marginal);
    }

    #[test]
    fn g_values() {
        let g5 = g_function(&Interval::from_i64(5, P)).unwrap();
        assert!((g5.mid_f64() - 4.82362).abs() < 1e-5);
        assert_eq!(g_function(&Interval::from_i64(0, P)).unwrap(), Interval::from_i64(2, P));
    }

    #[test]
    fn k0_bracket() {
        let k0 = critical_k0_with(&q("1/1000"), P).unwrap();
        assert!(k0.width_f64() <= 1e-3);
        assert!(k0.lo().to_f64() > 4.0 && k0.hi().to_f64() < 5.0);
        let tight = critical_k0_with(&q("1/1000000000"), P).unwrap();
        assert!((tight.mid_f64() - 4.14104).abs() < 1e-5);
    }

    #[test]
    fn period_two_merged_below_k0() {
        for k in 2..=4 {
            let r = period2_orbit(&golden(k)).unwrap();
            assert!(r.merged && r.attracting && r.p1 == r.p2, "k = {k}");
            assert!(sampled_basin_check(&Arity::Integer(k), &r, 64, 2000).unwrap(), "k = {k}");
        }
    }

    #[test]
    fn period_two_distinct_above_k0() {
        for k in 5..=8 {
            let r = period2_orbit(&golden(k)).unwrap();
            let u = fixed_point(&golden(k)).unwrap().u;
            assert!(!r.merged && r.attracting, "k = {k}");
            assert!(r.p1.certainly_lt(&u) && r.p2.certainly_gt(&u));
            let a = Arity::Integer(k);
            assert!(t_interval(&a, &r.p1).unwrap().subset_of(&r.p2));
            assert!(t2_interval(&a, &r.p1).unwrap().subset_of(&r.p1));
            assert!(ordering_ladder_holds(&a, &r).unwrap());
            assert!(sampled_basin_check(&a, &r, 64, 2000).unwrap(), "k = {k}");
        }
    }

    #[test]
    fn matrix_map_refuses_scalar_operations() {
        let p = MapParams::simplex(TransitionMatrix::golden(), 2).unwrap();
        assert!(fixed_point(&p).is_err());
        assert!(apply_t(&p, &MapPoint::Exact(q("1/2"))).is_err());
    }

    #[test]
    fn inflection_k3() {
        let c = inflection_certificate(3).unwrap();
        assert_eq!(c.j.coeff(2), -24);
        assert_eq!(c.constant, 4);
        assert_eq!(c.linear, 4);
        assert!(inflection_certificate(7).unwrap().higher_negative);
        assert!(inflection_certificate(2).is_err());
    }

    #[test]
    fn inflection_matches_unexpanded_form() {
        for k in 3..=10u32 {
            let c = inflection_certificate(k).unwrap();
            let kk = i64::from(k);
            for y in ["0", "1/3", "2", "7/5"] {
                let y = q(y);
                let s = rug::ops::Pow::pow(Rational::from(&y + 1u32), k as i32);
                let direct = Rational::from(kk * kk) * &y * (Rational::from(1) - &s) - &y + kk
                    + (Rational::from(kk) - &y) * &s
                    - 1u32
                    - &s;
                assert_eq!(c.j.eval(&y), direct, "k = {k}");
            }
        }
    }

    #[test]
    fn orbit_from_half_matches_count_ratios() {
        for k in 2..=4 {
            let o = orbit_trace(&golden(k), &MapPoint::Exact(q("1/2")), 6).unwrap();
            let mut s = GoldenCountState::at_level(k, 0).unwrap();
            for x in o {
                assert_eq!(x, MapPoint::Exact(s.ratio()));
                s = s.step();
            }
        }
    }

    proptest! {
        #[test]
        fn interval_map_is_decreasing(a in 0u32..=1000, b in 0u32..=1000, k in 1u32..9) {
            prop_assume!(a < b);
            let x1 = Rational::from((a, 1000u32));
            let x2 = Rational::from((b, 1000u32));
            prop_assert!(t_exact(k, &x1) > t_exact(k, &x2));
        }

        #[test]
        fn interval_image_encloses_exact_image(a in 0u32..=1000, num in 1u32..80, k in 1u32..9) {
            let x = Rational::from((a, 1000u32));
            let img = t_interval(&Arity::Integer(k), &Interval::from_rational(&x, 96)).unwrap();
            prop_assert!(img.contains_rational(&t_exact(k, &x)));
            let kr = Arity::from_rational(Rational::from((num, 10u32))).unwrap();
            let v = t_interval(&kr, &Interval::from_rational(&x, 96)).unwrap();
            prop_assert!(v.is_positive() && v.hi().to_f64() <= 1.0);
        }

        #[test]
        fn derivative_identity_at_fixed_point(k in 2u32..9) {
            let f = fixed_point_with(&golden(k), &q("1/1000000000000"), 128).unwrap();
            let a = Interval::from_i64(-i64::from(k), 128);
            let alt = &a * &(&Interval::from_i64(1, 128) - &f.u);
            prop_assert!(alt.overlaps(&f.derivative));
        }
    }
}
