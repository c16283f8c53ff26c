//! Strip approximations `h_n = log λ_{n-1} / k^n`, the entropy series, the
//! closed-form bounds `L(k) < h < U(k)` and the cross-arity comparisons.

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::counts::{
    simplex_image_interval, simplex_map_interval, ExactCap, GeneralCountState, GoldenChain,
    GoldenCountState, RatioPoint,
};
use crate::error::{Error, Result};
use crate::matrix::TransitionMatrix;
use crate::numerics::{working_precision, Interval};
use crate::poly_verify;

const GUARD_BITS: u32 = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct StripReport {
    pub k: u32,
    pub n: u32,
    /// Enclosure of `log λ_{n-1}`; λ itself overflows any float format quickly.
    pub log_lambda: Interval,
    /// Enclosure of `λ_{n-1} / B_{n-1}^{k-1}`.
    pub eigen_ratio: Interval,
    pub h: Interval,
}

/// `c(r) = (1 + sqrt(1 + 4 r^(k-1))) / 2`, the largest root of `x^2 - x - r^(k-1)`.
pub fn eigen_ratio(k: u32, r: &Interval) -> Interval {
    let prec = r.prec();
    let one = Interval::from_i64(1, prec);
    let disc = &one + &r.powi(k - 1).mul_i64(4);
    let root = disc.sqrt().expect("discriminant is at least 1 for r >= 0");
    (&one + &root).div_pow2(1)
}

/// Enclosures of `log λ = (k-1) log B + log c(r)` and `c(r)`.
pub fn golden_lambda(k: u32, r: &Interval, log_b: &Interval) -> Result<(Interval, Interval)> {
    if k < 2 {
        return Err(Error::arg("golden_lambda needs k >= 2"));
    }
    if !r.is_nonnegative() {
        return Err(Error::domain("golden_lambda", format!("ratio {r} is not in [0, 1]")));
    }
    let c = eigen_ratio(k, r);
    let log_lambda = &log_b.mul_i64(i64::from(k - 1)) + &c.ln()?;
    Ok((log_lambda, c))
}

fn strip_from_level(k: u32, n: u32, ratio: &Interval, log_total: &Interval, prec: u32) -> Result<StripReport> {
    let (log_lambda, c) = golden_lambda(k, ratio, log_total)?;
    let h = log_lambda.div_integer(&Integer::from(k).pow(n));
    Ok(StripReport {
        k,
        n,
        log_lambda: log_lambda.round_to(prec),
        eigen_ratio: c.round_to(prec),
        h: h.round_to(prec),
    })
}

/// Strip values `h_0, ..., h_{n_max}` for the hard-square shift on the k-tree.
///
/// `h_0 = log γ` comes from the empty strip and equals the one-dimensional entropy.
pub fn strip_sequence_with(k: u32, n_max: u32, prec: u32, cap: ExactCap) -> Result<Vec<StripReport>> {
    let wp = prec + GUARD_BITS;
    GoldenChain::new(k, wp, cap)?
        .take(n_max as usize + 1)
        .enumerate()
        .map(|(n, level)| strip_from_level(k, n as u32, &level.ratio, &level.log_total, prec))
        .collect()
}

pub fn strip_sequence(k: u32, n_max: u32) -> Result<Vec<StripReport>> {
    strip_sequence_with(k, n_max, working_precision(), ExactCap::default())
}

pub fn strip_h_with(k: u32, n: u32, prec: u32, cap: ExactCap) -> Result<StripReport> {
    if n < 1 {
        return Err(Error::arg("strip entropy needs n >= 1"));
    }
    Ok(strip_sequence_with(k, n, prec, cap)?.pop().expect("nonempty"))
}

/// `h_n^(k)` for the hard-square shift, `n >= 1`.
pub fn strip_h(k: u32, n: u32) -> Result<StripReport> {
    strip_h_with(k, n, working_precision(), ExactCap::default())
}

/// `log γ`, the entropy of the one-dimensional golden-mean shift.
pub fn golden_1d_entropy(prec: u32) -> Interval {
    Interval::golden_ratio(prec + GUARD_BITS)
        .ln()
        .expect("γ > 1")
        .round_to(prec)
}

/// Partial sum of the entropy series with a rigorous enclosure of the tail.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesAccumulator {
    pub k: u32,
    pub terms_taken: u32,
    pub partial: Interval,
    /// Enclosure of the omitted terms; `partial + tail` encloses the entropy.
    pub tail: Interval,
}

impl SeriesAccumulator {
    /// Upper end of the tail enclosure.
    pub fn tail_bound(&self) -> Float {
        self.tail.hi().clone()
    }

    pub fn enclosure(&self) -> Interval {
        &self.partial + &self.tail
    }
}

fn k_power(k: u32, e: u32, prec: u32) -> Interval {
    Interval::from_integer(&Integer::from(k).pow(e), prec)
}

pub fn series_partial_with(k: u32, terms: u32, prec: u32, cap: ExactCap) -> Result<SeriesAccumulator> {
    let wp = prec + GUARD_BITS;
    let km1 = Interval::from_i64(i64::from(k) - 1, wp);
    let ln2 = Interval::ln2(wp);
    let one = Interval::from_i64(1, wp);
    let mut partial = (&km1 * &ln2).div_u64(u64::from(k));
    // terms use r_0, ..., r_{N-1}: levels 0 .. N-1 of the chain after the level -1 entry
    for (i, level) in GoldenChain::new(k, wp, cap)?.skip(1).take(terms as usize).enumerate() {
        let term = (&one + &level.ratio.powi(k)).ln()?;
        let w = &km1 / &k_power(k, i as u32 + 2, wp);
        partial = &partial + &(&w * &term);
    }
    let tail_hi = &ln2 / &k_power(k, terms + 1, wp);
    let tail = Interval::from_i64(0, wp).hull(&tail_hi);
    Ok(SeriesAccumulator {
        k,
        terms_taken: terms,
        partial: partial.round_to(prec),
        tail: tail.round_to(prec),
    })
}

/// `(k-1)/k log 2 + (k-1) sum_{i=1}^N k^-(i+1) log(1 + r_{i-1}^k)` plus tail `[0, log 2 / k^(N+1)]`.
pub fn series_partial(k: u32, terms: u32) -> Result<SeriesAccumulator> {
    series_partial_with(k, terms, working_precision(), ExactCap::default())
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundsPair {
    pub k: u32,
    pub lower: Interval,
    pub upper: Interval,
    /// The same bounds from the closed forms in `r_0` only.
    pub lower_closed: Interval,
    pub upper_closed: Interval,
}

/// `L(k) < h^(k) < U(k)` from the first two series terms, in two algebraically equal forms.
pub fn bounds_lu_with(k: u32, prec: u32) -> Result<BoundsPair> {
    if k < 2 {
        return Err(Error::arg("bounds need k >= 2"));
    }
    let wp = prec + GUARD_BITS;
    let kk = i64::from(k);
    let r0 = Interval::from_rational(&Rational::from((1, 2)), wp);
    let one = Interval::from_i64(1, wp);
    let ln2 = Interval::ln2(wp);
    let a0 = &one + &r0.powi(k);
    let r1 = a0.recip();
    let l0 = a0.ln()?;
    let l1 = (&one + &r1.powi(k)).ln()?;
    let head = ln2.mul_i64(kk - 1).div_u64(k as u64);
    let km1 = Interval::from_i64(kk - 1, wp);
    let k2 = k_power(k, 2, wp);
    let k3 = k_power(k, 3, wp);
    let second = &(&km1 / &k2) * &l0;
    let lower = &(&head + &second) + &(&(&km1 / &k3) * &l1);
    let upper = &(&head + &second) + &(&l1 / &k2);
    let big = (&one + &a0.powi(k)).ln()?;
    let lower_closed = &head + &(&(&km1 / &k3) * &big);
    let upper_closed = &(&head + &(&big / &k2)) - &(&l0 / &k2);
    if !lower.overlaps(&lower_closed) || !upper.overlaps(&upper_closed) {
        return Err(Error::Inconsistent(format!("bound forms disagree for k = {k}")));
    }
    Ok(BoundsPair {
        k,
        lower: lower.round_to(prec),
        upper: upper.round_to(prec),
        lower_closed: lower_closed.round_to(prec),
        upper_closed: upper_closed.round_to(prec),
    })
}

pub fn bounds_lu(k: u32) -> Result<BoundsPair> {
    bounds_lu_with(k, working_precision())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimIncreaseVerdict {
    pub k: u32,
    /// `2^((k-1)/k + ((k-1)/k)^3)`.
    pub lhs: Interval,
    /// `1 + x_{k-1}^(k-1)` with `x_j = 1 + 2^-j`.
    pub rhs: Interval,
    pub lower_k: Interval,
    pub upper_prev: Interval,
}

/// Certifies `2^((k-1)/k + ((k-1)/k)^3) > 1 + x_{k-1}^(k-1)` and `L(k) > U(k-1)` for `k >= 6`.
pub fn dim_increase_check_with(k: u32, prec: u32) -> Result<DimIncreaseVerdict> {
    if k < 6 {
        return Err(Error::arg(format!(
            "dimension-increase estimate applies to k >= 6, got {k}; use cross_dim_chain"
        )));
    }
    let wp = prec + GUARD_BITS;
    let a = Rational::from((k - 1, k));
    let e = &a + a.clone().pow(3);
    let lhs = Interval::from_i64(2, wp).pow_rational(&e)?;
    let x = Rational::from(1) + Rational::from((1, 2u32)).pow(k as i32 - 1);
    let rhs = Interval::from_rational(&(Rational::from(1) + x.pow(k as i32 - 1)), wp);
    let lower_k = bounds_lu_with(k, prec)?.lower;
    let upper_prev = bounds_lu_with(k - 1, prec)?.upper;
    if !lhs.certainly_gt(&rhs) {
        return Err(Error::Inconclusive(format!("estimate not separated at k = {k}: {lhs} vs {rhs}")));
    }
    if !lower_k.certainly_gt(&upper_prev) {
        return Err(Error::Inconclusive(format!(
            "L({k}) = {lower_k} not above U({}) = {upper_prev}",
            k - 1
        )));
    }
    Ok(DimIncreaseVerdict {
        k,
        lhs: lhs.round_to(prec),
        rhs: rhs.round_to(prec),
        lower_k,
        upper_prev,
    })
}

pub fn dim_increase_check(k: u32) -> Result<DimIncreaseVerdict> {
    dim_increase_check_with(k, working_precision())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainVerdict {
    pub k: u32,
    pub m: u32,
    pub n: u32,
    /// Upper bound for `h^(k)`: `log B_m / |Δ_m|`, or `log γ` when `k = 1`.
    pub upper: Interval,
    /// Lower bound for `h^(k+1)`: the strip value `h_n^(k+1)`.
    pub lower: Interval,
}

/// Certifies `h^(k) < h^(k+1)` through `upper(k, m) < h_n^(k+1) <= h^(k+1)`.
///
/// The last inequality needs the strip values for arity `k+1` to increase, which is
/// established by [`poly_verify::certify_monotone`] before comparing.
pub fn cross_dim_chain_with(k: u32, m: u32, n: u32, prec: u32) -> Result<ChainVerdict> {
    if k < 1 || n < 1 {
        return Err(Error::arg("cross_dim_chain needs k >= 1 and n >= 1"));
    }
    let cert = poly_verify::certify_monotone_cached(k + 1)?;
    if !cert.is_valid() {
        return Err(Error::CertificateFailed(format!(
            "strip monotonicity for k = {} is not certified",
            k + 1
        )));
    }
    let upper = if k == 1 {
        golden_1d_entropy(prec)
    } else {
        GoldenCountState::at_level(k, i64::from(m))?.entropy_upper_bound(prec)?
    };
    let lower = strip_h_with(k + 1, n, prec, ExactCap::default())?.h;
    if !upper.certainly_lt(&lower) {
        return Err(Error::Inconclusive(format!(
            "upper({k}, m={m}) = {upper} overlaps h_{n}^({}) = {lower}",
            k + 1
        )));
    }
    Ok(ChainVerdict { k, m, n, upper, lower })
}

pub fn cross_dim_chain(k: u32, m: u32, n: u32) -> Result<ChainVerdict> {
    cross_dim_chain_with(k, m, n, working_precision())
}

/// Encloses the Perron root of a nonnegative irreducible matrix given by entry enclosures.
///
/// An approximate Perron vector `v > 0` comes from shifted power iteration on the
/// midpoint matrix; the Collatz–Wielandt quotients `(C v)_i / v_i` then bound the root
/// from both sides for every matrix in the entry enclosures.
pub fn perron_enclosure(c: &[Vec<Interval>], prec: u32) -> Result<Interval> {
    let d = c.len();
    if d == 0 || c.iter().any(|row| row.len() != d) {
        return Err(Error::arg("Perron enclosure needs a nonempty square matrix"));
    }
    let wp = prec + 32;
    let zero = Float::new(wp);
    let entries: Vec<Vec<Interval>> = c
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| {
                    let lo = if e.lo() < &zero { zero.clone() } else { e.lo().clone() };
                    Interval::new(lo, e.hi().clone()).expect("ordered")
                })
                .collect()
        })
        .collect();
    let mid: Vec<Vec<Float>> = entries
        .iter()
        .map(|row| row.iter().map(|e| Float::with_val(wp, e.mid())).collect())
        .collect();
    let shift = mid
        .iter()
        .flatten()
        .fold(Float::with_val(wp, 1), |acc, e| if *e > acc { e.clone() } else { acc });
    let mut v = vec![Float::with_val(wp, 1); d];
    let tol = Float::with_val(wp, 1) >> (prec + 8);
    for _ in 0..20_000 {
        let mut w: Vec<Float> = (0..d)
            .map(|i| {
                let mut s = Float::with_val(wp, &shift * &v[i]);
                for j in 0..d {
                    s += Float::with_val(wp, &mid[i][j] * &v[j]);
                }
                s
            })
            .collect();
        let top = w.iter().fold(Float::new(wp), |acc, x| if *x > acc { x.clone() } else { acc });
        if top.is_zero() {
            return Err(Error::arg("matrix annihilates the positive vector"));
        }
        for x in &mut w {
            *x /= &top;
        }
        let change = w
            .iter()
            .zip(&v)
            .map(|(a, b)| Float::with_val(wp, a - b).abs())
            .fold(Float::new(wp), |acc, x| if x > acc { x } else { acc });
        v = w;
        if change < tol {
            break;
        }
    }
    if v.iter().any(|x| x.cmp0() != Some(std::cmp::Ordering::Greater)) {
        return Err(Error::NotConverged {
            iterations: 20_000,
            detail: "approximate Perron vector is not positive".into(),
        });
    }
    let mut bound: Option<Interval> = None;
    for i in 0..d {
        let mut s = Interval::from_i64(0, wp);
        for j in 0..d {
            s = &s + &(&entries[i][j] * &Interval::point(v[j].clone()));
        }
        let q = &s / &Interval::point(v[i].clone());
        bound = Some(match bound {
            None => q,
            Some(b) => Interval::new(
                if q.lo() < b.lo() { q.lo().clone() } else { b.lo().clone() },
                if q.hi() > b.hi() { q.hi().clone() } else { b.hi().clone() },
            )?,
        });
    }
    Ok(bound.expect("d >= 1"))
}

fn reduced_transfer_matrix(m: &TransitionMatrix, k: u32, r: &[Interval], prec: u32) -> Vec<Vec<Interval>> {
    let d = m.dim();
    (0..d)
        .map(|i| {
            let mut s = Interval::from_i64(0, prec);
            for j in (0..d).filter(|&j| m.get(i, j)) {
                s = &s + &r[j];
            }
            let w = s.powi(k - 1);
            (0..d)
                .map(|j| if m.get(i, j) { w.clone() } else { Interval::from_i64(0, prec) })
                .collect()
        })
        .collect()
}

fn general_chain(m: &TransitionMatrix, k: u32, levels: u32, prec: u32, cap: ExactCap) -> Result<Vec<GeneralCountState>> {
    let mut out = vec![GeneralCountState::initial(m, k, prec)?];
    for _ in 1..levels {
        let next = out.last().expect("nonempty").step(cap)?;
        out.push(next);
    }
    Ok(out)
}

fn general_strip_from_state(s: &GeneralCountState, n: u32, prec: u32) -> Result<StripReport> {
    let wp = s.prec();
    let k = s.k();
    let r = s.ratios().to_intervals(wp);
    let c = reduced_transfer_matrix(s.matrix(), k, &r, wp);
    let lam = perron_enclosure(&c, wp)?;
    let log_lambda = &s.log_mag().mul_i64(i64::from(k - 1)) + &lam.ln()?;
    let h = log_lambda.div_integer(&Integer::from(k).pow(n));
    Ok(StripReport {
        k,
        n,
        log_lambda: log_lambda.round_to(prec),
        eigen_ratio: lam.round_to(prec),
        h: h.round_to(prec),
    })
}

/// Strip values `h_1, ..., h_{n_max}` for the shift defined by `m`.
pub fn general_strip_sequence_with(
    m: &TransitionMatrix,
    k: u32,
    n_max: u32,
    prec: u32,
    cap: ExactCap,
) -> Result<Vec<StripReport>> {
    let wp = prec + GUARD_BITS;
    general_chain(m, k, n_max, wp, cap)?
        .iter()
        .enumerate()
        .map(|(i, s)| general_strip_from_state(s, i as u32 + 1, prec))
        .collect()
}

pub fn general_strip_h_with(m: &TransitionMatrix, k: u32, n: u32, prec: u32, cap: ExactCap) -> Result<StripReport> {
    if n < 1 {
        return Err(Error::arg("strip entropy needs n >= 1"));
    }
    Ok(general_strip_sequence_with(m, k, n, prec, cap)?
        .pop()
        .expect("nonempty"))
}

/// `h_n^(k)` for the shift defined by `m`, via the Perron root of the strip transfer matrix.
pub fn general_strip_h(m: &TransitionMatrix, k: u32, n: u32) -> Result<StripReport> {
    general_strip_h_with(m, k, n, working_precision(), ExactCap::default())
}

/// Box `B` with `r(i) in B` for all `i >= start` and `T(B) ⊆ B`, if one can be certified.
fn invariant_box(states: &[GeneralCountState], prec: u32) -> Option<Vec<Interval>> {
    let first = states.first()?;
    let m = first.matrix();
    let k = first.k();
    let d = m.dim();
    let pts: Vec<Vec<Interval>> = states.iter().map(|s| s.ratios().to_intervals(prec)).collect();
    let hull: Vec<Interval> = (0..d)
        .map(|j| pts.iter().skip(1).fold(pts[0][j].clone(), |acc, p| acc.hull(&p[j])))
        .collect();
    let unit = Interval::new(Float::new(prec), Float::with_val(prec, 1)).expect("unit");
    let inflations: [Option<u32>; 6] = [None, Some(60), Some(40), Some(24), Some(12), Some(6)];
    for infl in inflations {
        let b: Vec<Interval> = hull
            .iter()
            .map(|h| {
                let bx = match infl {
                    None => h.clone(),
                    Some(e) => {
                        let pad = Float::with_val(prec, h.width()) / 4u32 + (Float::with_val(prec, 1) >> e);
                        Interval::new(
                            Float::with_val(prec, h.lo() - &pad),
                            Float::with_val(prec, h.hi() + &pad),
                        )
                        .expect("ordered")
                    }
                };
                bx.intersect(&unit).unwrap_or(bx)
            })
            .collect();
        let Ok(tb) = simplex_map_interval(m, k, &b, prec) else {
            continue;
        };
        if tb.iter().zip(&b).all(|(t, bb)| t.subset_of(bb)) {
            return Some(b);
        }
    }
    None
}

/// Partial sum of `(k-1)/k log d + (k-1) sum_{i=1}^N k^-(i+1) log g_k(r(i-1))` with tail enclosure.
///
/// Each tail term has `log g_k in [(1-k) log d, log d]`; when a forward-invariant box
/// for the ratio orbit is certified, its image under `log g_k` is used instead.
pub fn general_series_with(m: &TransitionMatrix, k: u32, terms: u32, prec: u32, cap: ExactCap) -> Result<SeriesAccumulator> {
    let wp = prec + GUARD_BITS;
    let d = m.dim() as i64;
    let km1 = Interval::from_i64(i64::from(k) - 1, wp);
    let log_d = Interval::from_i64(d, wp).ln()?;
    let probe = 24u32;
    let states = general_chain(m, k, terms + probe, wp, cap)?;
    let mut partial = (&km1 * &log_d).div_u64(u64::from(k));
    for i in 1..=terms {
        let lg = states[i as usize - 1].log_g()?;
        partial = &partial + &(&(&km1 / &k_power(k, i + 1, wp)) * &lg);
    }
    let crude = Interval::new(
        log_d.mul_i64(1 - i64::from(k)).lo().clone(),
        log_d.hi().clone(),
    )?;
    let g_range = invariant_box(&states[terms as usize..], wp)
        .and_then(|b| {
            let (_, g) = simplex_image_interval(m, k, &b, wp);
            g.ln().ok()
        })
        .and_then(|lg| lg.intersect(&crude))
        .unwrap_or(crude);
    let tail = &g_range / &k_power(k, terms + 1, wp);
    Ok(SeriesAccumulator {
        k,
        terms_taken: terms,
        partial: partial.round_to(prec),
        tail: tail.round_to(prec),
    })
}

pub fn general_series(m: &TransitionMatrix, k: u32, terms: u32) -> Result<SeriesAccumulator> {
    general_series_with(m, k, terms, working_precision(), ExactCap::default())
}

/// Ratio orbit used by the general series, exposed for inspection.
pub fn general_ratio_orbit(m: &TransitionMatrix, k: u32, levels: u32, prec: u32) -> Result<Vec<RatioPoint>> {
    Ok(general_chain(m, k, levels, prec, ExactCap::default())?
        .into_iter()
        .map(|s| s.ratios().clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::parse_rational;

    const P: u32 = 128;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    fn h(k: u32, n: u32) -> Interval {
        strip_h_with(k, n, P, ExactCap::default()).unwrap().h
    }

    #[test]
    fn eigen_ratio_endpoints() {
        let c0 = eigen_ratio(2, &Interval::from_i64(0, P));
        assert!(c0.lo() == &1 && c0.hi() == &1);
        let c1 = eigen_ratio(3, &Interval::from_i64(1, P));
        assert!(c1.overlaps(&Interval::golden_ratio(P)));
    }

    #[test]
    fn first_strip_for_binary_tree() {
        let s = strip_h_with(2, 1, P, ExactCap::default()).unwrap();
        // c_0 = (1 + sqrt 3) / 2 and λ_0 = 2 c_0
        assert!((s.eigen_ratio.mid_f64() - (1.0 + 3f64.sqrt()) / 2.0).abs() < 1e-15);
        let lam = s.log_lambda.mid_f64().exp();
        assert!((lam - (1.0 + 3f64.sqrt())).abs() < 1e-14);
        assert!((s.h.mid_f64() - 0.5025263).abs() < 5e-8);
    }

    #[test]
    fn strip_values_for_binary_tree() {
        for (n, v) in [(3, 0.50866), (5, 0.508889)] {
            assert!((h(2, n).mid_f64() - v).abs() < 5e-6, "n = {n}");
        }
    }

    #[test]
    fn strip_width_is_a_few_ulp() {
        let s = strip_h(2, 5).unwrap();
        let ulp = Float::with_val(working_precision(), 1) >> working_precision();
        assert!(s.h.width() <= Float::with_val(working_precision(), &ulp * 10u32));
    }

    #[test]
    fn zeroth_strip_is_log_gamma() {
        let seq = strip_sequence_with(2, 0, P, ExactCap::default()).unwrap();
        assert!(seq[0].h.overlaps(&golden_1d_entropy(P)));
        assert!((golden_1d_entropy(P).mid_f64() - 0.4812118).abs() < 1e-7);
    }

    #[test]
    fn strip_is_increasing_and_below_log_two() {
        for k in 2..=5 {
            let seq = strip_sequence_with(k, 6, P, ExactCap::default()).unwrap();
            for w in seq.windows(2) {
                assert!(w[0].h.certainly_lt(&w[1].h), "k = {k}, n = {}", w[0].n);
                assert!(w[0].log_lambda.certainly_lt(&w[1].log_lambda));
            }
            assert!(seq.iter().all(|s| s.h.hi() <= Interval::ln2(P).hi()));
        }
    }

    #[test]
    fn series_brackets_strip_values() {
        for k in 2..=4 {
            for terms in [2u32, 5, 8] {
                let s = series_partial_with(k, terms, P, ExactCap::default()).unwrap();
                let enc = s.enclosure();
                let strip = h(k, terms + 1);
                // h_{N+1} = partial(N) + k^-(N+1) log c_N lies inside the series enclosure
                assert!(strip.subset_of(&enc), "k = {k}, N = {terms}");
                let up = GoldenCountState::at_level(k, i64::from(terms)).unwrap().entropy_upper_bound(P).unwrap();
                assert!(strip.lo() <= enc.hi() && up.hi() >= enc.lo());
            }
        }
    }

    #[test]
    fn series_tail_is_log_two_over_power() {
        let s = series_partial_with(2, 20, P, ExactCap::default()).unwrap();
        let expected = Interval::ln2(P).div_u64(1 << 21);
        assert!(Interval::point(s.tail_bound()).overlaps(&expected));
        assert!(s.enclosure().width_f64() < 1e-6);
    }

    #[test]
    fn two_term_bounds_for_binary_tree() {
        let b = bounds_lu_with(2, P).unwrap();
        let target = Interval::from_rational(&q("0.509"), P);
        assert!(b.lower.certainly_lt(&target) && target.certainly_lt(&b.upper));
        let series = series_partial_with(2, 30, P, ExactCap::default()).unwrap().enclosure();
        assert!(b.lower.certainly_lt(&series) && series.certainly_lt(&b.upper));
        for k in 2..=9 {
            let b = bounds_lu_with(k, P).unwrap();
            assert!(b.lower.overlaps(&b.lower_closed) && b.upper.overlaps(&b.upper_closed));
            assert!(b.lower.certainly_lt(&b.upper));
        }
    }

    #[test]
    fn dimension_increase_for_six() {
        let v = dim_increase_check_with(6, P).unwrap();
        assert!((v.lhs.mid_f64() - 2.6611).abs() < 1e-4);
        assert!((v.rhs.mid_f64() - 2.16633).abs() < 1e-5);
        assert!(dim_increase_check_with(7, P).is_ok());
        assert!(matches!(dim_increase_check_with(5, P), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn perron_enclosure_matches_golden_quadratic() {
        let r = Interval::from_rational(&q("1/2"), P);
        let m = TransitionMatrix::golden();
        let c = reduced_transfer_matrix(&m, 2, &[r.clone(), Interval::from_rational(&q("1/2"), P)], P);
        let lam = perron_enclosure(&c, P).unwrap();
        assert!(lam.overlaps(&eigen_ratio(2, &r)));
        assert!(lam.width_f64() < 1e-30);
    }

    #[test]
    fn perron_enclosure_handles_periodic_matrix() {
        let two = Interval::from_i64(2, P);
        let eight = Interval::from_i64(8, P);
        let z = Interval::from_i64(0, P);
        let lam = perron_enclosure(&[vec![z.clone(), two], vec![eight, z]], P).unwrap();
        assert!(lam.contains_rational(&q("4")) && lam.width_f64() < 1e-30);
    }

    #[test]
    fn general_strip_on_golden_matrix_matches_golden_pipeline() {
        let m = TransitionMatrix::golden();
        let g = general_strip_sequence_with(&m, 2, 5, P, ExactCap::default()).unwrap();
        for s in &g {
            assert!(s.h.overlaps(&h(2, s.n)), "n = {}", s.n);
        }
    }

    #[test]
    fn full_shift_strip_and_series_are_log_d() {
        for d in 2..=3usize {
            let m = TransitionMatrix::full(d).unwrap();
            let ld = Interval::from_i64(d as i64, P).ln().unwrap();
            for s in general_strip_sequence_with(&m, 3, 3, P, ExactCap::default()).unwrap() {
                assert!(s.h.overlaps(&ld) && s.h.width_f64() < 1e-30);
            }
            let ser = general_series_with(&m, 2, 6, P, ExactCap::default()).unwrap().enclosure();
            assert!(ser.overlaps(&ld) && ser.width_f64() < 1e-10);
        }
    }

    #[test]
    fn general_series_matches_golden_series() {
        let m = TransitionMatrix::golden();
        for terms in [1u32, 4, 10] {
            let a = general_series_with(&m, 2, terms, P, ExactCap::default()).unwrap().enclosure();
            let b = series_partial_with(2, terms, P, ExactCap::default()).unwrap().enclosure();
            assert!(a.overlaps(&b));
        }
    }

    #[test]
    fn three_symbol_series_width() {
        let m = TransitionMatrix::new(&[vec![1, 1, 1], vec![1, 1, 0], vec![1, 0, 0]]).unwrap();
        let s = general_series_with(&m, 2, 8, P, ExactCap::default()).unwrap();
        assert!(s.enclosure().width_f64() < 1e-2);
    }

    #[test]
    fn row_regular_matrix_has_constant_strip() {
        let m = TransitionMatrix::new(&[vec![1, 1, 0], vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        let l2 = Interval::ln2(P);
        for s in general_strip_sequence_with(&m, 2, 4, P, ExactCap::default()).unwrap() {
            assert!(s.h.overlaps(&l2), "n = {}", s.n);
        }
    }
}
