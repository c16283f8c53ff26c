//! Brute-force and exact counting of labelings on finite patterns of the `k`-ary tree.
//!
//! Nodes are numbered breadth-first, left to right: node `i > 0` has parent `(i - 1) / k`.

use std::collections::HashMap;

use rug::ops::Pow;
use rug::Integer;

use crate::counts::{exact_total, ExactCap, GeneralCountState, GoldenCountState};
use crate::error::{Error, Result};
use crate::matrix::TransitionMatrix;
use crate::numerics::{delta_size, working_precision, Interval};

pub const DEFAULT_NODE_CAP: usize = 25;
pub const DEFAULT_PREFIX_CAP: usize = 1 << 16;

/// A finite parent-closed set of tree nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    k: u32,
    /// Addresses as words over `0..k`, in breadth-first order.
    nodes: Vec<Vec<u32>>,
    /// `parents[i]` precedes `i`; the first node is the root of the pattern.
    parents: Vec<Option<usize>>,
}

impl Pattern {
    /// The first `len` nodes in breadth-first order.
    pub fn prefix(k: u32, len: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::arg("arity must be at least 1"));
        }
        let mut nodes: Vec<Vec<u32>> = Vec::with_capacity(len);
        let mut parents = Vec::with_capacity(len);
        for i in 0..len {
            if i == 0 {
                nodes.push(Vec::new());
                parents.push(None);
            } else {
                let p = (i - 1) / k as usize;
                let mut w = nodes[p].clone();
                w.push(((i - 1) % k as usize) as u32);
                nodes.push(w);
                parents.push(Some(p));
            }
        }
        Ok(Self { k, nodes, parents })
    }

    /// `Δ_n`: all nodes of depth at most `n`.
    pub fn ball(k: u32, n: u32) -> Result<Self> {
        let size = delta_size(k, n)
            .to_usize()
            .ok_or_else(|| Error::arg("ball is too large to list"))?;
        Self::prefix(k, size)
    }

    /// `Δ_n` followed by the first `j` nodes of row `n + 1`.
    pub fn ball_with_segment(k: u32, n: u32, j: usize) -> Result<Self> {
        let row = Integer::from(k).pow(n + 1);
        if row < j {
            return Err(Error::arg(format!("segment length {j} exceeds the row length {row}")));
        }
        let size = delta_size(k, n)
            .to_usize()
            .ok_or_else(|| Error::arg("pattern is too large to list"))?;
        Self::prefix(k, size + j)
    }

    /// Arbitrary pattern from addresses; every non-root address needs its parent listed earlier.
    pub fn from_addresses(k: u32, nodes: Vec<Vec<u32>>) -> Result<Self> {
        let mut index: HashMap<&[u32], usize> = HashMap::new();
        let mut parents = Vec::with_capacity(nodes.len());
        let root_len = nodes.first().map_or(0, Vec::len);
        for (i, w) in nodes.iter().enumerate() {
            if w.iter().any(|&a| a >= k) {
                return Err(Error::arg(format!("address {w:?} uses a letter outside 0..{k}")));
            }
            if index.insert(w.as_slice(), i).is_some() {
                return Err(Error::arg(format!("address {w:?} is listed twice")));
            }
            if i == 0 {
                parents.push(None);
                continue;
            }
            if w.len() <= root_len || w[..root_len] != nodes[0][..] {
                return Err(Error::arg(format!("address {w:?} is not below the first node")));
            }
            let p = *index
                .get(&w[..w.len() - 1])
                .ok_or_else(|| Error::arg(format!("parent of {w:?} is not listed before it")))?;
            parents.push(Some(p));
        }
        Ok(Self { k, nodes, parents })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Vec<u32>] {
        &self.nodes
    }

    /// Parent-child index pairs.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.parents
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|p| (p, i)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteCount {
    pub pattern: Pattern,
    pub matrix: TransitionMatrix,
    pub count: Integer,
}

/// Counts labelings `τ` with `M[τ(parent)][τ(child)] = 1` on every edge, depth first.
///
/// Once every remaining node has a labelled parent, the remaining choices are
/// independent and are multiplied out instead of enumerated.
pub fn enumerate_pattern_with(m: &TransitionMatrix, pattern: &Pattern, cap: usize) -> Result<BruteCount> {
    let n = pattern.len();
    if n > cap {
        return Err(Error::CapExceeded { nodes: n, cap });
    }
    let d = m.dim();
    let successors: Vec<Vec<usize>> = (0..d).map(|i| (0..d).filter(|&j| m.get(i, j)).collect()).collect();
    let parents = &pattern.parents;
    // first index from which every node's parent is strictly earlier than that index
    let mut free_from = n;
    while free_from > 0 && parents[free_from - 1].is_some_and(|p| p < free_from - 1) {
        let i = free_from - 1;
        if parents[i..].iter().all(|p| p.is_some_and(|p| p < i)) {
            free_from = i;
        } else {
            break;
        }
    }
    let mut labels = vec![0usize; n];
    let mut total = Integer::new();
    fn rec(
        i: usize,
        labels: &mut Vec<usize>,
        parents: &[Option<usize>],
        successors: &[Vec<usize>],
        free_from: usize,
        d: usize,
        total: &mut Integer,
    ) {
        if i == free_from {
            let mut prod = Integer::from(1);
            for p in &parents[free_from..] {
                let p = p.expect("non-root");
                prod *= successors[labels[p]].len() as u64;
            }
            *total += prod;
            return;
        }
        let choices: Vec<usize> = match parents[i] {
            None => (0..d).collect(),
            Some(p) => successors[labels[p]].clone(),
        };
        for c in choices {
            labels[i] = c;
            rec(i + 1, labels, parents, successors, free_from, d, total);
        }
    }
    if n > 0 {
        rec(0, &mut labels, parents, &successors, free_from, d, &mut total);
    } else {
        total = Integer::from(1);
    }
    Ok(BruteCount {
        pattern: pattern.clone(),
        matrix: m.clone(),
        count: total,
    })
}

pub fn enumerate_pattern(m: &TransitionMatrix, pattern: &Pattern) -> Result<BruteCount> {
    enumerate_pattern_with(m, pattern, DEFAULT_NODE_CAP)
}

/// Exact prefix counts by recursion over subtrees.
///
/// A node whose subtree meets the prefix in `h` complete levels below it plus the
/// first `m` nodes of the next level has count vector `F(h, m)` indexed by its label.
/// Only subtrees cut by the row boundary need a partial profile; complete ones are memoized.
struct PrefixCounter<'a> {
    m: &'a TransitionMatrix,
    k: u32,
    full: HashMap<u32, Vec<Integer>>,
}

impl<'a> PrefixCounter<'a> {
    fn new(m: &'a TransitionMatrix, k: u32) -> Self {
        Self {
            m,
            k,
            full: HashMap::new(),
        }
    }

    fn push(&self, child: &[Integer]) -> Vec<Integer> {
        let d = self.m.dim();
        (0..d)
            .map(|s| (0..d).filter(|&t| self.m.get(s, t)).map(|t| &child[t]).sum())
            .collect()
    }

    /// Counts for a complete subtree with `h` levels below its root.
    fn complete(&mut self, h: u32) -> Vec<Integer> {
        if let Some(v) = self.full.get(&h) {
            return v.clone();
        }
        let d = self.m.dim();
        let v = if h == 0 {
            vec![Integer::from(1); d]
        } else {
            let child = self.complete(h - 1);
            self.push(&child).into_iter().map(|x| x.pow(self.k)).collect()
        };
        self.full.insert(h, v.clone());
        v
    }

    /// `F(h, m)`: `h - 1` complete levels below the root plus `m` nodes of level `h`.
    fn partial(&mut self, h: u32, m: &Integer) -> Vec<Integer> {
        let d = self.m.dim();
        if h == 0 {
            return vec![Integer::from(1); d];
        }
        let width = Integer::from(self.k).pow(h - 1);
        let mut result = vec![Integer::from(1); d];
        let mut remaining = m.clone();
        for _ in 0..self.k {
            let take = if remaining > width { width.clone() } else { remaining.clone() };
            remaining -= &take;
            let factor = if h == 1 {
                if take == 0 {
                    continue;
                }
                self.push(&vec![Integer::from(1); d])
            } else if take == width {
                let c = self.complete(h - 1);
                self.push(&c)
            } else if take == 0 {
                let c = self.complete(h - 2);
                self.push(&c)
            } else {
                let c = self.partial(h - 1, &take);
                self.push(&c)
            };
            for (r, f) in result.iter_mut().zip(factor) {
                *r *= f;
            }
        }
        result
    }

    fn q(&mut self, n: &Integer) -> Integer {
        if *n == 0 {
            return Integer::from(1);
        }
        // smallest L with delta_size(L) >= n; then n = delta_size(L - 1) + j
        let mut level = 0u32;
        let mut below = Integer::new();
        loop {
            let next = delta_size(self.k, level);
            if next >= *n {
                break;
            }
            below = next;
            level += 1;
        }
        let j = Integer::from(n - &below);
        self.partial(level, &j).into_iter().sum()
    }
}

/// `q(n)` for a single prefix length.
pub fn prefix_count(m: &TransitionMatrix, k: u32, n: usize) -> Result<Integer> {
    if k < 1 {
        return Err(Error::arg("arity must be at least 1"));
    }
    Ok(PrefixCounter::new(m, k).q(&Integer::from(n)))
}

/// `q(1), ..., q(n_max)`: labelings of the first `n` breadth-first nodes.
pub fn prefix_counts_with(m: &TransitionMatrix, k: u32, n_max: usize, cap: usize) -> Result<Vec<Integer>> {
    if n_max > cap {
        return Err(Error::CapExceeded { nodes: n_max, cap });
    }
    if k < 1 {
        return Err(Error::arg("arity must be at least 1"));
    }
    let mut counter = PrefixCounter::new(m, k);
    Ok((1..=n_max).map(|n| counter.q(&Integer::from(n))).collect())
}

pub fn prefix_counts(m: &TransitionMatrix, k: u32, n_max: usize) -> Result<Vec<Integer>> {
    prefix_counts_with(m, k, n_max, DEFAULT_PREFIX_CAP)
}

/// The same counts by enumerating every prefix pattern.
pub fn prefix_counts_naive(m: &TransitionMatrix, k: u32, n_max: usize, cap: usize) -> Result<Vec<Integer>> {
    (1..=n_max)
        .map(|n| Ok(enumerate_pattern_with(m, &Pattern::prefix(k, n)?, cap)?.count))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntermediateRow {
    pub n: usize,
    pub q: Integer,
    /// `log q(n) / n`.
    pub estimate: Interval,
    /// Largest and smallest estimate over `n..=n_max`.
    pub tail_max: Interval,
    pub tail_min: Interval,
}

/// `log q(n) / n` with running tail extrema, finite-sample proxies for the upper and lower limits.
pub fn intermediate_estimates_with(
    m: &TransitionMatrix,
    k: u32,
    n_max: usize,
    prec: u32,
) -> Result<Vec<IntermediateRow>> {
    let q = prefix_counts(m, k, n_max)?;
    let mut rows: Vec<IntermediateRow> = q
        .into_iter()
        .enumerate()
        .map(|(i, q)| {
            let n = i + 1;
            let estimate = Interval::from_integer(&q, prec).ln()?.div_u64(n as u64);
            Ok(IntermediateRow {
                n,
                q,
                tail_max: estimate.clone(),
                tail_min: estimate.clone(),
                estimate,
            })
        })
        .collect::<Result<_>>()?;
    for i in (0..rows.len().saturating_sub(1)).rev() {
        let (head, tail) = rows.split_at_mut(i + 1);
        let next = &tail[0];
        let row = &mut head[i];
        row.tail_max = row.estimate.max(&next.tail_max);
        row.tail_min = row.estimate.min(&next.tail_min);
    }
    Ok(rows)
}

pub fn intermediate_estimates(m: &TransitionMatrix, k: u32, n_max: usize) -> Result<Vec<IntermediateRow>> {
    intermediate_estimates_with(m, k, n_max, working_precision())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitRow {
    pub j: Integer,
    /// `j = multiplier * 2^m`.
    pub multiplier: u64,
    pub i0: u32,
    pub lhs: Integer,
    /// `d^n q(c_(i0)) q(c_(i0 - 1)) prod_(t = i0)^(n-1) q(c_t)`.
    pub rhs_short: Integer,
    pub holds_short: bool,
    /// The short bound times `q(c_n)`: the product then runs over every translate
    /// `Δ_(i0), ..., Δ_n` of the decomposition, including the one of `Δ_n`.
    pub rhs: Integer,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HalfRowVerdict {
    pub n: u32,
    /// `q(c_n + 2^n)`.
    pub lhs: Integer,
    /// `d q(c_n) q(c_(n-1))`.
    pub rhs: Integer,
    pub holds: bool,
    pub split: Vec<SplitRow>,
}

fn c(n: i64) -> Integer {
    if n < 0 {
        Integer::new()
    } else {
        delta_size(2, n as u32)
    }
}

fn to_usize(x: &Integer) -> Result<usize> {
    x.to_usize().ok_or_else(|| Error::arg("prefix length does not fit in memory"))
}

/// `q(c_n + j) <= d^n q(c_(i0)) q(c_(i0 - 1)) prod_(t = i0)^(n-1) q(c_t)` for `j = mult * 2^m`,
/// `m = n - r + 1`, `mult = 1 .. 2^r - 1`, and `i0` the lowest set bit of `mult`,
/// on the binary tree with `c_n = 2^(n+1) - 1`.
///
/// Both this short form and the bound with the extra factor `q(c_n)` are evaluated;
/// the short form fails already at `n = 2`.
pub fn general_split_check(m: &TransitionMatrix, n: u32, r: u32, cap: usize) -> Result<Vec<SplitRow>> {
    if r == 0 || r > n + 1 {
        return Err(Error::arg(format!("need 1 <= r <= n + 1, got r = {r}, n = {n}")));
    }
    if r > 20 {
        return Err(Error::arg("r is too large to sample every multiplier"));
    }
    let mm = n + 1 - r;
    let d = Integer::from(m.dim());
    let mut counter = PrefixCounter::new(m, 2);
    let cn = c(i64::from(n));
    let top = Integer::from(&cn) + (Integer::from(1) << (n + 1));
    if top > cap {
        return Err(Error::CapExceeded {
            nodes: top.to_usize().unwrap_or(usize::MAX),
            cap,
        });
    }
    let mut out = Vec::new();
    for mult in 1u64..(1u64 << r) {
        let j = Integer::from(mult) << mm;
        let i0 = mult.trailing_zeros();
        let lhs = counter.q(&Integer::from(&cn + &j));
        let mut rhs = Integer::from((&d).pow(n));
        rhs *= counter.q(&c(i64::from(i0)));
        rhs *= counter.q(&c(i64::from(i0) - 1));
        for t in i0..n {
            rhs *= counter.q(&c(i64::from(t)));
        }
        let full = Integer::from(&rhs * &counter.q(&cn));
        out.push(SplitRow {
            holds_short: lhs <= rhs,
            holds: lhs <= full,
            j,
            multiplier: mult,
            i0,
            lhs,
            rhs_short: rhs,
            rhs: full,
        });
    }
    Ok(out)
}

/// `q(c_n + 2^n) <= d q(c_n) q(c_(n-1))` on the binary tree, plus the general split for
/// `r = min(n + 1, 3)`.
pub fn halfrow_bound_check_with(m: &TransitionMatrix, n: u32, cap: usize) -> Result<HalfRowVerdict> {
    if n < 1 {
        return Err(Error::arg("the half-row bound needs n >= 1"));
    }
    let cn = c(i64::from(n));
    let len = Integer::from(&cn) + (Integer::from(1) << n);
    if len > cap {
        return Err(Error::CapExceeded {
            nodes: to_usize(&len).unwrap_or(usize::MAX),
            cap,
        });
    }
    let mut counter = PrefixCounter::new(m, 2);
    let lhs = counter.q(&len);
    let rhs = Integer::from(m.dim()) * counter.q(&cn) * counter.q(&c(i64::from(n) - 1));
    let split = general_split_check(m, n, (n + 1).min(3), cap)?;
    Ok(HalfRowVerdict {
        n,
        holds: lhs <= rhs,
        lhs,
        rhs,
        split,
    })
}

pub fn halfrow_bound_check(m: &TransitionMatrix, n: u32) -> Result<HalfRowVerdict> {
    halfrow_bound_check_with(m, n, DEFAULT_PREFIX_CAP)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Magnitude {
    Exact(Integer),
    Log(Interval),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionVerdict {
    pub k: u32,
    pub n: u32,
    pub j: u32,
    /// `(k^(j(n+1)) - 1) / (k^(n+1) - 1)`.
    pub exponent: Integer,
    /// `p(j(n+1) - 1)`.
    pub lhs: Magnitude,
    /// `p(n)^exponent`.
    pub rhs: Magnitude,
    pub holds: bool,
}

const EXACT_BITS_LIMIT: u64 = 1 << 20;

enum CountSource<'a> {
    Golden,
    Matrix(&'a TransitionMatrix),
}

impl CountSource<'_> {
    fn exact(&self, k: u32, level: u32) -> Result<Integer> {
        match self {
            CountSource::Golden => Ok(GoldenCountState::at_level(k, i64::from(level))?.total()),
            CountSource::Matrix(m) => exact_total(m, k, level),
        }
    }

    fn log(&self, k: u32, level: u32, prec: u32) -> Result<Interval> {
        match self {
            CountSource::Golden => Ok(crate::counts::golden_level(k, i64::from(level), prec, ExactCap::default())?.log_total),
            CountSource::Matrix(m) => {
                let mut s = GeneralCountState::initial(m, k, prec)?;
                for _ in 0..level {
                    s = s.step(ExactCap::default())?;
                }
                Ok(s.log_mag().clone())
            }
        }
    }
}

/// `p(j(n+1) - 1) <= p(n)^((k^(j(n+1)) - 1) / (k^(n+1) - 1))`, where `p(n)` counts labelings
/// of `Δ_n`: the big ball is covered by that many disjoint translates of `Δ_n`.
///
/// Compared exactly while the right side stays below `2^20` bits, otherwise in log space.
pub fn disjoint_decomposition_check_with(
    k: u32,
    n: u32,
    j: u32,
    matrix: Option<&TransitionMatrix>,
    prec: u32,
) -> Result<DecompositionVerdict> {
    if k < 2 || j < 1 {
        return Err(Error::arg("need k >= 2 and j >= 1"));
    }
    let src = match matrix {
        None => CountSource::Golden,
        Some(m) => CountSource::Matrix(m),
    };
    let big = j
        .checked_mul(n + 1)
        .ok_or_else(|| Error::arg("level overflow"))?;
    let kk = Integer::from(k);
    let exponent = (Integer::from((&kk).pow(big)) - 1u32) / (Integer::from((&kk).pow(n + 1)) - 1u32);
    let small = src.exact(k, n)?;
    let rhs_bits = exponent
        .to_u64()
        .and_then(|e| e.checked_mul(u64::from(small.significant_bits())));
    let lhs_size_bits = delta_size(k, big - 1).to_u64();
    let exact_ok = matches!(rhs_bits, Some(b) if b <= EXACT_BITS_LIMIT)
        && matches!(lhs_size_bits, Some(b) if b <= EXACT_BITS_LIMIT);
    if exact_ok {
        let e = exponent.to_u32().expect("small exponent");
        let rhs = Integer::from((&small).pow(e));
        let lhs = src.exact(k, big - 1)?;
        return Ok(DecompositionVerdict {
            k,
            n,
            j,
            holds: lhs <= rhs,
            exponent,
            lhs: Magnitude::Exact(lhs),
            rhs: Magnitude::Exact(rhs),
        });
    }
    let lhs = src.log(k, big - 1, prec)?;
    let rhs = Interval::from_integer(&small, prec).ln()? * Interval::from_integer(&exponent, prec);
    let holds = !lhs.certainly_gt(&rhs) && (lhs.certainly_lt(&rhs) || lhs.overlaps(&rhs));
    Ok(DecompositionVerdict {
        k,
        n,
        j,
        holds,
        exponent,
        lhs: Magnitude::Log(lhs),
        rhs: Magnitude::Log(rhs),
    })
}

pub fn disjoint_decomposition_check(k: u32, n: u32, j: u32, matrix: Option<&TransitionMatrix>) -> Result<DecompositionVerdict> {
    disjoint_decomposition_check_with(k, n, j, matrix, working_precision())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn golden() -> TransitionMatrix {
        TransitionMatrix::golden()
    }

    fn ints(v: &[u64]) -> Vec<Integer> {
        v.iter().map(|&x| Integer::from(x)).collect()
    }

    #[test]
    fn pattern_order_is_breadth_first() {
        let p = Pattern::prefix(2, 4).unwrap();
        assert_eq!(p.nodes(), &[vec![], vec![0], vec![1], vec![0, 0]]);
        assert_eq!(p.edges(), vec![(0, 1), (0, 2), (1, 3)]);
        assert_eq!(Pattern::ball(3, 1).unwrap().len(), 4);
        assert_eq!(Pattern::ball_with_segment(2, 1, 2).unwrap().len(), 5);
    }

    #[test]
    fn pattern_from_addresses_requires_parents() {
        assert!(Pattern::from_addresses(2, vec![vec![], vec![1, 0]]).is_err());
        let p = Pattern::from_addresses(2, vec![vec![1], vec![1, 0], vec![1, 1], vec![1, 1, 0]]).unwrap();
        assert_eq!(p.edges(), vec![(0, 1), (0, 2), (2, 3)]);
    }

    #[test]
    fn brute_force_ball_counts() {
        let b = |k, n| enumerate_pattern(&golden(), &Pattern::ball(k, n).unwrap()).unwrap().count;
        assert_eq!(b(2, 1), 5);
        assert_eq!(b(2, 2), 41);
        let full = TransitionMatrix::full(2).unwrap();
        assert_eq!(enumerate_pattern(&full, &Pattern::ball(2, 2).unwrap()).unwrap().count, 128);
    }

    #[test]
    fn cap_is_enforced() {
        let p = Pattern::ball(2, 4).unwrap();
        assert_eq!(
            enumerate_pattern(&golden(), &p).unwrap_err(),
            Error::CapExceeded { nodes: 31, cap: 25 }
        );
        assert!(enumerate_pattern_with(&golden(), &p, 31).is_ok());
    }

    #[test]
    fn brute_force_agrees_with_recursion() {
        for (k, n) in [(2u32, 3u32), (3, 2)] {
            for level in 0..=n {
                let p = Pattern::ball(k, level).unwrap();
                let e = enumerate_pattern_with(&golden(), &p, 64).unwrap().count;
                assert_eq!(e, GoldenCountState::at_level(k, i64::from(level)).unwrap().total());
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let m = TransitionMatrix::random_irreducible(3, &mut rng).unwrap();
            for level in 0..=2 {
                let p = Pattern::ball(2, level).unwrap();
                assert_eq!(enumerate_pattern(&m, &p).unwrap().count, exact_total(&m, 2, level).unwrap());
            }
        }
    }

    #[test]
    fn prefix_counts_small() {
        let q = prefix_counts(&golden(), 2, 7).unwrap();
        assert_eq!(q[..3], ints(&[2, 3, 5]));
        assert_eq!(q[6], 41);
    }

    #[test]
    fn prefix_dp_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut ms = vec![golden(), TransitionMatrix::full(2).unwrap()];
        ms.push(TransitionMatrix::random_irreducible(3, &mut rng).unwrap());
        for m in &ms {
            let n = if m.dim() == 2 { 20 } else { 14 };
            assert_eq!(
                prefix_counts(m, 2, n).unwrap(),
                prefix_counts_naive(m, 2, n, 32).unwrap()
            );
        }
        assert_eq!(
            prefix_counts(&golden(), 3, 15).unwrap(),
            prefix_counts_naive(&golden(), 3, 15, 32).unwrap()
        );
    }

    #[test]
    fn prefix_counts_hit_ball_counts() {
        let q = prefix_counts(&golden(), 2, 255).unwrap();
        for n in 0..=7u32 {
            let c = delta_size(2, n).to_usize().unwrap();
            assert_eq!(q[c - 1], GoldenCountState::at_level(2, i64::from(n)).unwrap().total());
        }
    }

    #[test]
    fn prefix_counts_are_monotone_with_bounded_growth() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = TransitionMatrix::random_irreducible(3, &mut rng).unwrap();
        for m in [golden(), m] {
            let q = prefix_counts(&m, 2, 300).unwrap();
            for w in q.windows(2) {
                assert!(w[0] <= w[1] && w[1] <= Integer::from(&w[0] * m.dim() as u64));
            }
        }
    }

    #[test]
    fn intermediate_estimates_behave() {
        let rows = intermediate_estimates_with(&golden(), 2, 15, 128).unwrap();
        assert!((rows[6].estimate.mid_f64() - 0.5305).abs() < 1e-4);
        let l2 = Interval::ln2(128);
        assert!(rows.iter().all(|r| !r.estimate.certainly_gt(&l2)));
        assert!(rows[0].tail_max.mid_f64() >= rows[5].tail_max.mid_f64());
        let full = intermediate_estimates_with(&TransitionMatrix::full(2).unwrap(), 2, 10, 128).unwrap();
        assert!(full.iter().all(|r| r.estimate.overlaps(&l2)));
    }

    #[test]
    fn half_row_examples() {
        let v1 = halfrow_bound_check(&golden(), 1).unwrap();
        assert_eq!(v1.rhs, 20);
        assert!(v1.holds);
        let v2 = halfrow_bound_check(&golden(), 2).unwrap();
        assert_eq!(v2.rhs, 410);
        assert!(v2.holds);
        let full = halfrow_bound_check(&TransitionMatrix::full(2).unwrap(), 3).unwrap();
        assert!(full.holds);
        assert_eq!(full.lhs, Integer::from(1) << 23);
    }

    #[test]
    fn general_split_sampled() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m3 = TransitionMatrix::random_irreducible(3, &mut rng).unwrap();
        for m in [golden(), TransitionMatrix::full(2).unwrap(), m3] {
            for n in 2..=9 {
                for row in general_split_check(&m, n, 3, DEFAULT_PREFIX_CAP).unwrap() {
                    assert!(row.holds, "n = {n}, j = {}: {} > {}", row.j, row.lhs, row.rhs);
                }
            }
        }
    }

    #[test]
    fn short_split_bound_misses_a_factor() {
        let rows = general_split_check(&golden(), 2, 3, DEFAULT_PREFIX_CAP).unwrap();
        let r = rows.iter().find(|r| r.multiplier == 3).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs_short.clone()), (Integer::from(175), Integer::from(80)));
        assert!(!r.holds_short && r.holds);
    }

    #[test]
    fn decomposition_examples() {
        let v = disjoint_decomposition_check(2, 0, 2, None).unwrap();
        assert_eq!((v.lhs.clone(), v.rhs.clone()), (Magnitude::Exact(5.into()), Magnitude::Exact(8.into())));
        let v = disjoint_decomposition_check(2, 1, 2, None).unwrap();
        assert_eq!(v.lhs, Magnitude::Exact(2306.into()));
        assert_eq!(v.rhs, Magnitude::Exact(3125.into()));
        assert!(v.holds);
        let full = TransitionMatrix::full(3).unwrap();
        let v = disjoint_decomposition_check(2, 1, 3, Some(&full)).unwrap();
        assert_eq!(v.lhs, v.rhs);
        let v = disjoint_decomposition_check(3, 2, 9, None).unwrap();
        assert!(matches!(v.lhs, Magnitude::Log(_)) && v.holds);
    }
}
