//! Benchmark workloads for the treeshift pipeline, shared by `benches/pipeline.rs`.

use criterion::{black_box, BenchmarkId, Criterion};
use treeshift::counts::{gm_step, ExactCap, GoldenCountState};
use treeshift::enumeration::{enumerate_pattern, prefix_counts, Pattern};
use treeshift::numerics::Interval;
use treeshift::poly_verify::certify_monotone;
use treeshift::simplex_map::{fixed_point, period2_orbit, Arity, MapParams};
use treeshift::strip::{general_strip_h_with, perron_enclosure, series_partial_with, strip_h_with};
use treeshift::TransitionMatrix;

pub const PREC: u32 = 256;

/// Three symbols, irreducible and not row-regular.
pub fn three_symbol() -> TransitionMatrix {
    TransitionMatrix::new(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).expect("irreducible")
}

/// Golden counts advanced exactly from level -1 to level `n`.
pub fn golden_chain(k: u32, n: i64) -> GoldenCountState {
    let mut s = GoldenCountState::initial(k).expect("k >= 2");
    while s.n() < n {
        s = gm_step(&s);
    }
    s
}

/// Tridiagonal `d x d` matrix of thin intervals with entries near 1.
pub fn perron_input(d: usize) -> Vec<Vec<Interval>> {
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let v = if i.abs_diff(j) <= 1 { 1 + (i + j) % 3 } else { 0 };
                    Interval::from_i64(v as i64, PREC)
                })
                .collect()
        })
        .collect()
}

pub fn counts(c: &mut Criterion) {
    let mut g = c.benchmark_group("counts");
    for n in [8i64, 12, 16] {
        g.bench_with_input(BenchmarkId::new("gm_step_chain_k2", n), &n, |b, &n| {
            b.iter(|| golden_chain(2, black_box(n)))
        });
    }
    g.finish();
}

pub fn strip(c: &mut Criterion) {
    let mut g = c.benchmark_group("strip");
    for k in [2u32, 4, 6] {
        g.bench_with_input(BenchmarkId::new("strip_h_n8", k), &k, |b, &k| {
            b.iter(|| strip_h_with(k, black_box(8), PREC, ExactCap::default()).expect("strip"))
        });
    }
    g.bench_function("series_k2_n20", |b| {
        b.iter(|| series_partial_with(2, black_box(20), PREC, ExactCap::default()).expect("series"))
    });
    let m = three_symbol();
    g.bench_function("general_strip_h_3x3_n5", |b| {
        b.iter(|| general_strip_h_with(&m, 2, black_box(5), PREC, ExactCap::default()).expect("strip"))
    });
    for d in [4usize, 16] {
        let input = perron_input(d);
        g.bench_with_input(BenchmarkId::new("perron_enclosure", d), &input, |b, input| {
            b.iter(|| perron_enclosure(black_box(input), PREC).expect("perron"))
        });
    }
    g.finish();
}

pub fn poly_verify(c: &mut Criterion) {
    let mut g = c.benchmark_group("poly_verify");
    g.sample_size(10);
    for k in [3u32, 5, 8] {
        g.bench_with_input(BenchmarkId::new("certify_monotone", k), &k, |b, &k| {
            b.iter(|| certify_monotone(black_box(k)).expect("certificate"))
        });
    }
    g.finish();
}

pub fn enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumeration");
    let m = TransitionMatrix::golden();
    for n in [1usize << 8, 1 << 12] {
        g.bench_with_input(BenchmarkId::new("prefix_counts_golden", n), &n, |b, &n| {
            b.iter(|| prefix_counts(&m, 2, black_box(n)).expect("prefix counts"))
        });
    }
    let ball = Pattern::ball(2, 3).expect("ball");
    g.bench_function("enumerate_ball_k2_n3", |b| {
        b.iter(|| enumerate_pattern(&m, black_box(&ball)).expect("count"))
    });
    g.finish();
}

pub fn simplex_map(c: &mut Criterion) {
    let mut g = c.benchmark_group("simplex_map");
    let two = MapParams::interval_map(Arity::Integer(2));
    g.bench_function("fixed_point_k2", |b| b.iter(|| fixed_point(black_box(&two)).expect("fixed point")));
    let six = MapParams::interval_map(Arity::Integer(6));
    g.bench_function("period2_orbit_k6", |b| b.iter(|| period2_orbit(black_box(&six)).expect("orbit")));
    g.finish();
}

pub fn benchmarks(c: &mut Criterion) {
    counts(c);
    strip(c);
    poly_verify(c);
    enumeration(c);
    simplex_map(c);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_consistent() {
        assert_eq!(golden_chain(2, 3).total(), 2306u32);
        assert_eq!(three_symbol().dim(), 3);
        let r = perron_enclosure(&perron_input(4), PREC).unwrap();
        assert!(r.is_positive());
    }
}
