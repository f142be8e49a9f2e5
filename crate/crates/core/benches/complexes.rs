//! Serial against data-parallel execution of the heavy builders.
//!
//! Strata presentations are memoized process-wide, so after the first sample
//! both modes measure the same work: enumeration, block projectors,
//! differentials and the S_4 averaging.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ftmbar::feynman::build_co_complex;
use ftmbar::modgraph::enumerate_stable;
use ftmbar::par;
use ftmbar::verify14::build_q_complex;

const MODES: [(&str, bool); 2] = [("serial", false), ("parallel", true)];

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_stable_1_4_r3");
    for (name, on) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            par::set_parallel(on);
            b.iter(|| enumerate_stable(1, 4, 3, true).len())
        });
    }
    group.finish();
}

fn complexes(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_co_complex");
    group.sample_size(10);
    for (g, n) in [(0, 6), (1, 4)] {
        for (name, on) in MODES {
            group.bench_function(BenchmarkId::new(format!("({g},{n})"), name), |b| {
                par::set_parallel(on);
                b.iter(|| build_co_complex(g, n).expect("supported type"))
            });
        }
    }
    group.finish();
}

fn q_complex(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_q_complex");
    group.sample_size(10);
    for (name, on) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            par::set_parallel(on);
            b.iter(|| build_q_complex(true).expect("builds"))
        });
    }
    group.finish();
    par::set_parallel(true);
}

criterion_group!(benches, enumeration, complexes, q_complex);
criterion_main!(benches);
