use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cll_core::group::catalog;
use cll_core::models::{estimate_moment_y, estimate_moment_z, YConfig, ZConfig};

// `None` uses the rayon pool when the `parallel` feature is on; `Some(1)` is
// the sequential path. Both produce identical reports.
const MODES: [(&str, Option<usize>); 2] = [("parallel", None), ("sequential", Some(1))];

fn moment_y(c: &mut Criterion) {
    let mut g = c.benchmark_group("moment_y");
    g.sample_size(10);
    let cfg = YConfig { n: 3, ell: 3, q: 7, class: 2, h: "inversion:3^1".into(), delta: vec![], samples: 512, seed: 1 };
    for (name, threads) in MODES {
        g.bench_with_input(BenchmarkId::new(name, cfg.samples), &threads, |b, &t| {
            b.iter(|| estimate_moment_y(&cfg, catalog::inversion_gamma(3, 1), t).unwrap())
        });
    }
    g.finish();
}

fn moment_z(c: &mut Criterion) {
    let mut g = c.benchmark_group("moment_z");
    g.sample_size(10);
    let h = catalog::elem_abelian(3, 2);
    let cfg = ZConfig { n: 3, ell: 3, class: 2, h: "elem_abelian:3^2".into(), samples: 512, seed: 1 };
    for (name, threads) in MODES {
        g.bench_with_input(BenchmarkId::new(name, cfg.samples), &threads, |b, &t| b.iter(|| estimate_moment_z(&cfg, &h, t).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, moment_y, moment_z);
criterion_main!(benches);
