//! Parallel kernels on the global rayon pool against a one-thread pool.
//! Build with `--no-default-features` for the fully sequential code path.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use latvol::arith::{rat, ratio};
use latvol::dirichlet::DirichletSeries;
use latvol::hnf::count_with_short_vector;
use latvol::measure::{cone_point_count, count_scaled_points, Ball};
use latvol::padic::{singular_density, tamagawa_partial};

type Kernel = (&'static str, fn());

fn kernels() -> Vec<Kernel> {
    vec![
        ("cone_point_count_2_60", || {
            cone_point_count(2, 60).unwrap();
        }),
        ("short_vector_2_T5_S2", || {
            count_with_short_vector(2, &rat(5), &ratio(2, 1)).unwrap();
        }),
        ("singular_density_2_3_2", || {
            singular_density(2, 3, 2).unwrap();
        }),
        ("convolve_zeta_2000", || {
            DirichletSeries::zeta(2000)
                .convolve(&DirichletSeries::shifted_zeta(1, 2000), 2000)
                .unwrap();
        }),
        ("disc_points_r_1_400", || {
            count_scaled_points(&Ball::unit_disc(), &ratio(1, 400)).unwrap();
        }),
        ("tamagawa_partial_3_1e5", || {
            tamagawa_partial(3, 100_000).unwrap();
        }),
    ]
}

fn bench(c: &mut Criterion) {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let threads = rayon::current_num_threads();
    let mut group = c.benchmark_group("kernels");
    group.sample_size(10);
    for (name, f) in kernels() {
        group.bench_function(BenchmarkId::new(name, format!("pool-{threads}")), |b| b.iter(f));
        group.bench_function(BenchmarkId::new(name, "pool-1"), |b| {
            b.iter(|| single.install(f))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
