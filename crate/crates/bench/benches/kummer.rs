use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use ssns_core::{kummer_m, kummer_u, kummer_u_deriv2, whittaker_w, KummerArgs, PrecisionConfig};

fn kummer(c: &mut Criterion) {
    let mut group = c.benchmark_group("kummer_u");
    for digits in [20u32, 40, 80] {
        let prec = PrecisionConfig::new(digits).unwrap();
        for z in [1.0, 20.0, 80.0] {
            let args = KummerArgs::rational(-1, 4, 1, 2, prec.real(z), &prec);
            group.bench_with_input(BenchmarkId::new(format!("P{digits}"), z), &args, |b, args| {
                b.iter(|| kummer_u(black_box(args), &prec).unwrap())
            });
        }
    }
    group.finish();

    let prec = PrecisionConfig::default();
    let args = KummerArgs::rational(-1, 4, 1, 2, prec.real(10.0), &prec);
    c.bench_function("kummer_m/P40/z10", |b| b.iter(|| kummer_m(black_box(&args), &prec).unwrap()));
    c.bench_function("kummer_u_deriv2/P40/z10", |b| b.iter(|| kummer_u_deriv2(black_box(&args), &prec).unwrap()));
    let (kappa, mu, z) = (prec.ratio(-1, 12), prec.ratio(1, 4), prec.real(3.0));
    c.bench_function("whittaker_w/P40", |b| b.iter(|| whittaker_w(&kappa, &mu, black_box(&z), &prec).unwrap()));
}

criterion_group!(benches, kummer);
criterion_main!(benches);
