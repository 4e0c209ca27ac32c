use criterion::{black_box, criterion_group, criterion_main, Criterion};
use fermigas::{energy_assembled, optimize_exponents, KernelMode};
use fermigas_bench::{ball, hard_core_profile};

fn energy(c: &mut Criterion) {
    c.bench_function("optimize_exponents 3D", |b| b.iter(|| optimize_exponents(black_box(3)).unwrap()));
    c.bench_function("optimize_exponents 1D", |b| b.iter(|| optimize_exponents(black_box(1)).unwrap()));

    let ms = ball(3, 6, 400.0);
    let jp = hard_core_profile(&ms);
    let mut g = c.benchmark_group("energy_assembled");
    g.sample_size(10);
    g.bench_function("quartic", |b| b.iter(|| energy_assembled(black_box(&ms), &jp, KernelMode::Quartic, None).unwrap()));
    g.bench_function("exact", |b| b.iter(|| energy_assembled(black_box(&ms), &jp, KernelMode::Exact, None).unwrap()));
    g.finish();
}

criterion_group!(benches, energy);
criterion_main!(benches);
