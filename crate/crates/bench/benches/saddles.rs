use criterion::{black_box, criterion_group, criterion_main, Criterion};
use switchover_core::amplitude::direct_amplitude;
use switchover_core::{build_contour, find_saddles, find_coalescence, label_saddles, spm_amplitude, FieldConfig};

fn saddle_search(c: &mut Criterion) {
    let cfg = FieldConfig::reference(45.0);
    c.bench_function("find_saddles/45deg", |b| b.iter(|| find_saddles(black_box(&cfg), 0.3)));
    c.bench_function("label_saddles/45deg", |b| {
        b.iter(|| {
            let mut s = find_saddles(&cfg, 0.3);
            label_saddles(black_box(&cfg), 0.3, &mut s).unwrap();
            s
        })
    });
    c.bench_function("find_coalescence", |b| b.iter(|| find_coalescence(black_box(&cfg), 0.0).unwrap()));
}

fn contour_and_amplitude(c: &mut Criterion) {
    let mut g = c.benchmark_group("contour");
    g.sample_size(20);
    for th in [8.0, 45.0] {
        let cfg = FieldConfig::reference(th);
        g.bench_function(format!("build_contour/{th}deg"), |b| b.iter(|| build_contour(black_box(&cfg), 0.0).unwrap()));
        g.bench_function(format!("spm_amplitude/{th}deg"), |b| {
            b.iter(|| spm_amplitude(black_box(&cfg), 0.0, &[]).unwrap())
        });
        g.bench_function(format!("direct_amplitude/{th}deg"), |b| b.iter(|| direct_amplitude(black_box(&cfg), 0.0)));
    }
    g.finish();
}

criterion_group!(benches, saddle_search, contour_and_amplitude);
criterion_main!(benches);
