//! Frame-loop throughput: rayon data-parallel runner vs the sequential
//! fallback, over a small batch of banded-equalizer frames.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use zak_otfs::sim::{
    run_frames_parallel, run_frames_sequential, simulate_frame, RawConfig, SimContext,
};

fn bench_frames(c: &mut Criterion) {
    let cfg = RawConfig {
        frames_per_snr: Some(16),
        snr_db: Some(vec![10.0]),
        equalizer: Some("fd_banded".into()),
        ..Default::default()
    }
    .resolve()
    .unwrap();
    let ctx = SimContext::new(&cfg).unwrap();
    let frames = cfg.frames_per_snr;

    let mut group = c.benchmark_group("frame_loop");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| {
            run_frames_sequential(frames, |fi| simulate_frame(&ctx, 0, fi)).unwrap()
        })
    });
    for threads in [2usize, 4] {
        group.bench_with_input(
            BenchmarkId::new("parallel", threads),
            &threads,
            |b, &t| {
                b.iter(|| {
                    run_frames_parallel(frames, Some(t), |fi| simulate_frame(&ctx, 0, fi))
                        .unwrap()
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_frames);
criterion_main!(benches);
