//! Per-frame equalization cost: banded FD solve vs dense DD solve, plus the
//! banded path's scaling in the Doppler dimension.

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zak_otfs::channel::{apply_dd_io, draw_veh_a, effective_dd_taps, EffectiveDdChannel};
use zak_otfs::equalizer::{lmmse_dd_dense, lmmse_fd_banded};
use zak_otfs::fd::{build_banded_matrix, dd_to_fd_response};
use zak_otfs::params::FrameParams;
use zak_otfs::qam::Constellation;
use zak_otfs::waveform::make_gaussian_pulses;
use zak_otfs::zak::{embed_symbols, idfzt};
use zak_otfs::FdSeq;

fn rand_fdseq(params: &FrameParams, seed: u64) -> FdSeq {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    FdSeq::new(
        params.mn(),
        (0..params.mn())
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect(),
    )
    .unwrap()
}

fn bench_equalize(c: &mut Criterion) {
    let params = FrameParams::vehicular_default();
    let pulses = make_gaussian_pulses(&params).unwrap();
    let chan = draw_veh_a(&params, 7).unwrap();
    let eff = effective_dd_taps(&chan, &pulses, &params).unwrap();

    let constellation = Constellation::qam4();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let bits: Vec<u8> = (0..2 * params.mn())
        .map(|_| rng.random::<bool>() as u8)
        .collect();
    let syms = constellation.map_bits(&bits).unwrap();
    let x_dd = embed_symbols(&syms, &params).unwrap();
    let rho = 10f64.powf(1.5);
    let y_dd = apply_dd_io(&x_dd, &eff, 1.0 / rho, 3).unwrap();
    let y_fd = idfzt(&y_dd);

    let mut group = c.benchmark_group("equalize");
    group.bench_function("fd_banded", |b| {
        b.iter(|| {
            let h = build_banded_matrix(&dd_to_fd_response(&eff), &params).unwrap();
            std::hint::black_box(lmmse_fd_banded(&h, &y_fd, rho).unwrap())
        })
    });
    group.sample_size(10);
    group.bench_function("dd_dense", |b| {
        b.iter(|| std::hint::black_box(lmmse_dd_dense(&eff, &y_dd, rho).unwrap()))
    });
    group.finish();

    // Doppler-dimension scaling with a fixed synthetic tap support; the
    // banded path should grow linearly in MN.
    let mut group = c.benchmark_group("fd_banded_scaling");
    for n in [37usize, 74, 148] {
        let p =
            FrameParams::from_doppler_period(31, n, 30_000.0, 2.51e-6, 815.0, 1.584, 1.584, 16)
                .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let taps: Vec<Complex64> = (0..8 * 7)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let eff = EffectiveDdChannel::from_taps(p.clone(), -2, 5, 3, taps).unwrap();
        let y = rand_fdseq(&p, 4);
        group.bench_function(format!("n{n}"), |b| {
            b.iter(|| {
                let h = build_banded_matrix(&dd_to_fd_response(&eff), &p).unwrap();
                std::hint::black_box(lmmse_fd_banded(&h, &y, rho).unwrap())
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_equalize);
criterion_main!(benches);
