//! Discrete Zak-transform algebra.
//!
//! Two transform pairs connect the three signal domains:
//!
//! * IDZT / DZT between the delay-Doppler grid and the MN-periodic
//!   discrete-time sequence (`x[k + mM] = (1/sqrt(N)) sum_l x_dd[k,l]
//!   exp(j 2 pi m l / N)` and its inverse);
//! * IDFZT / DFZT between the delay-Doppler grid and the MN frequency bins
//!   (`S[i] = (1/sqrt(M)) sum_k x_dd[k,i] exp(-j 2 pi i k / MN)` and its
//!   inverse restricted to one period).
//!
//! All four are unitary on one fundamental domain / period. Internally the
//! sums run as FFTs along the length-N axis (IDZT/DZT) and the length-M axis
//! (IDFZT/DFZT).

use num_complex::Complex64;

use crate::error::{Result, ZakOtfsError};
use crate::fft::{fft_forward, fft_inverse};
use crate::frame::{cis_ratio, FdSeq, QuasiPeriodicDdFrame, TimeSeq};
use crate::params::FrameParams;

/// Embeds an `M x N` symbol array (row-major, delay index first) into a
/// quasi-periodic DD frame. The fundamental domain equals the input.
pub fn embed_symbols(x: &[Complex64], params: &FrameParams) -> Result<QuasiPeriodicDdFrame> {
    QuasiPeriodicDdFrame::new(params.clone(), x.to_vec())
}

/// Inverse discrete Zak transform: DD frame to one period of the MN-periodic
/// time sequence, `x[k + mM] = (1/sqrt(N)) sum_l x_dd[k,l] e^{j 2 pi m l / N}`.
pub fn idzt(frame: &QuasiPeriodicDdFrame) -> TimeSeq {
    let p = frame.params();
    let (m, n) = (p.m, p.n);
    let scale = 1.0 / (n as f64).sqrt();
    let mut out = vec![Complex64::new(0.0, 0.0); m * n];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..m {
        for l in 0..n {
            buf[l] = frame.fundamental(k, l);
        }
        fft_inverse(&mut buf);
        for (mm, v) in buf.iter().enumerate() {
            out[k + mm * m] = v * scale;
        }
    }
    TimeSeq::periodic(m * n, out).expect("length mn by construction")
}

/// Discrete Zak transform of an MN-periodic time sequence,
/// `y_dd[k,l] = (1/sqrt(N)) sum_q y[k + qM] e^{-j 2 pi q l / N}`.
pub fn dzt(y: &TimeSeq, params: &FrameParams) -> Result<QuasiPeriodicDdFrame> {
    if !y.is_periodic() {
        return Err(ZakOtfsError::NonPeriodicInput);
    }
    if y.mn() != params.mn() {
        return Err(ZakOtfsError::DimensionMismatch {
            expected: format!("{}", params.mn()),
            got: format!("{}", y.mn()),
        });
    }
    let (m, n) = (params.m, params.n);
    let scale = 1.0 / (n as f64).sqrt();
    let mut frame = QuasiPeriodicDdFrame::zeros(params.clone());
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..m {
        for (q, v) in buf.iter_mut().enumerate() {
            *v = y.value((k + q * m) as i64);
        }
        fft_forward(&mut buf);
        for l in 0..n {
            frame.set(k, l, buf[l] * scale);
        }
    }
    Ok(frame)
}

/// Folds an aperiodic sequence into one MN period: `y[n] = sum_p yt[n + pMN]`.
pub fn periodize(y_tilde: &TimeSeq, params: &FrameParams) -> Result<TimeSeq> {
    if y_tilde.is_empty() {
        return Err(ZakOtfsError::EmptyWindow);
    }
    let mn = params.mn() as i64;
    let mut out = vec![Complex64::new(0.0, 0.0); params.mn()];
    for (j, v) in y_tilde.samples().iter().enumerate() {
        let n = (y_tilde.start() + j as i64).rem_euclid(mn);
        out[n as usize] += v;
    }
    TimeSeq::periodic(params.mn(), out)
}

/// Inverse discrete frequency Zak transform: DD frame to MN frequency bins,
/// `S[i] = (1/sqrt(M)) sum_k x_dd[k,i] e^{-j 2 pi i k / MN}` where `x_dd[k,i]`
/// follows the (plain periodic) Doppler extension for `i >= N`.
pub fn idfzt(frame: &QuasiPeriodicDdFrame) -> FdSeq {
    let p = frame.params();
    let (m, n) = (p.m, p.n);
    let mn = (m * n) as i64;
    let scale = 1.0 / (m as f64).sqrt();
    let mut out = FdSeq::zeros(m * n);
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for l in 0..n {
        for (k, v) in buf.iter_mut().enumerate() {
            *v = frame.fundamental(k, l) * cis_ratio(-((l * k) as i64), mn);
        }
        fft_forward(&mut buf);
        for (p_idx, v) in buf.iter().enumerate() {
            out.bins_mut()[l + p_idx * n] = v * scale;
        }
    }
    out
}

/// Discrete frequency Zak transform restricted to one period:
/// `x[k,l] = (1/sqrt(M)) sum_p S[l + pN] e^{j 2 pi (l + pN) k / MN}`.
/// Returns the `M x N` array row-major (delay index first).
pub fn dfzt(s: &FdSeq, params: &FrameParams) -> Result<Vec<Complex64>> {
    if s.mn() != params.mn() {
        return Err(ZakOtfsError::DimensionMismatch {
            expected: format!("{}", params.mn()),
            got: format!("{}", s.mn()),
        });
    }
    let (m, n) = (params.m, params.n);
    let mn = (m * n) as i64;
    let scale = 1.0 / (m as f64).sqrt();
    let mut out = vec![Complex64::new(0.0, 0.0); m * n];
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for l in 0..n {
        for (p_idx, v) in buf.iter_mut().enumerate() {
            *v = s.bins()[l + p_idx * n];
        }
        fft_inverse(&mut buf);
        for k in 0..m {
            out[k * n + l] = buf[k] * scale * cis_ratio((l * k) as i64, mn);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_frame(params: &FrameParams, seed: u64) -> QuasiPeriodicDdFrame {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vals = (0..params.mn())
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        QuasiPeriodicDdFrame::new(params.clone(), vals).unwrap()
    }

    fn params_2x2() -> FrameParams {
        FrameParams::from_doppler_period(2, 2, 1000.0, 0.0, 0.0, 1.584, 1.584, 4).unwrap()
    }

    fn params_4x3() -> FrameParams {
        FrameParams::from_doppler_period(4, 3, 1000.0, 0.0, 0.0, 1.584, 1.584, 4).unwrap()
    }

    #[test]
    fn idzt_of_dd_impulse() {
        // x_dd = delta[k] delta[l] at M = N = 2 spreads as 1/sqrt(2) over
        // n in {0, 2} and zero at odd n.
        let p = params_2x2();
        let f = QuasiPeriodicDdFrame::impulse(p, 0, 0);
        let x = idzt(&f);
        let r = 1.0 / 2f64.sqrt();
        assert!((x.value(0).re - r).abs() < 1e-15);
        assert!(x.value(1).norm() < 1e-15);
        assert!((x.value(2).re - r).abs() < 1e-15);
        assert!(x.value(3).norm() < 1e-15);
    }

    #[test]
    fn dzt_of_time_impulse() {
        // y[n] = delta[n] over one period maps to delta[k] / sqrt(N) for all l.
        let p = params_4x3();
        let mut samples = vec![Complex64::new(0.0, 0.0); 12];
        samples[0] = Complex64::new(1.0, 0.0);
        let y = TimeSeq::periodic(12, samples).unwrap();
        let f = dzt(&y, &p).unwrap();
        let r = 1.0 / 3f64.sqrt();
        for k in 0..4 {
            for l in 0..3 {
                let expect = if k == 0 { r } else { 0.0 };
                assert!((f.fundamental(k, l).re - expect).abs() < 1e-15);
                assert!(f.fundamental(k, l).im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn embed_rejects_wrong_dimensions() {
        let p = params_4x3();
        let err = embed_symbols(&vec![Complex64::new(0.0, 0.0); 11], &p);
        assert!(matches!(
            err,
            Err(ZakOtfsError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dzt_rejects_aperiodic_input() {
        let p = params_4x3();
        let y = TimeSeq::aperiodic(12, 0, vec![Complex64::new(1.0, 0.0); 12]);
        assert!(matches!(dzt(&y, &p), Err(ZakOtfsError::NonPeriodicInput)));
    }

    #[test]
    fn zak_round_trips() {
        let p = params_4x3();
        let f = rand_frame(&p, 7);
        let back = dzt(&idzt(&f), &p).unwrap();
        for (a, b) in back.as_slice().iter().zip(f.as_slice()) {
            assert!((a - b).norm() < 1e-12);
        }
        let s = idfzt(&f);
        let grid = dfzt(&s, &p).unwrap();
        for (a, b) in grid.iter().zip(f.as_slice()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn periodize_two_aliases() {
        // yt[n] = delta[n] + delta[n - MN] folds to y[0] = 2.
        let p = params_4x3();
        let mut samples = vec![Complex64::new(0.0, 0.0); 13];
        samples[0] = Complex64::new(1.0, 0.0);
        samples[12] = Complex64::new(1.0, 0.0);
        let yt = TimeSeq::aperiodic(12, 0, samples);
        let y = periodize(&yt, &p).unwrap();
        assert!((y.value(0).re - 2.0).abs() < 1e-15);
        for n in 1..12 {
            assert!(y.value(n).norm() < 1e-15);
        }
    }

    #[test]
    fn periodize_identity_within_one_period() {
        let p = params_4x3();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let samples: Vec<Complex64> = (0..12)
            .map(|_| Complex64::new(rng.random(), rng.random()))
            .collect();
        let yt = TimeSeq::aperiodic(12, 0, samples.clone());
        let y = periodize(&yt, &p).unwrap();
        assert_eq!(y.samples(), &samples[..]);
    }

    #[test]
    fn periodize_rejects_empty_window() {
        let p = params_4x3();
        let yt = TimeSeq::aperiodic(12, 0, vec![]);
        assert!(matches!(
            periodize(&yt, &p),
            Err(ZakOtfsError::EmptyWindow)
        ));
    }

    #[test]
    fn idfzt_of_delay_impulse_column() {
        // x_dd = delta[k] c[l]: S[i] = c[i mod N] / sqrt(M) (zero phase at k=0).
        let p = params_4x3();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c: Vec<Complex64> = (0..3)
            .map(|_| Complex64::new(rng.random(), rng.random()))
            .collect();
        let mut f = QuasiPeriodicDdFrame::zeros(p.clone());
        for l in 0..3 {
            f.set(0, l, c[l]);
        }
        let s = idfzt(&f);
        for i in 0..12 {
            let expect = c[i % 3] / 2.0;
            assert!((s.bins()[i] - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn idfzt_parseval() {
        let p = params_4x3();
        let f = rand_frame(&p, 9);
        let s = idfzt(&f);
        assert!((s.energy() - f.energy()).abs() / f.energy() < 1e-10);
    }

    #[test]
    fn dfzt_of_zero_is_zero() {
        let p = params_4x3();
        let s = FdSeq::zeros(12);
        let grid = dfzt(&s, &p).unwrap();
        assert!(grid.iter().all(|v| v.norm() == 0.0));
    }
}
