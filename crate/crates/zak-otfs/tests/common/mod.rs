//! Shared independent oracles for the integration tests: naive-summation
//! transforms, brute-force channel applications, and the 2-D quadrature
//! evaluation of the filter-cascade taps. Everything here is written from
//! the defining formulas, independent of the library's computation paths.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use zak_otfs::channel::{EffectiveDdChannel, PhysicalChannel};
use zak_otfs::frame::{FdSeq, QuasiPeriodicDdFrame, TimeSeq};
use zak_otfs::params::FrameParams;

pub fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

pub fn rand_unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
}

pub fn rand_frame(params: &FrameParams, seed: u64) -> QuasiPeriodicDdFrame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals = (0..params.mn()).map(|_| rand_unit(&mut rng)).collect();
    QuasiPeriodicDdFrame::new(params.clone(), vals).unwrap()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn rel_l2_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let den: f64 = b.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    num / den
}

/// IDZT by direct double-loop summation.
pub fn naive_idzt(frame: &QuasiPeriodicDdFrame) -> Vec<Complex64> {
    let p = frame.params();
    let (m, n) = (p.m, p.n);
    let mut out = vec![Complex64::new(0.0, 0.0); m * n];
    for k in 0..m {
        for mm in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..n {
                acc += frame.fundamental(k, l)
                    * cis(2.0 * PI * (mm * l) as f64 / n as f64);
            }
            out[k + mm * m] = acc / (n as f64).sqrt();
        }
    }
    out
}

/// DZT by direct double-loop summation.
pub fn naive_dzt(y: &TimeSeq, params: &FrameParams) -> Vec<Complex64> {
    let (m, n) = (params.m, params.n);
    let mut out = vec![Complex64::new(0.0, 0.0); m * n];
    for k in 0..m {
        for l in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for q in 0..n {
                acc += y.value((k + q * m) as i64)
                    * cis(-2.0 * PI * (q * l) as f64 / n as f64);
            }
            out[k * n + l] = acc / (n as f64).sqrt();
        }
    }
    out
}

/// IDFZT by direct summation over the delay axis.
pub fn naive_idfzt(frame: &QuasiPeriodicDdFrame) -> Vec<Complex64> {
    let p = frame.params();
    let (m, n) = (p.m, p.n);
    let mn = m * n;
    let mut out = vec![Complex64::new(0.0, 0.0); mn];
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..m {
            acc += frame.value(k as i64, i as i64)
                * cis(-2.0 * PI * (i * k) as f64 / mn as f64);
        }
        *o = acc / (m as f64).sqrt();
    }
    out
}

/// DFZT restricted to one period, by direct summation.
pub fn naive_dfzt(s: &FdSeq, params: &FrameParams) -> Vec<Complex64> {
    let (m, n) = (params.m, params.n);
    let mn = m * n;
    let mut out = vec![Complex64::new(0.0, 0.0); mn];
    for k in 0..m {
        for l in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in 0..m {
                let idx = l + p * n;
                acc += s.bins()[idx] * cis(2.0 * PI * (idx * k) as f64 / mn as f64);
            }
            out[k * n + l] = acc / (m as f64).sqrt();
        }
    }
    out
}

/// Noiseless DD input-output relation by the full MN x MN double sum over
/// one period of the MN-periodic taps.
pub fn brute_force_dd_io(
    x: &QuasiPeriodicDdFrame,
    eff: &EffectiveDdChannel,
) -> Vec<Complex64> {
    let p = eff.params();
    let (m, n) = (p.m, p.n);
    let mn = (m * n) as i64;
    let mut out = vec![Complex64::new(0.0, 0.0); m * n];
    for k in 0..m as i64 {
        for l in 0..n as i64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for kp in 0..mn {
                for lp in 0..mn {
                    let h = eff.periodic(kp, lp);
                    if h.norm_sqr() == 0.0 {
                        continue;
                    }
                    acc += h
                        * x.value(k - kp, l - lp)
                        * cis(2.0 * PI * (lp * (k - kp)) as f64 / mn as f64);
                }
            }
            out[(k * n as i64 + l) as usize] = acc;
        }
    }
    out
}

/// FD relation by the full double sum:
/// `Y[i] = sum_{k'} sum_{l'} h[k', l'] S[i - l'] exp(-j 2 pi i k' / MN)`.
pub fn brute_force_fd_io(s: &FdSeq, eff: &EffectiveDdChannel) -> Vec<Complex64> {
    let mn = eff.params().mn() as i64;
    let mut out = vec![Complex64::new(0.0, 0.0); mn as usize];
    for i in 0..mn {
        let mut acc = Complex64::new(0.0, 0.0);
        for kp in 0..mn {
            for lp in 0..mn {
                let h = eff.periodic(kp, lp);
                if h.norm_sqr() == 0.0 {
                    continue;
                }
                acc += h * s.value(i - lp) * cis(-2.0 * PI * (i * kp) as f64 / mn as f64);
            }
        }
        out[i as usize] = acc;
    }
    out
}

/// Dense matrix of the map `x_dd (fundamental, row-major) -> S bins`.
pub fn idfzt_matrix(params: &FrameParams) -> Vec<Complex64> {
    let (m, n) = (params.m, params.n);
    let mn = m * n;
    let mut f = vec![Complex64::new(0.0, 0.0); mn * mn];
    for i in 0..mn {
        for k in 0..m {
            let l = i % n;
            f[i * mn + (k * n + l)] =
                cis(-2.0 * PI * (i * k) as f64 / mn as f64) / (m as f64).sqrt();
        }
    }
    f
}

/// Gaussian filter constants derived straight from the defining expressions.
pub struct GaussianFilters {
    pub a1: f64,
    pub c1: f64,
    pub a2: f64,
    pub c2: f64,
}

impl GaussianFilters {
    pub fn from_params(params: &FrameParams) -> Self {
        let c_band = params.b_hz + 2.0 * params.nu_max_hz;
        let c1 = params.alpha_g * c_band * c_band;
        let d_time = params.t_s + params.tau_max_s;
        let c2 = 1.0 / (params.beta_g * d_time * d_time);
        Self {
            a1: (2.0 * c1 / PI).powf(0.25),
            c1,
            a2: (2.0 * c2 / PI).powf(0.25),
            c2,
        }
    }

    pub fn w1(&self, t: f64) -> f64 {
        self.a1 * (-self.c1 * t * t).exp()
    }

    /// Spectrum of the time window: `w2(nu) = integral W2(t) e^{-j2pi nu t} dt`.
    pub fn w2(&self, nu: f64) -> f64 {
        self.a2 * (PI / self.c2).sqrt() * (-PI * PI * nu * nu / self.c2).exp()
    }
}

/// Effective tap at `(tau, nu)` by direct 2-D Simpson quadrature of the
/// twisted convolution
/// `integral w_rx(t', v') c(tau - t', nu - v') e^{j 2 pi v'(tau - t')} dt' dv'`
/// where `c = channel *_sigma w_tx` reduces exactly by delta sifting.
pub fn quadrature_tap(
    chan: &PhysicalChannel,
    params: &FrameParams,
    tau: f64,
    nu: f64,
    intervals: usize,
) -> Complex64 {
    let g = GaussianFilters::from_params(params);
    let c3 = PI * PI / g.c2;

    // w_rx(t', v') = w1(-t') w2(-v') e^{j 2 pi v' t'}
    let w_rx = |tp: f64, vp: f64| g.w1(-tp) * g.w2(-vp) * cis(2.0 * PI * vp * tp);
    let c_fn = |a: f64, b: f64| {
        let mut acc = Complex64::new(0.0, 0.0);
        for p in chan.paths() {
            acc += p.gain
                * g.w1(a - p.delay_s)
                * g.w2(b - p.doppler_hz)
                * cis(2.0 * PI * p.doppler_hz * (a - p.delay_s));
        }
        acc
    };

    let r_tau = 8.0 / (2.0 * g.c1).sqrt();
    let r_nu = 8.0 / (2.0 * c3).sqrt();
    let n = intervals + intervals % 2; // Simpson needs an even count
    let h_tau = 2.0 * r_tau / n as f64;
    let h_nu = 2.0 * r_nu / n as f64;
    let weight = |idx: usize| -> f64 {
        if idx == 0 || idx == n {
            1.0
        } else if idx % 2 == 1 {
            4.0
        } else {
            2.0
        }
    };

    let mut acc = Complex64::new(0.0, 0.0);
    for it in 0..=n {
        let tp = -r_tau + it as f64 * h_tau;
        let wt = weight(it);
        for iv in 0..=n {
            let vp = -r_nu + iv as f64 * h_nu;
            let integrand =
                w_rx(tp, vp) * c_fn(tau - tp, nu - vp) * cis(2.0 * PI * vp * (tau - tp));
            acc += integrand * (wt * weight(iv));
        }
    }
    acc * (h_tau * h_nu / 9.0)
}
