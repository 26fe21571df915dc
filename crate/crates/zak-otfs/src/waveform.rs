//! Oversampled discrete-time realization of the continuous transmit/receive
//! chain: Gaussian pulse shaping, physical channel application, matched
//! filtering, and symbol-rate sampling. This path serves as the ground-truth
//! oracle for the effective DD taps and for validating the DD-level
//! input-output relation.
//!
//! Conventions: the oversampled grid runs at `fs = Q * B` with integer sample
//! indices; index 0 is the frame origin, so DD-rate sample `n` sits at grid
//! index `n * Q`. Transmit synthesis places each train impulse exactly on the
//! grid (delta sifting is exact); the matched-filter convolution is a Riemann
//! sum with step `1/fs`; fractional path delays are applied as frequency-
//! domain phase ramps, and Doppler shifts as exact pointwise phasors.
//!
//! The matched filter is scaled by `sqrt(T)` (mirroring the `sqrt(T)` at the
//! transmitter) so that sounding the chain with a unit DD impulse reproduces
//! the twisted-convolution taps of the filter cascade at unit scale.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::channel::{tap_support, EffectiveDdChannel, PhysicalChannel};
use crate::error::{Result, ZakOtfsError};
use crate::fft::{fft_forward, fft_inverse};
use crate::frame::{cis, QuasiPeriodicDdFrame, TimeSeq};
use crate::params::FrameParams;
use crate::zak::{dzt, idzt, periodize};

/// Two-sided tail-energy budget for filter truncation.
const TAIL_TOL: f64 = 1e-8;

/// Hard cap on any oversampled buffer (samples).
const MAX_WINDOW: usize = 1 << 27;

/// Complex baseband signal on the oversampled grid; the window covers sample
/// indices `[start, start + len)` at rate `fs`.
#[derive(Debug, Clone, PartialEq)]
pub struct OversampledSignal {
    pub fs: f64,
    pub start: i64,
    pub samples: Vec<Complex64>,
}

impl OversampledSignal {
    /// Sample at absolute grid index `g` (zero outside the window).
    #[inline]
    pub fn at(&self, g: i64) -> Complex64 {
        let off = g - self.start;
        if off >= 0 && (off as usize) < self.samples.len() {
            self.samples[off as usize]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Continuous-time energy approximation `sum |x|^2 / fs`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v.norm_sqr()).sum::<f64>() / self.fs
    }

    pub fn t_start(&self) -> f64 {
        self.start as f64 / self.fs
    }
}

/// Sampled Gaussian pulse pair: the band-limiting pulse `w1` and the
/// time-limiting window `W2`, both truncated at the tail-energy guard and
/// renormalized to unit energy. `c1` and `c3` are the Gaussian exponents of
/// the pulse and of the window spectrum, reused by the closed-form tap
/// computation.
#[derive(Debug, Clone, PartialEq)]
pub struct PulsePair {
    pub fs: f64,
    /// `w1` samples over `[w1_start, w1_start + len)`.
    pub w1: Vec<f64>,
    pub w1_start: i64,
    /// `W2` samples over `[w2_start, w2_start + len)`.
    pub w2: Vec<f64>,
    pub w2_start: i64,
    /// Exponent of `w1(t) ~ exp(-c1 t^2)`.
    pub c1: f64,
    /// Exponent of the window spectrum `w2(nu) ~ exp(-c3 nu^2)`.
    pub c3: f64,
    sqrt_t: f64,
}

impl PulsePair {
    /// `w1` sample at absolute grid index `g` (zero outside the guard).
    #[inline]
    pub fn w1_at(&self, g: i64) -> f64 {
        let off = g - self.w1_start;
        if off >= 0 && (off as usize) < self.w1.len() {
            self.w1[off as usize]
        } else {
            0.0
        }
    }

    /// `W2` sample at absolute grid index `g` (zero outside the guard).
    #[inline]
    pub fn w2_at(&self, g: i64) -> f64 {
        let off = g - self.w2_start;
        if off >= 0 && (off as usize) < self.w2.len() {
            self.w2[off as usize]
        } else {
            0.0
        }
    }

    pub fn w2_window(&self) -> (i64, i64) {
        (self.w2_start, self.w2_start + self.w2.len() as i64)
    }

    /// Energy of the sampled pulse, `sum w^2 / fs`.
    pub fn w1_energy(&self) -> f64 {
        self.w1.iter().map(|v| v * v).sum::<f64>() / self.fs
    }

    pub fn w2_energy(&self) -> f64 {
        self.w2.iter().map(|v| v * v).sum::<f64>() / self.fs
    }
}

/// Samples a centered Gaussian `a * exp(-c t^2)` on the grid, truncated at
/// the smallest symmetric window whose discarded two-sided tail energy is
/// below `TAIL_TOL`, then renormalized to unit energy.
fn sample_gaussian(a: f64, c: f64, fs: f64) -> Result<(Vec<f64>, i64)> {
    let dt = 1.0 / fs;
    let sigma = 1.0 / (2.0 * c.sqrt());
    let k_max = (8.0 * sigma * fs).ceil() as i64 + 2;
    if k_max as usize > MAX_WINDOW / 2 {
        return Err(ZakOtfsError::GuardTooSmall { tol: TAIL_TOL });
    }
    let weights: Vec<f64> = (0..=k_max)
        .map(|k| {
            let t = k as f64 * dt;
            (-2.0 * c * t * t).exp()
        })
        .collect();
    let total: f64 = weights[0] + 2.0 * weights[1..].iter().sum::<f64>();
    let mut tail = 0.0;
    let mut cut = k_max;
    for k in (1..=k_max).rev() {
        tail += 2.0 * weights[k as usize];
        if tail > TAIL_TOL * total {
            cut = k;
            break;
        }
    }
    if cut >= k_max {
        return Err(ZakOtfsError::GuardTooSmall { tol: TAIL_TOL });
    }
    let mut samples: Vec<f64> = (-cut..=cut)
        .map(|k| {
            let t = k as f64 * dt;
            a * (-c * t * t).exp()
        })
        .collect();
    let energy: f64 = samples.iter().map(|v| v * v).sum::<f64>() * dt;
    let scale = 1.0 / energy.sqrt();
    for v in &mut samples {
        *v *= scale;
    }
    Ok((samples, -cut))
}

/// Builds the Gaussian pulse pair on the oversampled grid.
pub fn make_gaussian_pulses(params: &FrameParams) -> Result<PulsePair> {
    let fs = params.sample_rate();
    let c_band = params.b_hz + 2.0 * params.nu_max_hz;
    let c1 = params.alpha_g * c_band * c_band;
    let a1 = (2.0 * c1 / PI).powf(0.25);

    let d_time = params.t_s + params.tau_max_s;
    let c2 = 1.0 / (params.beta_g * d_time * d_time);
    let a2 = (2.0 * c2 / PI).powf(0.25);
    let c3 = PI * PI / c2;

    let (w1, w1_start) = sample_gaussian(a1, c1, fs)?;
    let (w2, w2_start) = sample_gaussian(a2, c2, fs)?;
    Ok(PulsePair {
        fs,
        w1,
        w1_start,
        w2,
        w2_start,
        c1,
        c3,
        sqrt_t: params.t_s.sqrt(),
    })
}

/// Pulse-shapes the MN-periodic symbol train:
/// `x(t) = sqrt(T) * w1 conv [ W2 * sum_n x[n] delta(t - n/B) ]`, with the
/// train windowed by the support of the sampled `W2`.
pub fn synthesize_tx(
    x: &TimeSeq,
    pulses: &PulsePair,
    params: &FrameParams,
) -> Result<OversampledSignal> {
    if !x.is_periodic() || x.mn() != params.mn() {
        return Err(ZakOtfsError::NonPeriodicInput);
    }
    let q = params.q as i64;
    let (w2_lo, w2_hi) = pulses.w2_window();
    let n_min = w2_lo.div_euclid(q) + i64::from(w2_lo.rem_euclid(q) != 0);
    let n_max = (w2_hi - 1).div_euclid(q);
    if n_max < n_min {
        return Err(ZakOtfsError::EmptyWindow);
    }
    let out_start = n_min * q + pulses.w1_start;
    let out_len = ((n_max - n_min) * q) as usize + pulses.w1.len();
    if out_len > MAX_WINDOW {
        return Err(ZakOtfsError::WindowOverflow(format!("{out_len} samples")));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); out_len];
    for n in n_min..=n_max {
        let amp = x.value(n) * pulses.sqrt_t * pulses.w2_at(n * q);
        if amp.norm_sqr() == 0.0 {
            continue;
        }
        let base = (n * q + pulses.w1_start - out_start) as usize;
        for (j, &w) in pulses.w1.iter().enumerate() {
            out[base + j] += amp * w;
        }
    }
    Ok(OversampledSignal {
        fs: pulses.fs,
        start: out_start,
        samples: out,
    })
}

/// Applies the physical channel `r(t) = sum_i h_i x(t - tau_i)
/// e^{j 2 pi nu_i (t - tau_i)}` (noiseless). Fractional delays are realized
/// as frequency-domain phase ramps at the oversampled rate; the output
/// window extends past the input by the delay spread.
pub fn apply_phy_channel(
    x: &OversampledSignal,
    chan: &PhysicalChannel,
    params: &FrameParams,
) -> Result<OversampledSignal> {
    for p in chan.paths() {
        if p.delay_s > params.tau_max_s * (1.0 + 1e-12) {
            return Err(ZakOtfsError::InvalidParameter(format!(
                "path delay {} exceeds declared tau_max {}",
                p.delay_s, params.tau_max_s
            )));
        }
    }
    let fs = x.fs;
    let ext = (params.tau_max_s * fs).ceil() as usize + 4;
    let out_len = x.samples.len() + ext;
    if out_len > MAX_WINDOW {
        return Err(ZakOtfsError::WindowOverflow(format!("{out_len} samples")));
    }
    let fft_len = out_len.next_power_of_two();

    let mut spectrum = vec![Complex64::new(0.0, 0.0); fft_len];
    spectrum[..x.samples.len()].copy_from_slice(&x.samples);
    fft_forward(&mut spectrum);

    let mut out = vec![Complex64::new(0.0, 0.0); out_len];
    let mut work = vec![Complex64::new(0.0, 0.0); fft_len];
    for p in chan.paths() {
        if p.gain.norm_sqr() == 0.0 {
            continue;
        }
        // Linear-phase delay: the buffer tail is zero-padded beyond the
        // delay spread, so the circular wrap lands on zeros.
        for (k, w) in work.iter_mut().enumerate() {
            let f = if k <= fft_len / 2 {
                k as f64
            } else {
                k as f64 - fft_len as f64
            } * fs
                / fft_len as f64;
            *w = spectrum[k] * cis(-2.0 * PI * f * p.delay_s);
        }
        fft_inverse(&mut work);
        let scale = 1.0 / fft_len as f64;
        for (m, o) in out.iter_mut().enumerate() {
            let t = (x.start + m as i64) as f64 / fs;
            *o += p.gain * work[m] * scale * cis(2.0 * PI * p.doppler_hz * (t - p.delay_s));
        }
    }
    Ok(OversampledSignal {
        fs,
        start: x.start,
        samples: out,
    })
}

/// Matched filter and symbol-rate sampling:
/// `y(t) = sqrt(T) W2*(t) [ w1*(-t) conv r(t) ]`, read at `t = n / B`.
/// Returns the aperiodic sequence over the window where `W2` is supported.
pub fn matched_filter_and_sample(
    r: &OversampledSignal,
    pulses: &PulsePair,
    params: &FrameParams,
) -> Result<TimeSeq> {
    let q = params.q as i64;
    let dt = 1.0 / pulses.fs;
    let (w2_lo, w2_hi) = pulses.w2_window();
    let n_min = w2_lo.div_euclid(q) + i64::from(w2_lo.rem_euclid(q) != 0);
    let n_max = (w2_hi - 1).div_euclid(q);
    if n_max < n_min {
        return Err(ZakOtfsError::EmptyWindow);
    }
    let mut samples = Vec::with_capacity((n_max - n_min + 1) as usize);
    for n in n_min..=n_max {
        let g = n * q;
        let win = pulses.w2_at(g);
        if win == 0.0 {
            samples.push(Complex64::new(0.0, 0.0));
            continue;
        }
        // mf(t) = integral w1*(u) r(t + u) du, Riemann step dt; w1 is real.
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &w) in pulses.w1.iter().enumerate() {
            acc += w * r.at(g + pulses.w1_start + j as i64);
        }
        samples.push(acc * dt * win * pulses.sqrt_t);
    }
    Ok(TimeSeq::aperiodic(params.mn(), n_min, samples))
}

/// Sounds the end-to-end chain with a unit DD impulse at bin `(0, 0)` and
/// reads the effective taps off the received frame over the truncated
/// support. The crystallization condition keeps the support alias-free, so
/// the read needs no further phase compensation.
pub fn sound_effective_channel(
    chan: &PhysicalChannel,
    pulses: &PulsePair,
    params: &FrameParams,
) -> Result<EffectiveDdChannel> {
    let x_dd = QuasiPeriodicDdFrame::impulse(params.clone(), 0, 0);
    let y_dd = transmit_receive(&x_dd, chan, pulses, params)?;

    let (k_lo, k_hi) = tap_support(pulses, params);
    let l_max = params.l_max as i64;
    let w = (2 * l_max + 1) as usize;
    let mut taps = Vec::with_capacity(((k_hi - k_lo + 1) as usize) * w);
    for k in k_lo..=k_hi {
        for l in -l_max..=l_max {
            taps.push(y_dd.value(k, l));
        }
    }
    let eff = EffectiveDdChannel::from_taps(params.clone(), k_lo, k_hi, l_max, taps)?;

    // The support must hold essentially all of the received energy;
    // anything larger indicates wrap-around aliasing.
    let total = y_dd.energy();
    let kept = eff.energy();
    if total > 0.0 && (total - kept) > 0.01 * total {
        return Err(ZakOtfsError::SupportExceedsBounds(format!(
            "{:.3}% of sounded energy outside support",
            100.0 * (total - kept) / total
        )));
    }
    Ok(eff)
}

/// Full noiseless waveform chain for an arbitrary frame: IDZT, pulse
/// shaping, physical channel, matched filter, periodization, DZT.
pub fn transmit_receive(
    x_dd: &QuasiPeriodicDdFrame,
    chan: &PhysicalChannel,
    pulses: &PulsePair,
    params: &FrameParams,
) -> Result<QuasiPeriodicDdFrame> {
    let x = idzt(x_dd);
    let tx = synthesize_tx(&x, pulses, params)?;
    let rx = apply_phy_channel(&tx, chan, params)?;
    let y_tilde = matched_filter_and_sample(&rx, pulses, params)?;
    let y = periodize(&y_tilde, params)?;
    dzt(&y, params)
}
