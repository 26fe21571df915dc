//! Signal containers: quasi-periodic DD frames, time sequences, and
//! frequency-domain sequences.

use num_complex::Complex64;

use crate::error::{Result, ZakOtfsError};
use crate::params::FrameParams;

/// Unit-magnitude phasor `exp(j * theta)`.
#[inline]
pub fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// Phasor `exp(j * 2 * pi * num / den)` with the ratio reduced in integer
/// arithmetic so large indices lose no precision.
#[inline]
pub fn cis_ratio(num: i64, den: i64) -> Complex64 {
    let r = num.rem_euclid(den);
    cis(2.0 * std::f64::consts::PI * r as f64 / den as f64)
}

/// A delay-Doppler frame stored on the fundamental domain
/// `k in [0, M), l in [0, N)` with quasi-periodic extension
/// `value(k + nM, l + mN) = exp(j 2 pi n l / N) * value(k, l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiPeriodicDdFrame {
    params: FrameParams,
    values: Vec<Complex64>,
}

impl QuasiPeriodicDdFrame {
    pub fn new(params: FrameParams, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != params.mn() {
            return Err(ZakOtfsError::DimensionMismatch {
                expected: format!("{} x {} = {}", params.m, params.n, params.mn()),
                got: format!("{}", values.len()),
            });
        }
        Ok(Self { params, values })
    }

    pub fn zeros(params: FrameParams) -> Self {
        let mn = params.mn();
        Self {
            params,
            values: vec![Complex64::new(0.0, 0.0); mn],
        }
    }

    /// Frame with a single unit pulse at delay-Doppler bin `(k, l)`.
    pub fn impulse(params: FrameParams, k: usize, l: usize) -> Self {
        let mut f = Self::zeros(params);
        let idx = f.idx(k, l);
        f.values[idx] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn params(&self) -> &FrameParams {
        &self.params
    }

    #[inline]
    pub fn idx(&self, k: usize, l: usize) -> usize {
        debug_assert!(k < self.params.m && l < self.params.n);
        k * self.params.n + l
    }

    /// Fundamental-domain value at `k in [0, M), l in [0, N)`.
    #[inline]
    pub fn fundamental(&self, k: usize, l: usize) -> Complex64 {
        self.values[self.idx(k, l)]
    }

    #[inline]
    pub fn set(&mut self, k: usize, l: usize, v: Complex64) {
        let idx = self.idx(k, l);
        self.values[idx] = v;
    }

    /// Quasi-periodic accessor for arbitrary integer indices.
    pub fn value(&self, k: i64, l: i64) -> Complex64 {
        let m = self.params.m as i64;
        let n = self.params.n as i64;
        let k0 = k.rem_euclid(m);
        let l0 = l.rem_euclid(n);
        let wraps = k.div_euclid(m);
        let base = self.values[(k0 * n + l0) as usize];
        base * cis_ratio(wraps * l0, n)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.values
    }

    /// Squared Frobenius norm of the fundamental domain.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// Discrete-time sequence at rate `B`. Periodic sequences hold one period of
/// `MN` samples starting at `n = 0`; aperiodic sequences hold samples over the
/// window `[start, start + len)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeq {
    mn: usize,
    start: i64,
    periodic: bool,
    samples: Vec<Complex64>,
}

impl TimeSeq {
    pub fn periodic(mn: usize, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != mn {
            return Err(ZakOtfsError::DimensionMismatch {
                expected: format!("{mn}"),
                got: format!("{}", samples.len()),
            });
        }
        Ok(Self {
            mn,
            start: 0,
            periodic: true,
            samples,
        })
    }

    pub fn aperiodic(mn: usize, start: i64, samples: Vec<Complex64>) -> Self {
        Self {
            mn,
            start,
            periodic: false,
            samples,
        }
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn mn(&self) -> usize {
        self.mn
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Value at integer time index `n`. Periodic sequences repeat with period
    /// `MN`; aperiodic sequences are zero outside their window.
    pub fn value(&self, n: i64) -> Complex64 {
        if self.periodic {
            self.samples[n.rem_euclid(self.mn as i64) as usize]
        } else {
            let off = n - self.start;
            if off >= 0 && (off as usize) < self.samples.len() {
                self.samples[off as usize]
            } else {
                Complex64::new(0.0, 0.0)
            }
        }
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// Frequency-domain sequence over `MN` bins with `MN`-periodic indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct FdSeq {
    mn: usize,
    bins: Vec<Complex64>,
}

impl FdSeq {
    pub fn new(mn: usize, bins: Vec<Complex64>) -> Result<Self> {
        if bins.len() != mn {
            return Err(ZakOtfsError::DimensionMismatch {
                expected: format!("{mn}"),
                got: format!("{}", bins.len()),
            });
        }
        Ok(Self { mn, bins })
    }

    pub fn zeros(mn: usize) -> Self {
        Self {
            mn,
            bins: vec![Complex64::new(0.0, 0.0); mn],
        }
    }

    pub fn mn(&self) -> usize {
        self.mn
    }

    /// MN-periodic accessor.
    #[inline]
    pub fn value(&self, i: i64) -> Complex64 {
        self.bins[i.rem_euclid(self.mn as i64) as usize]
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    pub fn bins_mut(&mut self) -> &mut [Complex64] {
        &mut self.bins
    }

    pub fn energy(&self) -> f64 {
        self.bins.iter().map(|v| v.norm_sqr()).sum()
    }
}
