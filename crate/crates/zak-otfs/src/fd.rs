//! Frequency-domain channel: conversion of the effective DD taps to the
//! per-subcarrier response and assembly of the cyclically-banded channel
//! matrix.
//!
//! The response at subcarrier `i` to FD symbol `S[j]` is
//! `h_f[i, j] = sum_{k'} h[k', i - j] exp(-j 2 pi i k' / MN)`, nonzero only
//! when the cyclic offset `i - j` lies inside the Doppler tap support. The
//! rectangular matrix with duplicated wrapped columns folds exactly into a
//! square cyclic-banded matrix because the wrapped columns multiply the same
//! MN-periodic unknowns.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::channel::EffectiveDdChannel;
use crate::error::{Result, ZakOtfsError};
use crate::frame::{cis, FdSeq};
use crate::params::FrameParams;

/// Per-subcarrier FD response table: entry `(i, s)` holds the coupling from
/// FD symbol `S[(i - s) mod MN]` into output bin `i`, for `|s| <= l_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct FdResponse {
    mn: usize,
    l_max: usize,
    /// Row-major: `rows[i * (2 l_max + 1) + (s + l_max)]`.
    rows: Vec<Complex64>,
}

impl FdResponse {
    pub fn mn(&self) -> usize {
        self.mn
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    /// Coupling `h_f[i, offset s]`, zero outside the band.
    #[inline]
    pub fn get(&self, i: usize, s: i64) -> Complex64 {
        if s.unsigned_abs() as usize > self.l_max {
            return Complex64::new(0.0, 0.0);
        }
        self.rows[i * (2 * self.l_max + 1) + (s + self.l_max as i64) as usize]
    }
}

/// Computes the FD response from the effective DD taps. The `k'` sum runs
/// over the tap support only, so the cost is
/// `O(MN * (2 l_max + 1) * |k support|)`.
pub fn dd_to_fd_response(eff: &EffectiveDdChannel) -> FdResponse {
    let p = eff.params();
    let mn = p.mn();
    let l_max = eff.l_max() as usize;
    let w = 2 * l_max + 1;
    let (k_lo, k_hi) = eff.k_range();

    // exp(-j 2 pi r / MN) table indexed by r mod MN.
    let tbl: Vec<Complex64> = (0..mn)
        .map(|r| cis(-2.0 * PI * r as f64 / mn as f64))
        .collect();

    let mut rows = vec![Complex64::new(0.0, 0.0); mn * w];
    for i in 0..mn {
        for s in -(l_max as i64)..=(l_max as i64) {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in k_lo..=k_hi {
                let tap = eff.tap(k, s);
                if tap.norm_sqr() > 0.0 {
                    acc += tap * tbl[(i as i64 * k).rem_euclid(mn as i64) as usize];
                }
            }
            rows[i * w + (s + l_max as i64) as usize] = acc;
        }
    }
    FdResponse { mn, l_max, rows }
}

/// Cyclically-banded MN x MN FD channel matrix stored by diagonals.
/// `entry(i, j)` is nonzero only when the cyclic distance between `i` and
/// `j` is at most `l_max`; everything outside the band is forced to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedFdMatrix {
    mn: usize,
    l_max: usize,
    cyclic: bool,
    /// Same layout as `FdResponse`: `rows[i * (2 l_max + 1) + (s + l_max)]`
    /// stores `entry(i, (i - s) mod MN)`.
    rows: Vec<Complex64>,
}

impl BandedFdMatrix {
    pub fn mn(&self) -> usize {
        self.mn
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    /// Band coupling into bin `i` from FD symbol `S[(i - s) mod MN]`.
    #[inline]
    pub fn band(&self, i: usize, s: i64) -> Complex64 {
        if s.unsigned_abs() as usize > self.l_max {
            return Complex64::new(0.0, 0.0);
        }
        self.rows[i * (2 * self.l_max + 1) + (s + self.l_max as i64) as usize]
    }

    /// Matrix entry `H[i, j]` with cyclic band structure.
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        let mn = self.mn as i64;
        let mut s = (i as i64 - j as i64).rem_euclid(mn);
        if s > mn / 2 {
            s -= mn;
        }
        self.band(i, s)
    }

    /// Dense materialization (intended for small MN).
    pub fn to_dense(&self) -> Vec<Complex64> {
        let mn = self.mn;
        let mut out = vec![Complex64::new(0.0, 0.0); mn * mn];
        for i in 0..mn {
            for j in 0..mn {
                out[i * mn + j] = self.entry(i, j);
            }
        }
        out
    }

    /// Zeroes the band beyond `l_new`, returning a narrower matrix.
    pub fn truncate_band(&self, l_new: usize) -> Result<Self> {
        if l_new > self.l_max {
            return Err(ZakOtfsError::InvalidParameter(format!(
                "cannot widen band from {} to {l_new}",
                self.l_max
            )));
        }
        let w_old = 2 * self.l_max + 1;
        let w_new = 2 * l_new + 1;
        let mut rows = vec![Complex64::new(0.0, 0.0); self.mn * w_new];
        for i in 0..self.mn {
            for s in 0..w_new {
                rows[i * w_new + s] = self.rows[i * w_old + s + (self.l_max - l_new)];
            }
        }
        Ok(Self {
            mn: self.mn,
            l_max: l_new,
            cyclic: true,
            rows,
        })
    }
}

/// Wraps an FD response table into the cyclic banded channel matrix.
pub fn build_banded_matrix(hf: &FdResponse, params: &FrameParams) -> Result<BandedFdMatrix> {
    if hf.mn() != params.mn() {
        return Err(ZakOtfsError::DimensionMismatch {
            expected: format!("{}", params.mn()),
            got: format!("{}", hf.mn()),
        });
    }
    if 2 * hf.l_max() + 1 > params.mn() {
        return Err(ZakOtfsError::InvalidParameter(format!(
            "band width {} exceeds matrix size {}",
            2 * hf.l_max() + 1,
            params.mn()
        )));
    }
    Ok(BandedFdMatrix {
        mn: hf.mn(),
        l_max: hf.l_max(),
        cyclic: true,
        rows: hf.rows.clone(),
    })
}

/// Banded matrix-vector product `Y = H S` over the cyclic band.
pub fn fd_forward(h: &BandedFdMatrix, s: &FdSeq) -> Result<FdSeq> {
    if s.mn() != h.mn() {
        return Err(ZakOtfsError::DimensionMismatch {
            expected: format!("{}", h.mn()),
            got: format!("{}", s.mn()),
        });
    }
    let mn = h.mn();
    let l = h.l_max() as i64;
    let mut out = FdSeq::zeros(mn);
    for i in 0..mn {
        let mut acc = Complex64::new(0.0, 0.0);
        for off in -l..=l {
            acc += h.band(i, off) * s.value(i as i64 - off);
        }
        out.bins_mut()[i] = acc;
    }
    Ok(out)
}
