//! Hermitian positive-definite solvers: a banded Cholesky for matrices with
//! half-bandwidth `q`, and a dense Cholesky used by the delay-Doppler
//! baseline equalizer and as the corner block of the cyclic solver.

use num_complex::Complex64;

use crate::error::{Result, ZakOtfsError};

/// Cholesky factor of a Hermitian positive-definite band matrix.
///
/// Storage is diagonal-major: `band[d][j] = L[j + d][j]` for offsets
/// `d in 0..=q`, so each diagonal is a contiguous slice.
pub struct BandCholesky {
    n: usize,
    q: usize,
    band: Vec<Vec<Complex64>>,
}

impl BandCholesky {
    /// Factors `A = L L^H` where `entry(i, j)` returns `A[i][j]` for
    /// `0 <= j <= i < n`, `i - j <= q`.
    pub fn factor(n: usize, q: usize, entry: impl Fn(usize, usize) -> Complex64) -> Result<Self> {
        let q = q.min(n.saturating_sub(1));
        let mut band: Vec<Vec<Complex64>> = (0..=q)
            .map(|d| vec![Complex64::new(0.0, 0.0); n - d])
            .collect();
        for j in 0..n {
            let lo = j.saturating_sub(q);
            let mut diag = entry(j, j).re;
            for k in lo..j {
                diag -= band[j - k][k].norm_sqr();
            }
            if !(diag > 0.0) || !diag.is_finite() {
                return Err(ZakOtfsError::FactorizationFailed(format!(
                    "non-positive pivot {diag} at column {j}"
                )));
            }
            let piv = diag.sqrt();
            band[0][j] = Complex64::new(piv, 0.0);
            for i in (j + 1)..(j + q + 1).min(n) {
                let mut s = entry(i, j);
                for k in i.saturating_sub(q).max(lo)..j {
                    s -= band[i - k][k] * band[j - k][k].conj();
                }
                band[i - j][j] = s / piv;
            }
        }
        Ok(Self { n, q, band })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Solves `L z = b` in place.
    pub fn forward(&self, b: &mut [Complex64]) {
        for i in 0..self.n {
            let mut s = b[i];
            for k in i.saturating_sub(self.q)..i {
                s -= self.band[i - k][k] * b[k];
            }
            b[i] = s / self.band[0][i].re;
        }
    }

    /// Solves `L^H u = z` in place.
    pub fn backward(&self, z: &mut [Complex64]) {
        for i in (0..self.n).rev() {
            let mut s = z[i];
            for j in (i + 1)..(i + self.q + 1).min(self.n) {
                s -= self.band[j - i][i].conj() * z[j];
            }
            z[i] = s / self.band[0][i].re;
        }
    }

    /// Solves `A x = b` for multiple stacked right-hand sides of length `n`.
    pub fn solve(&self, b: &mut [Complex64]) {
        debug_assert_eq!(b.len() % self.n, 0);
        for chunk in b.chunks_mut(self.n) {
            self.forward(chunk);
            self.backward(chunk);
        }
    }
}

/// Dense Hermitian positive-definite matrix with in-place Cholesky.
///
/// Row-major full storage; only the lower triangle is referenced during the
/// factorization, which keeps the inner dot products over contiguous rows.
pub struct DenseHermitian {
    n: usize,
    a: Vec<Complex64>,
}

impl DenseHermitian {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            a: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_entries(n: usize, entry: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.a[i * n + j] = entry(i, j);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        self.a[i * self.n + j] += v;
    }

    /// Left-looking Cholesky `A = L L^H`; the factor overwrites the lower
    /// triangle.
    pub fn cholesky(mut self) -> Result<DenseCholesky> {
        let n = self.n;
        for i in 0..n {
            let (head, tail) = self.a.split_at_mut(i * n);
            let row_i = &mut tail[..n];
            for j in 0..i {
                let row_j = &head[j * n..j * n + j];
                let mut s = row_i[j];
                for (x, y) in row_i[..j].iter().zip(row_j) {
                    s -= x * y.conj();
                }
                row_i[j] = s / head[j * n + j].re;
            }
            let mut d = row_i[i].re;
            for x in row_i[..i].iter() {
                d -= x.norm_sqr();
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(ZakOtfsError::FactorizationFailed(format!(
                    "non-positive pivot {d} at column {i}"
                )));
            }
            row_i[i] = Complex64::new(d.sqrt(), 0.0);
        }
        Ok(DenseCholesky { n, l: self.a })
    }
}

/// Dense Cholesky factor; solves via forward and backward substitution.
pub struct DenseCholesky {
    n: usize,
    l: Vec<Complex64>,
}

impl DenseCholesky {
    pub fn solve_in_place(&self, b: &mut [Complex64]) {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        for i in 0..n {
            let row = &self.l[i * n..i * n + i];
            let mut s = b[i];
            for (x, y) in row.iter().zip(b.iter()) {
                s -= x * y;
            }
            b[i] = s / self.l[i * n + i].re;
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in (i + 1)..n {
                s -= self.l[j * n + i].conj() * b[j];
            }
            b[i] = s / self.l[i * n + i].re;
        }
    }
}
