//! Thin wrapper over rustfft with a per-thread plan cache.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place unnormalized forward DFT: `X[k] = sum_n x[n] exp(-j 2 pi k n / L)`.
pub fn fft_forward(buf: &mut [Complex64]) {
    PLANNER.with(|p| {
        let fft = p.borrow_mut().plan_fft_forward(buf.len());
        fft.process(buf);
    });
}

/// In-place unnormalized inverse DFT: `x[n] = sum_k X[k] exp(+j 2 pi k n / L)`.
pub fn fft_inverse(buf: &mut [Complex64]) {
    PLANNER.with(|p| {
        let fft = p.borrow_mut().plan_fft_inverse(buf.len());
        fft.process(buf);
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_inverse_round_trip() {
        let orig: Vec<Complex64> = (0..12)
            .map(|i| Complex64::new((i as f64).sin(), (i as f64).cos()))
            .collect();
        let mut buf = orig.clone();
        fft_forward(&mut buf);
        fft_inverse(&mut buf);
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a / 12.0 - b).norm() < 1e-12);
        }
    }
}
