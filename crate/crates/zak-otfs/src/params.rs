//! Frame parameters for the delay-Doppler grid.
//!
//! A frame carries `M * N` symbols on an `M x N` delay-Doppler grid with
//! delay period `tau_p = M / B` and Doppler period `nu_p = N / T = 1 / tau_p`.
//! The product `M * N` equals the time-bandwidth product `B * T`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZakOtfsError};

const REL_TOL: f64 = 1e-12;

/// System constants for one Zak-OTFS frame configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameParams {
    /// Delay bins per frame.
    pub m: usize,
    /// Doppler bins per frame.
    pub n: usize,
    /// Bandwidth in Hz.
    pub b_hz: f64,
    /// Frame duration in seconds.
    pub t_s: f64,
    /// Channel delay spread in seconds.
    pub tau_max_s: f64,
    /// Maximum channel Doppler shift in Hz.
    pub nu_max_hz: f64,
    /// Gaussian transmit-filter shape factor (frequency localization).
    pub alpha_g: f64,
    /// Gaussian window shape factor (time localization).
    pub beta_g: f64,
    /// Doppler-tap half-width, `1 + ceil(T * nu_max)`.
    pub l_max: usize,
    /// Waveform oversampling factor relative to `B`.
    pub q: usize,
}

impl FrameParams {
    /// Builds params from the Doppler period `nu_p`, deriving `B = M * nu_p`
    /// and `T = N / nu_p` so that `tau_p * nu_p = 1` holds exactly.
    pub fn from_doppler_period(
        m: usize,
        n: usize,
        nu_p_hz: f64,
        tau_max_s: f64,
        nu_max_hz: f64,
        alpha_g: f64,
        beta_g: f64,
        q: usize,
    ) -> Result<Self> {
        if nu_p_hz <= 0.0 {
            return Err(ZakOtfsError::InvalidParameter(format!(
                "nu_p must be positive, got {nu_p_hz}"
            )));
        }
        let b_hz = m as f64 * nu_p_hz;
        let t_s = n as f64 / nu_p_hz;
        Self::new(m, n, b_hz, t_s, tau_max_s, nu_max_hz, alpha_g, beta_g, q)
    }

    /// Builds params from explicit `B` and `T`, validating `MN = B * T`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        m: usize,
        n: usize,
        b_hz: f64,
        t_s: f64,
        tau_max_s: f64,
        nu_max_hz: f64,
        alpha_g: f64,
        beta_g: f64,
        q: usize,
    ) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(ZakOtfsError::InvalidParameter(
                "M and N must be positive".into(),
            ));
        }
        if q == 0 {
            return Err(ZakOtfsError::InvalidParameter(
                "oversampling factor Q must be positive".into(),
            ));
        }
        if b_hz <= 0.0 || t_s <= 0.0 {
            return Err(ZakOtfsError::InvalidParameter(
                "B and T must be positive".into(),
            ));
        }
        if tau_max_s < 0.0 || nu_max_hz < 0.0 {
            return Err(ZakOtfsError::InvalidParameter(
                "tau_max and nu_max must be non-negative".into(),
            ));
        }
        if alpha_g <= 0.0 || beta_g <= 0.0 {
            return Err(ZakOtfsError::InvalidParameter(
                "alpha_g and beta_g must be positive".into(),
            ));
        }
        let mn = (m * n) as f64;
        if rel_err(b_hz * t_s, mn) > REL_TOL {
            return Err(ZakOtfsError::InvalidParameter(format!(
                "MN = {mn} but B*T = {}",
                b_hz * t_s
            )));
        }
        let tau_p = m as f64 / b_hz;
        let nu_p = n as f64 / t_s;
        if rel_err(tau_p * nu_p, 1.0) > REL_TOL {
            return Err(ZakOtfsError::InvalidParameter(format!(
                "tau_p * nu_p = {} != 1",
                tau_p * nu_p
            )));
        }
        // Crystallization: the channel spreads must fit inside one period.
        if b_hz * tau_max_s >= m as f64 {
            return Err(ZakOtfsError::CrystallizationViolated(format!(
                "B * tau_max = {} >= M = {m}",
                b_hz * tau_max_s
            )));
        }
        if 2.0 * t_s * nu_max_hz >= n as f64 {
            return Err(ZakOtfsError::CrystallizationViolated(format!(
                "2 * T * nu_max = {} >= N = {n}",
                2.0 * t_s * nu_max_hz
            )));
        }
        let l_max = 1 + (t_s * nu_max_hz).ceil() as usize;
        Ok(Self {
            m,
            n,
            b_hz,
            t_s,
            tau_max_s,
            nu_max_hz,
            alpha_g,
            beta_g,
            l_max,
            q,
        })
    }

    /// Default configuration: M=31, N=37, Doppler period 30 kHz (B = 930 kHz,
    /// T ~ 1.233 ms), Veh-A delay spread 2.51 us, nu_max = 815 Hz, Gaussian
    /// filters with alpha_g = beta_g = 1.584, Q = 16.
    pub fn vehicular_default() -> Self {
        Self::from_doppler_period(31, 37, 30_000.0, 2.51e-6, 815.0, 1.584, 1.584, 16)
            .expect("default params are valid")
    }

    /// Number of symbols per frame.
    pub fn mn(&self) -> usize {
        self.m * self.n
    }

    /// Delay period `tau_p = M / B` in seconds.
    pub fn tau_p(&self) -> f64 {
        self.m as f64 / self.b_hz
    }

    /// Doppler period `nu_p = N / T` in Hz.
    pub fn nu_p(&self) -> f64 {
        self.n as f64 / self.t_s
    }

    /// Waveform sample rate `Q * B` in Hz.
    pub fn sample_rate(&self) -> f64 {
        self.q as f64 * self.b_hz
    }

    /// Full band width of the regularized normal matrix, `4 * l_max + 1`.
    pub fn full_band_width(&self) -> usize {
        4 * self.l_max + 1
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
