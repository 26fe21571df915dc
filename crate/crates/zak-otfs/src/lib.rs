//! Zak-OTFS delay-Doppler modem simulator.
//!
//! Implements the full transmit/channel/receive chain of a Zak-OTFS modem in
//! the discrete delay-Doppler (DD) domain, converts the effective DD channel
//! to a cyclically-banded frequency-domain (FD) channel matrix, and equalizes
//! in the FD with a banded LMMSE solver. A dense DD-domain MMSE baseline and
//! an oversampled waveform chain are included as the references the fast path
//! is validated against.
//!
//! Modules:
//! * [`params`] / [`frame`] / [`zak`] — DD grid, quasi-periodic frames, and
//!   the discrete Zak transform pairs (IDZT/DZT, IDFZT/DFZT).
//! * [`waveform`] — oversampled pulse-shaped chain used as the ground truth.
//! * [`channel`] — Vehicular-A channel model, closed-form effective DD taps,
//!   and the periodic twisted-convolution input-output relation.
//! * [`fd`] — DD-to-FD channel conversion and the banded FD matrix.
//! * [`equalizer`] — banded FD LMMSE with exact cyclic-corner handling, the
//!   dense DD baseline, and QAM symbol recovery.
//! * [`sim`] — reproducible Monte-Carlo BER sweeps and CSV output.

pub mod channel;
pub mod equalizer;
pub mod error;
pub mod fd;
mod fft;
pub mod frame;
pub mod linalg;
pub mod params;
pub mod qam;
pub mod sim;
pub mod waveform;
pub mod zak;

pub use error::{Result, ZakOtfsError};
pub use frame::{FdSeq, QuasiPeriodicDdFrame, TimeSeq};
pub use params::FrameParams;
