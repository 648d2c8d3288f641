//! Deterministic baseband link simulator.
//!
//! The crate models an EMG-sensor-to-actuator signal path end to end:
//!
//! * [`signal`]: FIR, root-raised-cosine design, DFT, fast Walsh-Hadamard
//!   transform and interpolation kernels.
//! * [`emg`]: synthetic EMG corpus, band-pass preprocessing, WHT features,
//!   template training, nearest-template classification and the two-level
//!   safety feedback.
//! * [`cavity`]: rectangular-cavity TE10l resonance, fields, stored energy,
//!   wall and dielectric loss, and quality factors.
//! * [`tx`]: frame bits, Gray QPSK, CP-OFDM and RRC pulse shaping.
//! * [`channel`]: AWGN, carrier offset, phase offset, fractional delay and
//!   sample-clock drift.
//! * [`rx`]: AGC, matched filter, fourth-power coarse frequency correction,
//!   timing recovery, carrier PLL and preamble frame synchronization.
//! * [`harness`]: configuration, link Monte Carlo, sweeps and reports.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the scalar to `f64`, which is what the harness uses.

// `!(x > 0)` is the NaN-rejecting guard used throughout validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cavity;
pub mod channel;
pub mod emg;
mod error;
pub mod harness;
pub mod rx;
mod scalar;
pub mod seed;
pub mod signal;
pub mod tx;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use scalar::{cis, Real, Sample};

pub type C64 = Complex<f64>;
pub type SampleBuffer64 = signal::SampleBuffer<f64>;
pub type TapSet64 = signal::TapSet<f64>;
pub type EmgWindow64 = emg::EmgWindow<f64>;
pub type CommandDatabase64 = emg::CommandDatabase<f64>;
pub type CavitySpec64 = cavity::CavitySpec<f64>;
pub type FieldSolution64 = cavity::FieldSolution<f64>;
pub type QosReport64 = cavity::QosReport<f64>;
pub type ChannelConfig64 = channel::ChannelConfig<f64>;
pub type TxConfig64 = tx::TxConfig<f64>;
pub type RxConfig64 = rx::RxConfig<f64>;
pub type RxOutput64 = rx::RxOutput<f64>;

pub type SampleBuffer32 = signal::SampleBuffer<f32>;
pub type ChannelConfig32 = channel::ChannelConfig<f32>;
pub type TxConfig32 = tx::TxConfig<f32>;
pub type RxConfig32 = rx::RxConfig<f32>;
