//! Shared numeric kernels: FIR filtering, root-raised-cosine design, DFT,
//! fast Walsh-Hadamard transform and fractional-delay interpolation.
//!
//! Every function here is a pure function of its inputs operating on finite
//! buffers with zero-padded boundaries. Streaming state lives in the chain
//! modules that compose these kernels.

mod buffer;
mod dft;
mod fir;
mod interp;
mod rrc;
mod wht;

pub use buffer::{SampleBuffer, TapSet};
pub use dft::{dft, idft, DftPlan};
pub use fir::{convolve_causal, convolve_centered, fir_filter, StreamingFir};
pub use interp::{parabolic_interpolate, WindowedSinc};
pub use rrc::{design_rrc, raised_cosine_pulse, rrc_impulse};
pub use wht::{fwht, fwht_in_place, hadamard_to_sequency_index, WhtOrdering};
