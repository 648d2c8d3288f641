//! Transmitter: frame bits, Gray QPSK mapping, preamble insertion, optional
//! CP-OFDM and root-raised-cosine pulse shaping with zero-stuffed
//! upsampling.

mod frame;
mod ofdm;
mod qpsk;
mod shaping;
pub mod waveform_file;

pub use frame::{generate_frame, generate_frame_bits, FramePayload, BARKER13, HEADER_BITS, HEADER_LEN};
pub use ofdm::{ofdm_demodulate, ofdm_modulate, ofdm_modulate_with, CarrierMap};
pub use qpsk::{bpsk_diagonal, preamble_symbols, qpsk_demap, qpsk_demap_symbol, qpsk_map, BITS_PER_SYMBOL};
pub use shaping::{pulse_shape, Burst, Transmitter};

use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TxMode {
    #[default]
    SingleCarrier,
    CpOfdm,
}

impl TxMode {
    pub fn code(self) -> u32 {
        match self {
            TxMode::SingleCarrier => 0,
            TxMode::CpOfdm => 1,
        }
    }

    pub fn from_code(code: u32) -> Option<Self> {
        match code {
            0 => Some(TxMode::SingleCarrier),
            1 => Some(TxMode::CpOfdm),
            _ => None,
        }
    }
}

/// Transmitter configuration. Defaults: rolloff 0.5, 2 samples/symbol,
/// 10-symbol RRC span, 100 kHz symbol rate (200 kHz sample rate).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TxConfig<T> {
    pub mode: TxMode,
    pub rolloff: T,
    pub sps: usize,
    pub span_symbols: usize,
    pub nfft: usize,
    pub cp_len: usize,
    pub symbol_rate_hz: T,
    /// Payload bits per frame (even).
    pub payload_bits: usize,
}

impl<T: Real> Default for TxConfig<T> {
    fn default() -> Self {
        Self {
            mode: TxMode::SingleCarrier,
            rolloff: T::lit(0.5),
            sps: 2,
            span_symbols: 10,
            nfft: 64,
            cp_len: 16,
            symbol_rate_hz: T::lit(100e3),
            payload_bits: 2048,
        }
    }
}

impl<T: Real> TxConfig<T> {
    pub fn sample_rate_hz(&self) -> T {
        self.symbol_rate_hz * T::from_usize_lossy(self.sps)
    }

    pub fn payload_symbols(&self) -> usize {
        self.payload_bits / BITS_PER_SYMBOL
    }

    /// Symbols per frame: preamble plus payload.
    pub fn frame_symbols(&self) -> usize {
        HEADER_LEN + self.payload_symbols()
    }

    /// The known preamble (two Barker-13 repetitions on the diagonal).
    pub fn preamble(&self) -> Vec<num_complex::Complex<T>> {
        preamble_symbols()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rolloff > T::zero() && self.rolloff <= T::one()) {
            return Err(config_err(format!("tx.rolloff must lie in (0, 1], got {}", self.rolloff)));
        }
        if self.sps != 2 {
            return Err(config_err(format!("tx.sps must be 2, got {}", self.sps)));
        }
        if self.span_symbols == 0 {
            return Err(config_err("tx.span_symbols must be positive"));
        }
        if !(self.symbol_rate_hz > T::zero()) {
            return Err(config_err("tx.symbol_rate_hz must be positive"));
        }
        if self.payload_bits == 0 || !self.payload_bits.is_multiple_of(2) {
            return Err(config_err(format!(
                "tx.payload_bits must be a positive even number, got {}",
                self.payload_bits
            )));
        }
        if self.mode == TxMode::CpOfdm {
            if self.nfft == 0 {
                return Err(config_err("tx.nfft must be positive"));
            }
            if self.cp_len >= self.nfft {
                return Err(config_err(format!(
                    "tx.cp_len ({}) must be shorter than tx.nfft ({})",
                    self.cp_len, self.nfft
                )));
            }
        }
        Ok(())
    }
}
