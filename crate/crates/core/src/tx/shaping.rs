use num_complex::Complex;
use rand::Rng;

use super::frame::{generate_frame, FramePayload};
use super::ofdm::{ofdm_modulate, CarrierMap};
use super::qpsk::{preamble_symbols, qpsk_map};
use super::{TxConfig, TxMode};
use crate::error::{config_err, Result};
use crate::scalar::Real;
use crate::seed::rng_for;
use crate::signal::{convolve_causal, design_rrc, SampleBuffer, TapSet};

/// Zero-stuffed upsampling by `cfg.sps` followed by RRC filtering. The
/// filter tail is kept, so the output has `n·sps + taps - 1` samples and the
/// first symbol peaks at sample `span·sps`.
pub fn pulse_shape<T: Real>(symbols: &[Complex<T>], cfg: &TxConfig<T>) -> Result<SampleBuffer<T>> {
    if cfg.sps != 2 {
        return Err(config_err(format!("pulse shaping expects 2 samples/symbol, got {}", cfg.sps)));
    }
    let taps = design_rrc(cfg.rolloff, cfg.span_symbols, cfg.sps)?;
    Ok(shape_with(symbols, &taps, cfg.sps, cfg.sample_rate_hz()))
}

fn shape_with<T: Real>(symbols: &[Complex<T>], taps: &TapSet<T>, sps: usize, rate: T) -> SampleBuffer<T> {
    let mut up = vec![Complex::default(); symbols.len() * sps + taps.len() - 1];
    for (i, &s) in symbols.iter().enumerate() {
        up[i * sps] = s;
    }
    SampleBuffer::from_parts_unchecked(convolve_causal(&up, &taps.taps), rate)
}

/// A transmitted burst: random lead-in symbols, back-to-back frames, and a
/// random tail that flushes the receive filters.
#[derive(Clone, Debug)]
pub struct Burst<T> {
    pub waveform: SampleBuffer<T>,
    pub frames: Vec<FramePayload>,
    /// Every transmitted symbol, before OFDM or shaping.
    pub symbols: Vec<Complex<T>>,
    /// Index into `symbols` of each frame's first preamble symbol.
    pub frame_starts: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Transmitter<T> {
    cfg: TxConfig<T>,
    taps: TapSet<T>,
}

impl<T: Real> Transmitter<T> {
    pub fn new(cfg: TxConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let taps = design_rrc(cfg.rolloff, cfg.span_symbols, cfg.sps)?;
        Ok(Self { cfg, taps })
    }

    pub fn config(&self) -> &TxConfig<T> {
        &self.cfg
    }

    pub fn taps(&self) -> &TapSet<T> {
        &self.taps
    }

    /// Preamble followed by the QPSK-mapped payload.
    pub fn frame_symbols(&self, frame: &FramePayload) -> Result<Vec<Complex<T>>> {
        let mut s = preamble_symbols();
        s.extend(qpsk_map(&frame.payload_bits)?);
        Ok(s)
    }

    /// Shapes an arbitrary symbol stream according to the configured mode.
    pub fn shape(&self, symbols: &[Complex<T>]) -> Result<SampleBuffer<T>> {
        let rate = self.cfg.sample_rate_hz();
        match self.cfg.mode {
            TxMode::SingleCarrier => Ok(shape_with(symbols, &self.taps, self.cfg.sps, rate)),
            TxMode::CpOfdm => {
                let map = CarrierMap::full(self.cfg.nfft);
                let per = map.bins().len();
                let mut padded = symbols.to_vec();
                let rem = padded.len() % per;
                if rem != 0 {
                    padded.resize(padded.len() + per - rem, Complex::default());
                }
                let x = ofdm_modulate(&padded, self.cfg.nfft, self.cfg.cp_len)?;
                Ok(shape_with(&x, &self.taps, self.cfg.sps, rate))
            }
        }
    }

    /// Builds `n_frames` frames seeded from `seed` plus random lead-in and
    /// tail symbols, and shapes the whole stream.
    pub fn burst(&self, seed: u64, n_frames: usize, lead_in: usize, tail: usize) -> Result<Burst<T>> {
        let frames = (0..n_frames as u64)
            .map(|i| generate_frame(seed, i, self.cfg.payload_bits))
            .collect::<Result<Vec<_>>>()?;
        self.burst_from_frames(seed, frames, lead_in, tail)
    }

    pub fn burst_from_frames(
        &self,
        seed: u64,
        frames: Vec<FramePayload>,
        lead_in: usize,
        tail: usize,
    ) -> Result<Burst<T>> {
        let mut rng = rng_for(seed, u64::MAX);
        let mut random_symbols = |n: usize| -> Result<Vec<Complex<T>>> {
            let bits: Vec<bool> = (0..2 * n).map(|_| rng.random()).collect();
            qpsk_map(&bits)
        };
        let mut symbols = random_symbols(lead_in)?;
        let mut frame_starts = Vec::with_capacity(frames.len());
        for f in &frames {
            frame_starts.push(symbols.len());
            symbols.extend(self.frame_symbols(f)?);
        }
        symbols.extend(random_symbols(tail)?);
        let waveform = self.shape(&symbols)?;
        Ok(Burst {
            waveform,
            frames,
            symbols,
            frame_starts,
        })
    }
}
