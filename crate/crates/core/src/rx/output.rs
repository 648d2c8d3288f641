use std::io::Write;
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::framesync::DetectedFrame;
use super::timing::TimedSymbol;
use crate::error::Result;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RxDiagnostics<T> {
    /// Coarse estimate applied, `None` when no clear line was found.
    pub cfc_estimate_hz: Option<T>,
    pub agc_gain: T,
    pub timing_locked: bool,
    /// The timing error variance stayed above threshold for a whole lock
    /// window at some point.
    pub timing_lock_lost: bool,
    pub timing_error_variance: T,
    pub carrier_locked: bool,
    pub carrier_phase_rad: T,
    pub frames_detected: usize,
    pub frames_dropped_estimate: usize,
    pub symbols: usize,
    pub strobe_duty: T,
    pub final_mu: T,
}

/// Per-stage signals, kept when `dump_taps` is set.
#[derive(Clone, Debug, Default)]
pub struct TapDump<T> {
    pub agc: Vec<Complex<T>>,
    pub matched: Vec<Complex<T>>,
    pub cfc: Vec<Complex<T>>,
    pub timing: Vec<TimedSymbol<T>>,
    pub ffc: Vec<Complex<T>>,
    pub ped: Vec<T>,
}

impl<T: Real> TapDump<T> {
    /// Writes `index,agc_re,agc_im,matched_re,matched_im,cfc_re,cfc_im`.
    pub fn write_sample_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,agc_re,agc_im,matched_re,matched_im,cfc_re,cfc_im")?;
        let zero = Complex::default();
        for i in 0..self.agc.len() {
            let a = self.agc[i];
            let m = self.matched.get(i).copied().unwrap_or(zero);
            let c = self.cfc.get(i).copied().unwrap_or(zero);
            writeln!(w, "{i},{},{},{},{},{},{}", a.re, a.im, m.re, m.im, c.re, c.im)?;
        }
        Ok(())
    }

    /// Writes `index,time,mu,ted_error,timing_re,timing_im,ffc_re,ffc_im,ped_error`.
    pub fn write_symbol_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index,time,mu,ted_error,timing_re,timing_im,ffc_re,ffc_im,ped_error")?;
        for (i, t) in self.timing.iter().enumerate() {
            let f = self.ffc[i];
            writeln!(
                w,
                "{i},{},{},{},{},{},{},{},{}",
                t.time, t.mu, t.error, t.value.re, t.value.im, f.re, f.im, self.ped[i]
            )?;
        }
        Ok(())
    }

    /// Writes `rx_taps_samples.csv` and `rx_taps_symbols.csv` into `dir`.
    pub fn write_csv_files(&self, dir: &Path) -> Result<()> {
        let f = std::io::BufWriter::new(std::fs::File::create(dir.join("rx_taps_samples.csv"))?);
        self.write_sample_csv(f)?;
        let f = std::io::BufWriter::new(std::fs::File::create(dir.join("rx_taps_symbols.csv"))?);
        self.write_symbol_csv(f)
    }
}

/// Receiver output. `bit1`, `bit2` and `valid` run over every recovered
/// symbol; the bits are false wherever `valid` is low.
#[derive(Clone, Debug)]
pub struct RxOutput<T> {
    pub bit1: Vec<bool>,
    pub bit2: Vec<bool>,
    pub valid: Vec<bool>,
    pub frame_starts: Vec<usize>,
    pub frames: Vec<DetectedFrame<T>>,
    /// Frequency left after coarse correction, from the carrier loop
    /// integrator.
    pub residual_cfo_hz: T,
    pub diagnostics: RxDiagnostics<T>,
    /// Derotated symbols at the carrier-loop output.
    pub symbols: Vec<Complex<T>>,
    /// Interpolation instant of each symbol in matched-filter samples.
    pub symbol_times: Vec<T>,
    /// Strobe flag per matched-filter sample (the first two are absent).
    pub strobes: Vec<bool>,
    pub taps: Option<TapDump<T>>,
}

/// The JSON-serializable part of [`RxOutput`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RxReport<T> {
    pub residual_cfo_hz: T,
    pub frame_starts: Vec<usize>,
    pub frames: Vec<DetectedFrame<T>>,
    pub valid_symbols: usize,
    pub diagnostics: RxDiagnostics<T>,
}

impl<T: Real + Serialize> RxOutput<T> {
    pub fn report(&self) -> RxReport<T> {
        RxReport {
            residual_cfo_hz: self.residual_cfo_hz,
            frame_starts: self.frame_starts.clone(),
            frames: self.frames.clone(),
            valid_symbols: self.valid.iter().filter(|&&v| v).count(),
            diagnostics: self.diagnostics.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.report())?)
    }
}

impl<T> RxOutput<T> {
    /// Decoded bits in stream order: `bit1, bit2` of each valid symbol.
    pub fn valid_bits(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(2 * self.valid.len());
        for (j, &v) in self.valid.iter().enumerate() {
            if v {
                out.push(self.bit1[j]);
                out.push(self.bit2[j]);
            }
        }
        out
    }

    /// Raw bit file: the valid bits packed MSB first, last byte zero-padded.
    pub fn write_bits<W: Write>(&self, mut w: W) -> Result<()> {
        let bits = self.valid_bits();
        for chunk in bits.chunks(8) {
            let mut b = 0u8;
            for (i, &bit) in chunk.iter().enumerate() {
                if bit {
                    b |= 0x80 >> i;
                }
            }
            w.write_all(&[b])?;
        }
        Ok(())
    }
}
