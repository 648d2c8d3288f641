//! Waveform fixture file.
//!
//! Little-endian layout, 32-byte header followed by samples:
//!
//! | offset | type    | field                         |
//! |--------|---------|-------------------------------|
//! | 0      | [u8; 4] | magic `EMGW`                  |
//! | 4      | u32     | format version (1)            |
//! | 8      | f64     | sample rate, Hz               |
//! | 16     | u32     | mode (0 single carrier, 1 CP-OFDM) |
//! | 20     | u32     | frame count                   |
//! | 24     | u64     | sample count N                |
//! | 32     | f32 × 2N| interleaved re, im            |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex;

use super::TxMode;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::signal::SampleBuffer;

pub const MAGIC: [u8; 4] = *b"EMGW";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WaveformHeader {
    pub sample_rate_hz: f64,
    pub mode: TxMode,
    pub frame_count: u32,
    pub sample_count: u64,
}

pub fn write_waveform<T: Real, W: Write>(mut w: W, buf: &SampleBuffer<T>, mode: TxMode, frame_count: u32) -> Result<()> {
    let mut head = [0u8; HEADER_LEN];
    head[0..4].copy_from_slice(&MAGIC);
    head[4..8].copy_from_slice(&VERSION.to_le_bytes());
    head[8..16].copy_from_slice(&buf.sample_rate_hz().to_f64_lossy().to_le_bytes());
    head[16..20].copy_from_slice(&mode.code().to_le_bytes());
    head[20..24].copy_from_slice(&frame_count.to_le_bytes());
    head[24..32].copy_from_slice(&(buf.len() as u64).to_le_bytes());
    w.write_all(&head)?;
    for s in buf.samples() {
        w.write_all(&(s.re.to_f64_lossy() as f32).to_le_bytes())?;
        w.write_all(&(s.im.to_f64_lossy() as f32).to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_waveform<T: Real, R: Read>(mut r: R) -> Result<(WaveformHeader, SampleBuffer<T>)> {
    let mut head = [0u8; HEADER_LEN];
    r.read_exact(&mut head)?;
    if head[0..4] != MAGIC {
        return Err(Error::Format("bad waveform magic".into()));
    }
    let version = u32::from_le_bytes(head[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(Error::Format(format!("unsupported waveform version {version}")));
    }
    let rate = f64::from_le_bytes(head[8..16].try_into().unwrap());
    let mode_code = u32::from_le_bytes(head[16..20].try_into().unwrap());
    let mode = TxMode::from_code(mode_code)
        .ok_or_else(|| Error::Format(format!("unknown waveform mode {mode_code}")))?;
    let frame_count = u32::from_le_bytes(head[20..24].try_into().unwrap());
    let n = u64::from_le_bytes(head[24..32].try_into().unwrap());
    let mut samples = Vec::with_capacity(n.min(1 << 26) as usize);
    let mut pair = [0u8; 8];
    for i in 0..n {
        r.read_exact(&mut pair).map_err(|e| {
            Error::Format(format!("waveform truncated at sample {i} of {n}: {e}"))
        })?;
        let re = f32::from_le_bytes(pair[0..4].try_into().unwrap());
        let im = f32::from_le_bytes(pair[4..8].try_into().unwrap());
        samples.push(Complex::new(T::lit(re as f64), T::lit(im as f64)));
    }
    let buf = SampleBuffer::new(samples, T::lit(rate))?;
    Ok((
        WaveformHeader {
            sample_rate_hz: rate,
            mode,
            frame_count,
            sample_count: n,
        },
        buf,
    ))
}

pub fn save_waveform<T: Real>(path: &Path, buf: &SampleBuffer<T>, mode: TxMode, frame_count: u32) -> Result<()> {
    write_waveform(BufWriter::new(File::create(path)?), buf, mode, frame_count)
}

pub fn load_waveform<T: Real>(path: &Path) -> Result<(WaveformHeader, SampleBuffer<T>)> {
    read_waveform(BufReader::new(File::open(path)?))
}
