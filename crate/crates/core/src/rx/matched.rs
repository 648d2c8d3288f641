use num_complex::Complex;

use crate::error::Result;
use crate::scalar::Real;
use crate::signal::{design_rrc, StreamingFir, TapSet};

/// Receive RRC filter. The output stays at the input rate (2 samples per
/// symbol); the decimation by two happens at the timing loop's strobe.
#[derive(Clone, Debug)]
pub struct MatchedFilter<T> {
    taps: TapSet<T>,
    fir: StreamingFir<T>,
}

impl<T: Real> MatchedFilter<T> {
    pub fn new(rolloff: T, span_symbols: usize, sps: usize) -> Result<Self> {
        let taps = design_rrc(rolloff, span_symbols, sps)?;
        let fir = StreamingFir::new(&taps)?;
        Ok(Self { taps, fir })
    }

    pub fn taps(&self) -> &TapSet<T> {
        &self.taps
    }

    /// Group delay in samples.
    pub fn delay(&self) -> usize {
        (self.taps.len() - 1) / 2
    }

    pub fn process(&mut self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        self.fir.process(x)
    }
}

/// Stateless convenience wrapper: filters `x` from a zero initial state.
pub fn matched_filter<T: Real>(x: &[Complex<T>], rolloff: T, span_symbols: usize, sps: usize) -> Result<Vec<Complex<T>>> {
    Ok(MatchedFilter::new(rolloff, span_symbols, sps)?.process(x))
}
