use num_complex::Complex;

use super::{SampleBuffer, TapSet};
use crate::error::{config_err, Result};
use crate::scalar::{Real, Sample};

/// Causal FIR filter: `y[k] = Σ_j h[j]·x[k-j]`, zero-padded before the
/// start, output length equal to input length.
pub fn fir_filter<T: Real>(x: &SampleBuffer<T>, h: &TapSet<T>) -> Result<SampleBuffer<T>> {
    if h.is_empty() {
        return Err(config_err("FIR tap set is empty"));
    }
    Ok(x.with_samples(convolve_causal(x.samples(), &h.taps)))
}

/// Causal convolution truncated to the input length.
pub fn convolve_causal<T: Real, S: Sample<T>>(x: &[S], h: &[T]) -> Vec<S> {
    let mut y = vec![S::default(); x.len()];
    for (k, yk) in y.iter_mut().enumerate() {
        let jmax = h.len().min(k + 1);
        let mut acc = S::default();
        for (j, &hj) in h[..jmax].iter().enumerate() {
            acc += x[k - j] * hj;
        }
        *yk = acc;
    }
    y
}

/// Convolution aligned on the filter centre, so a linear-phase filter
/// introduces no delay. Output length equals input length.
pub fn convolve_centered<T: Real, S: Sample<T>>(x: &[S], h: &[T]) -> Vec<S> {
    let d = h.len().saturating_sub(1) / 2;
    let n = x.len();
    (0..n)
        .map(|k| {
            let mut acc = S::default();
            for (j, &hj) in h.iter().enumerate() {
                // y[k] = Σ h[j] x[k + d - j]
                let idx = k + d;
                if idx >= j && idx - j < n {
                    acc += x[idx - j] * hj;
                }
            }
            acc
        })
        .collect()
}

/// FIR filter that carries its delay line across calls. Feeding a stream in
/// arbitrary chunks yields the same output as [`fir_filter`] on the whole.
#[derive(Clone, Debug)]
pub struct StreamingFir<T> {
    taps: Vec<T>,
    history: Vec<Complex<T>>,
    pos: usize,
}

impl<T: Real> StreamingFir<T> {
    pub fn new(taps: &TapSet<T>) -> Result<Self> {
        if taps.is_empty() {
            return Err(config_err("FIR tap set is empty"));
        }
        Ok(Self {
            taps: taps.taps.clone(),
            history: vec![Complex::default(); taps.len()],
            pos: 0,
        })
    }

    pub fn push(&mut self, x: Complex<T>) -> Complex<T> {
        let n = self.taps.len();
        self.history[self.pos] = x;
        let mut acc = Complex::default();
        // history[pos] is x[k], history[pos-1] is x[k-1], ...
        for (j, &h) in self.taps.iter().enumerate() {
            let idx = (self.pos + n - j) % n;
            acc += self.history[idx] * h;
        }
        self.pos = (self.pos + 1) % n;
        acc
    }

    pub fn process(&mut self, input: &[Complex<T>]) -> Vec<Complex<T>> {
        input.iter().map(|&x| self.push(x)).collect()
    }

    pub fn reset(&mut self) {
        self.history.iter_mut().for_each(|h| *h = Complex::default());
        self.pos = 0;
    }
}
