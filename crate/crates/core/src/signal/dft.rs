use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::SampleBuffer;
use crate::error::{dim_err, Result};
use crate::scalar::Real;

/// Planned forward/inverse DFT of a fixed size.
#[derive(Clone)]
pub struct DftPlan<T: Real> {
    n: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> std::fmt::Debug for DftPlan<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DftPlan").field("n", &self.n).finish()
    }
}

impl<T: Real> DftPlan<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(dim_err("DFT size must be positive"));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unscaled forward transform in place: `X[k] = Σ x[n]·e^{-j2πkn/N}`.
    pub fn forward(&self, buf: &mut [Complex<T>]) {
        debug_assert_eq!(buf.len(), self.n);
        self.forward.process(buf);
    }

    /// Inverse transform in place, scaled by `1/N`.
    pub fn inverse(&self, buf: &mut [Complex<T>]) {
        debug_assert_eq!(buf.len(), self.n);
        self.inverse.process(buf);
        let s = T::one() / T::from_usize_lossy(self.n);
        buf.iter_mut().for_each(|v| *v *= s);
    }
}

/// Forward DFT of `x` zero-padded to `nfft` points.
pub fn dft<T: Real>(x: &SampleBuffer<T>, nfft: usize) -> Result<Vec<Complex<T>>> {
    if nfft == 0 {
        return Err(dim_err("nfft must be positive"));
    }
    if nfft < x.len() {
        return Err(dim_err(format!(
            "nfft {nfft} shorter than input length {}",
            x.len()
        )));
    }
    let mut buf = x.samples().to_vec();
    buf.resize(nfft, Complex::default());
    DftPlan::new(nfft)?.forward(&mut buf);
    Ok(buf)
}

/// Inverse DFT with `1/N` scaling, so `idft(dft(x)) = x`.
pub fn idft<T: Real>(spectrum: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let mut buf = spectrum.to_vec();
    DftPlan::new(buf.len())?.inverse(&mut buf);
    Ok(buf)
}
