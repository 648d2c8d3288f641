use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, Error, Result};
use crate::scalar::Real;

/// Finite complex baseband buffer tagged with its sample rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleBuffer<T> {
    samples: Vec<Complex<T>>,
    sample_rate_hz: T,
}

impl<T: Real> SampleBuffer<T> {
    /// Builds a buffer, rejecting a non-positive rate or non-finite samples.
    pub fn new(samples: Vec<Complex<T>>, sample_rate_hz: T) -> Result<Self> {
        if !(sample_rate_hz > T::zero()) || !sample_rate_hz.is_finite() {
            return Err(config_err(format!(
                "sample rate must be positive and finite, got {sample_rate_hz}"
            )));
        }
        if let Some(i) = samples
            .iter()
            .position(|s| !(s.re.is_finite() && s.im.is_finite()))
        {
            return Err(Error::Domain(format!("sample {i} is not finite")));
        }
        Ok(Self {
            samples,
            sample_rate_hz,
        })
    }

    pub fn from_real(samples: &[T], sample_rate_hz: T) -> Result<Self> {
        Self::new(
            samples.iter().map(|&r| Complex::new(r, T::zero())).collect(),
            sample_rate_hz,
        )
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex<T>> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> T {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean power `Σ|x|²/N`, zero for an empty buffer.
    pub fn mean_power(&self) -> T {
        if self.samples.is_empty() {
            return T::zero();
        }
        self.samples.iter().map(|s| s.norm_sqr()).sum::<T>() / T::from_usize_lossy(self.len())
    }

    pub fn energy(&self) -> T {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }

    /// Replaces the samples while keeping the rate. Finite values are the
    /// caller's responsibility inside the crate.
    pub(crate) fn with_samples(&self, samples: Vec<Complex<T>>) -> Self {
        Self {
            samples,
            sample_rate_hz: self.sample_rate_hz,
        }
    }

    pub(crate) fn from_parts_unchecked(samples: Vec<Complex<T>>, sample_rate_hz: T) -> Self {
        Self {
            samples,
            sample_rate_hz,
        }
    }
}

/// Real FIR taps plus the normalization factor that was applied to them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TapSet<T> {
    pub taps: Vec<T>,
    pub gain: T,
}

impl<T: Real> TapSet<T> {
    pub fn new(taps: Vec<T>) -> Self {
        Self {
            taps,
            gain: T::one(),
        }
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }

    pub fn energy(&self) -> T {
        self.taps.iter().map(|&t| t * t).sum()
    }

    /// Largest deviation `|h[i] - h[len-1-i]|`.
    pub fn asymmetry(&self) -> T {
        let n = self.taps.len();
        (0..n / 2)
            .map(|i| (self.taps[i] - self.taps[n - 1 - i]).abs())
            .fold(T::zero(), T::max)
    }

    /// Group delay in samples of a linear-phase design.
    pub fn group_delay(&self) -> usize {
        self.taps.len().saturating_sub(1) / 2
    }
}
