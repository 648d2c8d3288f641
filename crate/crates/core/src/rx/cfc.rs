//! Coarse frequency compensation.
//!
//! QPSK raised to the fourth power loses its modulation and leaves a
//! spectral line at four times the carrier offset. The estimator averages
//! the periodograms of `y⁴` over whole `nfft`-sample blocks, picks the peak
//! bin, refines it with a parabola through the neighbouring magnitudes and
//! divides the frequency by four. The unambiguous range is `±fs/8`.
//!
//! A peak weaker than `prominence` times the mean periodogram level yields
//! no estimate; the chain then proceeds with 0 Hz.

use num_complex::Complex;

use crate::error::{dim_err, Result};
use crate::scalar::Real;
use crate::signal::DftPlan;

/// Default peak-to-mean power ratio required for an estimate.
pub const DEFAULT_PROMINENCE: f64 = 10.0;

/// Estimated carrier offset in Hz, or `None` when no clear line is present.
pub fn coarse_freq_estimate<T: Real>(
    y: &[Complex<T>],
    nfft: usize,
    sample_rate_hz: T,
    prominence: T,
) -> Result<Option<T>> {
    if nfft < 4 {
        return Err(dim_err(format!("nfft must be at least 4, got {nfft}")));
    }
    if y.len() < nfft {
        return Err(dim_err(format!("need at least {nfft} samples, got {}", y.len())));
    }
    let plan = DftPlan::new(nfft)?;
    let mut psd = vec![T::zero(); nfft];
    let mut buf = vec![Complex::default(); nfft];
    for block in y.chunks_exact(nfft) {
        for (b, &v) in buf.iter_mut().zip(block) {
            let v2 = v * v;
            *b = v2 * v2;
        }
        plan.forward(&mut buf);
        for (p, v) in psd.iter_mut().zip(&buf) {
            *p += v.norm_sqr();
        }
    }
    let (peak, &pmax) = psd
        .iter()
        .enumerate()
        .fold((0, &psd[0]), |best, (i, p)| if *p > *best.1 { (i, p) } else { best });
    let mean = psd.iter().copied().sum::<T>() / T::from_usize_lossy(nfft);
    if !(pmax > T::zero()) || pmax < prominence * mean {
        return Ok(None);
    }
    let mag = |i: usize| psd[i].sqrt();
    let a = mag((peak + nfft - 1) % nfft);
    let b = mag(peak);
    let c = mag((peak + 1) % nfft);
    let den = a - T::lit(2.0) * b + c;
    let delta = if den == T::zero() {
        T::zero()
    } else {
        T::lit(0.5) * (a - c) / den
    };
    let n = T::from_usize_lossy(nfft);
    let mut bin = T::from_usize_lossy(peak) + delta;
    if bin >= n / T::lit(2.0) {
        bin -= n;
    }
    Ok(Some(bin * sample_rate_hz / n / T::lit(4.0)))
}

/// Derotates `y` by `f_hat`; `start` is the absolute index of `y[0]`, so a
/// stream corrected in pieces matches one corrected in a single call.
pub fn coarse_freq_correct<T: Real>(y: &[Complex<T>], f_hat: T, sample_rate_hz: T, start: usize) -> Vec<Complex<T>> {
    if f_hat == T::zero() {
        return y.to_vec();
    }
    let step = -2.0 * std::f64::consts::PI * f_hat.to_f64_lossy() / sample_rate_hz.to_f64_lossy();
    y.iter()
        .enumerate()
        .map(|(k, &v)| {
            let ph = (step * (start + k) as f64).rem_euclid(2.0 * std::f64::consts::PI);
            v * Complex::new(T::lit(ph.cos()), T::lit(ph.sin()))
        })
        .collect()
}
