//! Impairment channel.
//!
//! Impairments are applied in a fixed order:
//!
//! 1. sample-clock drift: resample at ratio `r = 1 + drift_ppm·1e-6`,
//! 2. fractional delay of `delay_samples`,
//! 3. carrier rotation `exp(j(2π·cfo_hz·k/fs + phase_offset_rad))`,
//! 4. complex white Gaussian noise.
//!
//! Steps 1 and 2 are a single evaluation of the band-limited input at
//! `t_k = (k − delay)·r` with an 8-tap Kaiser-windowed sinc; integer
//! positions are exact, so a drift-free integer delay is a pure shift.
//! Output length is `⌊(N − 1)/r⌋ + 1`, equal to `N` when drift is zero.
//!
//! Noise variance (total, both rails) per sample is
//!
//! ```text
//! σ² = sps · P_x / (k · Eb/N0)
//! ```
//!
//! where `P_x` is the mean input power per sample and `k` is bits per
//! symbol. `sps · P_x` is the symbol energy, so after a unit-energy matched
//! filter the symbol-rate SNR is `k · Eb/N0` and BER follows the textbook
//! AWGN curve. An infinite `ebn0_db` disables the noise.

use num_complex::Complex;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{config_err, Error, Result};
use crate::scalar::Real;
use crate::seed::rng_for;
use crate::signal::{SampleBuffer, WindowedSinc};

/// Largest supported sample-clock error, in ppm.
pub const MAX_DRIFT_PPM: f64 = 1000.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig<T> {
    /// Eb/N0 in dB; `inf` means noiseless.
    pub ebn0_db: T,
    pub cfo_hz: T,
    pub phase_offset_rad: T,
    /// Non-negative, fractional allowed.
    pub delay_samples: T,
    pub drift_ppm: T,
    pub seed: u64,
}

impl<T: Real> Default for ChannelConfig<T> {
    fn default() -> Self {
        Self {
            ebn0_db: T::infinity(),
            cfo_hz: T::zero(),
            phase_offset_rad: T::zero(),
            delay_samples: T::zero(),
            drift_ppm: T::zero(),
            seed: 0,
        }
    }
}

impl<T: Real> ChannelConfig<T> {
    /// No impairment at all.
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        if self.ebn0_db.is_nan() || self.ebn0_db == T::neg_infinity() {
            return Err(config_err("channel.ebn0_db must be a number or +inf"));
        }
        for (name, v) in [
            ("channel.cfo_hz", self.cfo_hz),
            ("channel.phase_offset_rad", self.phase_offset_rad),
            ("channel.delay_samples", self.delay_samples),
            ("channel.drift_ppm", self.drift_ppm),
        ] {
            if !v.is_finite() {
                return Err(config_err(format!("{name} must be finite")));
            }
        }
        if self.delay_samples < T::zero() {
            return Err(config_err(format!(
                "channel.delay_samples must be non-negative, got {}",
                self.delay_samples
            )));
        }
        if self.drift_ppm.abs().to_f64_lossy() > MAX_DRIFT_PPM {
            return Err(config_err(format!(
                "channel.drift_ppm magnitude must not exceed {MAX_DRIFT_PPM}, got {}",
                self.drift_ppm
            )));
        }
        Ok(())
    }

    /// Per-sample noise variance for an input of mean power `signal_power`.
    pub fn noise_variance(&self, signal_power: T, bits_per_symbol: usize, sps: usize) -> T {
        if self.ebn0_db == T::infinity() {
            return T::zero();
        }
        let ebn0 = T::lit(10.0).powf(self.ebn0_db / T::lit(10.0));
        T::from_usize_lossy(sps) * signal_power / (T::from_usize_lossy(bits_per_symbol) * ebn0)
    }

    /// Expected per-sample SNR implied by Eb/N0: `k · Eb/N0 / sps`.
    pub fn sample_snr_db(&self, bits_per_symbol: usize, sps: usize) -> T {
        self.ebn0_db + T::lit(10.0) * T::lit(bits_per_symbol as f64 / sps as f64).log10()
    }
}

/// Output length for an `n`-sample input at the given drift.
pub fn output_len(n: usize, drift_ppm: f64) -> usize {
    if n == 0 {
        return 0;
    }
    let r = 1.0 + drift_ppm * 1e-6;
    ((n - 1) as f64 / r).floor() as usize + 1
}

/// Applies drift, delay, carrier rotation and AWGN, in that order.
pub fn apply_channel<T: Real>(
    x: &SampleBuffer<T>,
    cfg: &ChannelConfig<T>,
    bits_per_symbol: usize,
    sps: usize,
) -> Result<SampleBuffer<T>> {
    if x.is_empty() {
        return Err(Error::Dimension("channel input is empty".into()));
    }
    if bits_per_symbol == 0 || sps == 0 {
        return Err(config_err("bits_per_symbol and sps must be positive"));
    }
    cfg.validate()?;

    let mut y = resample_delay(x.samples(), cfg.drift_ppm.to_f64_lossy(), cfg.delay_samples.to_f64_lossy());
    rotate(&mut y, cfg.cfo_hz, cfg.phase_offset_rad, x.sample_rate_hz());

    let var = cfg.noise_variance(x.mean_power(), bits_per_symbol, sps);
    if var > T::zero() {
        let sigma = (var / T::lit(2.0)).sqrt().to_f64_lossy();
        let mut rng = rng_for(cfg.seed, 0);
        for v in y.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *v += Complex::new(T::lit(re * sigma), T::lit(im * sigma));
        }
    }
    Ok(x.with_samples(y))
}

fn resample_delay<T: Real>(x: &[Complex<T>], drift_ppm: f64, delay: f64) -> Vec<Complex<T>> {
    if drift_ppm == 0.0 && delay == 0.0 {
        return x.to_vec();
    }
    let r = 1.0 + drift_ppm * 1e-6;
    let n = output_len(x.len(), drift_ppm);
    let interp = WindowedSinc::<T>::new();
    (0..n)
        .map(|k| {
            // positions stay in f64 so f32 buffers keep sub-sample accuracy
            let t = (k as f64 - delay) * r;
            let base = t.floor();
            let frac = T::lit(t - base);
            let lo = (base as i64 - 4).max(0) as usize;
            let hi = ((base as i64 + 5).max(0) as usize).min(x.len());
            if lo >= hi {
                return Complex::default();
            }
            let local = T::lit(base - lo as f64) + frac;
            interp.sample_at(&x[lo..hi], local)
        })
        .collect()
}

fn rotate<T: Real>(y: &mut [Complex<T>], cfo_hz: T, phase: T, fs: T) {
    if cfo_hz == T::zero() && phase == T::zero() {
        return;
    }
    let step = 2.0 * std::f64::consts::PI * cfo_hz.to_f64_lossy() / fs.to_f64_lossy();
    let phi0 = phase.to_f64_lossy();
    for (k, v) in y.iter_mut().enumerate() {
        let ph = (step * k as f64 + phi0).rem_euclid(2.0 * std::f64::consts::PI);
        *v *= Complex::new(T::lit(ph.cos()), T::lit(ph.sin()));
    }
}
