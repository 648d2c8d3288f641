//! Synthetic EMG generator. No public recordings exist for these commands,
//! so each class is modelled as Gaussian noise split into four sub-bands
//! of the 20-450 Hz EMG band, mixed with a class-specific spectral tilt and
//! amplitude-modulated by a slow class-specific envelope. A random overall
//! scale per window exercises the scale invariance of the features.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::preprocess::{bandpass_taps, DEFAULT_FILTER_TAPS};
use super::{Command, EmgWindow};
use crate::error::{config_err, Result};
use crate::scalar::Real;
use crate::seed::rng_for;
use crate::signal::convolve_centered;

/// Bumped whenever the frozen generator parameters change.
pub const GENERATOR_VERSION: u32 = 1;

/// Shortest window the generator will produce.
pub const MIN_SAMPLES: usize = 64;

/// Frozen generator parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthProfile {
    pub version: u32,
    /// Sub-band edges in Hz.
    pub bands_hz: [(f64, f64); 4],
    /// Per-command sub-band weights, indexed by `Command::index()`.
    pub band_weights: [[f64; 4]; 5],
    /// Per-command envelope (modulation depth, modulation rate in Hz).
    pub envelope: [(f64, f64); 5],
    /// Uniform range of the per-window amplitude scale.
    pub scale_range: (f64, f64),
}

impl Default for SynthProfile {
    fn default() -> Self {
        Self {
            version: GENERATOR_VERSION,
            bands_hz: [(20.0, 80.0), (80.0, 160.0), (160.0, 300.0), (300.0, 450.0)],
            band_weights: [
                [1.0, 0.6, 0.3, 0.15],
                [0.35, 1.0, 0.6, 0.25],
                [0.2, 0.4, 1.0, 0.7],
                [0.6, 0.3, 0.5, 1.0],
                [1.0, 0.2, 0.8, 0.2],
            ],
            envelope: [(0.2, 2.0), (0.4, 3.0), (0.1, 1.0), (0.6, 4.0), (0.5, 5.0)],
            scale_range: (0.5, 2.0),
        }
    }
}

/// One labelled window of `round(duration_s·fs)` samples from the default
/// profile. Deterministic in `(command, seed)`.
pub fn synthesize_emg<T: Real>(command: Command, duration_s: T, fs: T, seed: u64) -> Result<EmgWindow<T>> {
    SynthProfile::default().synthesize(command, duration_s, fs, seed)
}

impl SynthProfile {
    pub fn synthesize<T: Real>(&self, command: Command, duration_s: T, fs: T, seed: u64) -> Result<EmgWindow<T>> {
        if !(duration_s > T::zero() && fs > T::zero()) || !(duration_s * fs).is_finite() {
            return Err(config_err(format!("duration {duration_s} s and rate {fs} Hz must be positive")));
        }
        let n = (duration_s * fs).round().to_usize().unwrap_or(0);
        if n < MIN_SAMPLES {
            return Err(config_err(format!("window of {n} samples is shorter than {MIN_SAMPLES}")));
        }
        let fs64 = fs.to_f64().unwrap_or(f64::NAN);
        // the command index separates streams so (sit, s) and (stand, s) differ
        let mut rng = rng_for(seed, command.index() as u64);
        let pad = DEFAULT_FILTER_TAPS;
        let mut out = vec![0.0f64; n];
        for (&(lo, hi), &w) in self.bands_hz.iter().zip(&self.band_weights[command.index()]) {
            let h = bandpass_taps(lo, hi, fs64, DEFAULT_FILTER_TAPS)?;
            let noise: Vec<f64> = (0..n + 2 * pad).map(|_| rng.sample(StandardNormal)).collect();
            let y = convolve_centered(&noise, &h);
            for (o, v) in out.iter_mut().zip(&y[pad..pad + n]) {
                *o += w * v;
            }
        }
        let (depth, rate) = self.envelope[command.index()];
        let phase = rng.random_range(0.0..std::f64::consts::TAU);
        let scale = rng.random_range(self.scale_range.0..self.scale_range.1);
        let samples = out
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let t = k as f64 / fs64;
                let env = 1.0 + depth * (std::f64::consts::TAU * rate * t + phase).sin();
                T::lit(v * env * scale)
            })
            .collect();
        EmgWindow::new(samples, fs, Some(command))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emg::extract_features;
    use crate::signal::{dft, SampleBuffer};

    #[test]
    fn deterministic() {
        let a = synthesize_emg(Command::Sleep, 0.256, 1000.0f64, 42).unwrap();
        let b = synthesize_emg(Command::Sleep, 0.256, 1000.0f64, 42).unwrap();
        assert_eq!(a, b);
        let c = synthesize_emg(Command::Stand, 0.256, 1000.0f64, 42).unwrap();
        assert_ne!(a.samples(), c.samples());
    }

    #[test]
    fn energy_stays_in_band() {
        for cmd in Command::ALL {
            let w = synthesize_emg(cmd, 1.0, 1000.0f64, 7).unwrap();
            assert_eq!(w.len(), 1000);
            let buf = SampleBuffer::from_real(w.samples(), 1000.0).unwrap();
            let x = dft(&buf, 1000).unwrap();
            let total: f64 = x.iter().map(|v| v.norm_sqr()).sum();
            // bins 451..=549 are the >450 Hz region on both sides
            let high: f64 = x[451..550].iter().map(|v| v.norm_sqr()).sum();
            assert!(high / total < 0.05, "{cmd}: {}", high / total);
        }
    }

    #[test]
    fn sit_and_stand_separate() {
        let feats = |cmd: Command| -> Vec<Vec<f64>> {
            (0..200)
                .map(|i| extract_features(&synthesize_emg(cmd, 0.256, 1000.0f64, i).unwrap(), 128).unwrap())
                .collect()
        };
        let mean = |f: &[Vec<f64>]| -> Vec<f64> {
            (0..128).map(|j| f.iter().map(|v| v[j]).sum::<f64>() / f.len() as f64).collect()
        };
        let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let (fa, fb) = (feats(Command::Sit), feats(Command::Stand));
        let (ma, mb) = (mean(&fa), mean(&fb));
        let between = dist(&ma, &mb);
        // spread measured along the line joining the two class means, which is
        // the direction a nearest-mean decision depends on
        let u: Vec<f64> = ma.iter().zip(&mb).map(|(a, b)| (a - b) / between).collect();
        let spread = |f: &[Vec<f64>]| {
            let p: Vec<f64> = f.iter().map(|v| v.iter().zip(&u).map(|(x, y)| x * y).sum()).collect();
            let m = p.iter().sum::<f64>() / p.len() as f64;
            (p.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (p.len() - 1) as f64).sqrt()
        };
        let within = spread(&fa).max(spread(&fb));
        assert!(between > within, "between {between} within {within}");
        // overlapping rather than trivially separable
        assert!(between < 20.0 * within, "between {between} within {within}");
    }

    #[test]
    fn rejects_short_or_bad_windows() {
        assert!(synthesize_emg(Command::Sit, 0.01, 1000.0f64, 0).is_err());
        assert!(synthesize_emg(Command::Sit, -1.0, 1000.0f64, 0).is_err());
        // 450 Hz band edge above Nyquist
        assert!(synthesize_emg(Command::Sit, 1.0, 800.0f64, 0).is_err());
    }
}
