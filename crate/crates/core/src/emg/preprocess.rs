use super::EmgWindow;
use crate::error::{config_err, Result};
use crate::scalar::Real;
use crate::signal::convolve_centered;

/// Physiological EMG band.
pub const DEFAULT_BAND_HZ: (f64, f64) = (20.0, 450.0);
/// Band-pass length (odd, so the filter has an integer group delay).
pub const DEFAULT_FILTER_TAPS: usize = 129;

/// Hamming-windowed-sinc band-pass, linear phase, `taps` odd.
pub fn bandpass_taps<T: Real>(f_lo: T, f_hi: T, fs: T, taps: usize) -> Result<Vec<T>> {
    if !(f_lo > T::zero() && f_lo < f_hi && f_hi < fs / T::lit(2.0)) {
        return Err(config_err(format!(
            "band ({f_lo}, {f_hi}) Hz must satisfy 0 < f_lo < f_hi < fs/2 = {}",
            fs / T::lit(2.0)
        )));
    }
    if taps < 3 || taps.is_multiple_of(2) {
        return Err(config_err(format!("band-pass length must be odd and ≥ 3, got {taps}")));
    }
    let m = (taps - 1) / 2;
    let two = T::lit(2.0);
    let sinc = |x: T| {
        if x == T::zero() {
            T::one()
        } else {
            (T::PI() * x).sin() / (T::PI() * x)
        }
    };
    Ok((0..taps)
        .map(|i| {
            let n = T::lit(i as f64 - m as f64);
            let ideal = two * f_hi / fs * sinc(two * f_hi * n / fs) - two * f_lo / fs * sinc(two * f_lo * n / fs);
            let w = T::lit(0.54)
                - T::lit(0.46) * (T::TAU() * T::from_usize_lossy(i) / T::from_usize_lossy(taps - 1)).cos();
            ideal * w
        })
        .collect())
}

/// Amplifier gain followed by the default 129-tap linear-phase band-pass,
/// applied centred so the output is aligned with the input and has the
/// same length.
pub fn preprocess<T: Real>(raw: &EmgWindow<T>, gain: T, band: (T, T)) -> Result<EmgWindow<T>> {
    if !(gain > T::zero()) || !gain.is_finite() {
        return Err(config_err(format!("gain must be positive, got {gain}")));
    }
    let h = bandpass_taps(band.0, band.1, raw.sample_rate_hz(), DEFAULT_FILTER_TAPS)?;
    let scaled: Vec<T> = raw.samples().iter().map(|&v| v * gain).collect();
    let y = convolve_centered(&scaled, &h);
    EmgWindow::new(y, raw.sample_rate_hz(), raw.label)
}
