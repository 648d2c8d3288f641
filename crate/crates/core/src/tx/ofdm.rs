//! CP-OFDM symbol construction.
//!
//! Each OFDM symbol places `carriers.len()` data symbols on the listed DFT
//! bins, takes an orthonormal inverse DFT (`1/√N` scaling, so average power
//! is preserved) and prepends the last `cp_len` samples as cyclic prefix.

use num_complex::Complex;

use crate::error::{config_err, dim_err, Result};
use crate::scalar::Real;
use crate::signal::DftPlan;

/// Occupied DFT bins, in the order data symbols are loaded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CarrierMap {
    nfft: usize,
    bins: Vec<usize>,
}

impl CarrierMap {
    /// Every bin `0..nfft` occupied, in natural order.
    pub fn full(nfft: usize) -> Self {
        Self {
            nfft,
            bins: (0..nfft).collect(),
        }
    }

    pub fn new(nfft: usize, bins: Vec<usize>) -> Result<Self> {
        if nfft == 0 {
            return Err(dim_err("nfft must be positive"));
        }
        if bins.is_empty() {
            return Err(config_err("carrier map is empty"));
        }
        if let Some(b) = bins.iter().find(|&&b| b >= nfft) {
            return Err(dim_err(format!("carrier bin {b} outside 0..{nfft}")));
        }
        let mut sorted = bins.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != bins.len() {
            return Err(config_err("carrier map lists a bin twice"));
        }
        Ok(Self { nfft, bins })
    }

    pub fn nfft(&self) -> usize {
        self.nfft
    }

    pub fn bins(&self) -> &[usize] {
        &self.bins
    }
}

/// CP-OFDM modulation with every bin occupied.
pub fn ofdm_modulate<T: Real>(symbols: &[Complex<T>], nfft: usize, cp_len: usize) -> Result<Vec<Complex<T>>> {
    if nfft == 0 {
        return Err(dim_err("nfft must be positive"));
    }
    ofdm_modulate_with(symbols, &CarrierMap::full(nfft), cp_len)
}

pub fn ofdm_modulate_with<T: Real>(
    symbols: &[Complex<T>],
    map: &CarrierMap,
    cp_len: usize,
) -> Result<Vec<Complex<T>>> {
    let n = map.nfft;
    if cp_len >= n {
        return Err(config_err(format!("cp_len ({cp_len}) must be shorter than nfft ({n})")));
    }
    let per = map.bins.len();
    if !symbols.len().is_multiple_of(per) {
        return Err(dim_err(format!(
            "{} symbols do not fill whole OFDM symbols of {per} carriers",
            symbols.len()
        )));
    }
    let plan = DftPlan::new(n)?;
    let scale = T::from_usize_lossy(n).sqrt();
    let mut out = Vec::with_capacity(symbols.len() / per * (n + cp_len));
    let mut buf = vec![Complex::default(); n];
    for chunk in symbols.chunks_exact(per) {
        buf.iter_mut().for_each(|v| *v = Complex::default());
        for (&bin, &s) in map.bins.iter().zip(chunk) {
            buf[bin] = s;
        }
        plan.inverse(&mut buf);
        out.extend(buf[n - cp_len..].iter().map(|&v| v * scale));
        out.extend(buf.iter().map(|&v| v * scale));
    }
    Ok(out)
}

/// Inverse of [`ofdm_modulate_with`] for a time-aligned, clean signal.
pub fn ofdm_demodulate<T: Real>(samples: &[Complex<T>], map: &CarrierMap, cp_len: usize) -> Result<Vec<Complex<T>>> {
    let n = map.nfft;
    if cp_len >= n {
        return Err(config_err(format!("cp_len ({cp_len}) must be shorter than nfft ({n})")));
    }
    let block = n + cp_len;
    if !samples.len().is_multiple_of(block) {
        return Err(dim_err(format!(
            "{} samples are not a whole number of {block}-sample OFDM symbols",
            samples.len()
        )));
    }
    let plan = DftPlan::new(n)?;
    let scale = T::one() / T::from_usize_lossy(n).sqrt();
    let mut out = Vec::with_capacity(samples.len() / block * map.bins.len());
    let mut buf = vec![Complex::default(); n];
    for chunk in samples.chunks_exact(block) {
        buf.copy_from_slice(&chunk[cp_len..]);
        plan.forward(&mut buf);
        out.extend(map.bins.iter().map(|&b| buf[b] * scale));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cis;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn single_carrier_is_complex_exponential() {
        let n = 16;
        let k = 3;
        let map = CarrierMap::new(n, vec![k]).unwrap();
        let x = ofdm_modulate_with(&[Complex::new(1.0f64, 0.0)], &map, 4).unwrap();
        assert_eq!(x.len(), 20);
        for (i, v) in x[4..].iter().enumerate() {
            let want = cis(2.0 * PI * (k * i) as f64 / n as f64) / (n as f64).sqrt();
            assert!((v - want).norm() < 1e-12);
        }
        // prefix repeats the tail
        for i in 0..4 {
            assert!((x[i] - x[i + 16]).norm() < 1e-15);
        }
    }

    #[test]
    fn round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let syms: Vec<Complex<f64>> = (0..64 * 5)
            .map(|_| Complex::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let map = CarrierMap::full(64);
        let x = ofdm_modulate(&syms, 64, 16).unwrap();
        let back = ofdm_demodulate(&x, &map, 16).unwrap();
        for (a, b) in syms.iter().zip(&back) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn no_prefix_length() {
        let syms = vec![Complex::new(1.0f64, 0.0); 32 * 3];
        assert_eq!(ofdm_modulate(&syms, 32, 0).unwrap().len(), 96);
    }

    #[test]
    fn prefix_too_long_rejected() {
        let syms = vec![Complex::new(1.0f64, 0.0); 8];
        assert!(ofdm_modulate(&syms, 8, 8).is_err());
        assert!(ofdm_modulate(&syms[..5], 8, 2).is_err());
    }

    #[test]
    fn power_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let syms: Vec<Complex<f64>> = (0..64 * 40)
            .map(|_| cis(rng.random_range(0.0..2.0 * PI)))
            .collect();
        let x = ofdm_modulate(&syms, 64, 0).unwrap();
        let p: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len() as f64;
        assert!((p - 1.0).abs() < 1e-9);
    }
}
