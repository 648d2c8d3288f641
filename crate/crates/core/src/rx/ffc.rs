//! Fine frequency compensation: a carrier PLL at one sample per symbol.
//!
//! Each symbol is derotated by the accumulated phase `φ`, then the
//! maximum-likelihood QPSK phase detector
//!
//! ```text
//! e = sgn(Re s)·Im s − sgn(Im s)·Re s
//! ```
//!
//! is normalized by `√2·|s|` (running average), which makes its slope one
//! per radian. A proportional-plus-integral filter drives the phase
//! accumulator; the integrator holds the residual frequency in rad/symbol.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::loop_filter::{pi_loop_gains, sgn, Ema};
use crate::error::{config_err, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PllState<T> {
    /// Accumulated phase, wrapped to `(−π, π]`.
    pub phase: T,
    /// Integrator output, rad/symbol.
    pub freq: T,
    pub loop_bandwidth: T,
    pub damping: T,
}

impl<T: Real> PllState<T> {
    pub fn new(loop_bandwidth: T, damping: T) -> Result<Self> {
        if !(loop_bandwidth > T::zero() && loop_bandwidth <= T::lit(0.1)) {
            return Err(config_err(format!(
                "carrier loop bandwidth must lie in (0, 0.1], got {loop_bandwidth}"
            )));
        }
        if !(damping > T::zero()) {
            return Err(config_err(format!("carrier damping must be positive, got {damping}")));
        }
        Ok(Self {
            phase: T::zero(),
            freq: T::zero(),
            loop_bandwidth,
            damping,
        })
    }
}

const AMP_ALPHA: f64 = 1.0 / 64.0;
const VAR_ALPHA: f64 = 1.0 / 256.0;
/// Smoothed squared phase error (rad²) below which the carrier loop counts
/// as locked.
pub const CARRIER_LOCK_THRESHOLD: f64 = 0.05;

#[derive(Clone, Debug)]
pub struct CarrierPll<T> {
    state: PllState<T>,
    k1: T,
    k2: T,
    amp: Ema<T>,
    err_var: Ema<T>,
}

impl<T: Real> CarrierPll<T> {
    pub fn new(state: PllState<T>) -> Result<Self> {
        let s = PllState::new(state.loop_bandwidth, state.damping)?;
        let (k1, k2) = pi_loop_gains(s.loop_bandwidth, s.damping, T::one(), T::one());
        Ok(Self {
            state,
            k1,
            k2,
            amp: Ema::default(),
            err_var: Ema::starting_at(T::lit(CARRIER_LOCK_THRESHOLD)),
        })
    }

    pub fn state(&self) -> PllState<T> {
        self.state
    }

    pub fn is_locked(&self) -> bool {
        self.err_var.value() < T::lit(CARRIER_LOCK_THRESHOLD)
    }

    /// Derotates one symbol and updates the loop. Returns the derotated
    /// symbol and the normalized phase error.
    pub fn push(&mut self, s: Complex<T>) -> (Complex<T>, T) {
        let out = s * Complex::new(self.state.phase.cos(), -self.state.phase.sin());
        let mag = out.norm();
        if mag > T::zero() {
            self.amp.update(mag, T::lit(AMP_ALPHA));
        }
        let amp = self.amp.value();
        let e = if self.amp.is_primed() && amp > T::epsilon() {
            (sgn(out.re) * out.im - sgn(out.im) * out.re) / (T::SQRT_2() * amp)
        } else {
            T::zero()
        };
        self.err_var.update(e * e, T::lit(VAR_ALPHA));
        self.state.freq += self.k2 * e;
        let mut ph = self.state.phase + self.k1 * e + self.state.freq;
        let two_pi = T::TAU();
        if ph > T::PI() {
            ph -= two_pi;
        } else if ph <= -T::PI() {
            ph += two_pi;
        }
        self.state.phase = ph;
        (out, e)
    }

    pub fn process(&mut self, x: &[Complex<T>]) -> (Vec<Complex<T>>, Vec<T>) {
        x.iter().map(|&s| self.push(s)).unzip()
    }
}

/// Runs the carrier loop from `state` over `y`.
pub fn ffc_pll<T: Real>(y: &[Complex<T>], state: PllState<T>) -> Result<(Vec<Complex<T>>, PllState<T>)> {
    let mut pll = CarrierPll::new(state)?;
    let (out, _) = pll.process(y);
    Ok((out, pll.state()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cis;
    use crate::tx::qpsk_map;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};
    use std::f64::consts::PI;

    fn symbols(n: usize, seed: u64) -> Vec<Complex<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits: Vec<bool> = (0..2 * n).map(|_| rng.random()).collect();
        qpsk_map(&bits).unwrap()
    }

    #[test]
    fn equilibrium_holds() {
        let s = symbols(2000, 1);
        let mut pll = CarrierPll::new(PllState::new(0.01, 0.707).unwrap()).unwrap();
        for &v in &s {
            pll.push(v);
            assert!(pll.state().phase.abs() < 1e-6);
        }
    }

    #[test]
    fn static_offset_pulled_in() {
        let rot = cis(30f64.to_radians());
        let s: Vec<_> = symbols(500, 2).into_iter().map(|v| v * rot).collect();
        let (_, st) = ffc_pll(&s, PllState::new(0.01, 0.707).unwrap()).unwrap();
        assert!((st.phase.to_degrees() - 30.0).abs() <= 1.0, "phase {}", st.phase.to_degrees());
    }

    #[test]
    fn tracks_residual_frequency_in_noise() {
        // 0.2% of the symbol rate, Eb/N0 = 10 dB (Es/N0 = 13 dB)
        let dw = 2.0 * PI * 0.002;
        let sigma = (1.0 / (2.0 * 10f64.powf(1.3))).sqrt();
        let mut good = 0;
        for trial in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + trial);
            let s = symbols(3000, 200 + trial);
            let rx: Vec<_> = s
                .iter()
                .enumerate()
                .map(|(k, &v)| {
                    let a: f64 = StandardNormal.sample(&mut rng);
                    let b: f64 = StandardNormal.sample(&mut rng);
                    v * cis(dw * k as f64 + 0.4) + Complex::new(a, b) * sigma
                })
                .collect();
            let mut pll = CarrierPll::new(PllState::new(0.01, 0.707).unwrap()).unwrap();
            let mut errs = Vec::new();
            for (k, &v) in rx.iter().enumerate() {
                let before = pll.state().phase;
                pll.push(v);
                if k >= 1000 {
                    let truth = dw * k as f64 + 0.4;
                    let d = truth - before;
                    // modulo the QPSK ambiguity
                    let d = d - (d / (PI / 2.0)).round() * (PI / 2.0);
                    errs.push(d);
                }
            }
            let mean = errs.iter().sum::<f64>() / errs.len() as f64;
            if mean.abs().to_degrees() <= 2.0 {
                good += 1;
            }
        }
        assert!(good >= 48, "{good}/50 trials locked");
    }

    #[test]
    fn rejects_bad_bandwidth() {
        assert!(PllState::new(0.0f64, 0.7).is_err());
        assert!(PllState::new(0.2f64, 0.7).is_err());
        assert!(PllState::new(0.01f64, 0.0).is_err());
    }

    #[test]
    fn chunking_does_not_change_output() {
        let s: Vec<_> = symbols(900, 3).into_iter().map(|v| v * cis(0.3)).collect();
        let mut a = CarrierPll::new(PllState::new(0.01, 0.707).unwrap()).unwrap();
        let batch = a.process(&s).0;
        let mut b = CarrierPll::new(PllState::new(0.01, 0.707).unwrap()).unwrap();
        let mut streamed = Vec::new();
        for c in s.chunks(37) {
            streamed.extend(b.process(c).0);
        }
        assert_eq!(batch, streamed);
    }
}
