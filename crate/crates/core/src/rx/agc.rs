use std::collections::VecDeque;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgcState<T> {
    pub target_amplitude: T,
    pub step: T,
    pub current_gain: T,
}

impl<T: Real> AgcState<T> {
    pub fn new(target_amplitude: T, step: T) -> Result<Self> {
        if !(target_amplitude > T::zero()) || !target_amplitude.is_finite() {
            return Err(config_err(format!("agc target must be positive, got {target_amplitude}")));
        }
        if !(step > T::zero()) || !step.is_finite() {
            return Err(config_err(format!("agc step must be positive, got {step}")));
        }
        Ok(Self {
            target_amplitude,
            step,
            current_gain: T::one(),
        })
    }
}

/// Multiplicative AGC in the log domain.
///
/// The amplitude estimate is `g·mean|x|` over the last `window` input
/// samples, and after each sample
///
/// ```text
/// g ← g·exp(step·(ln target − ln(g·mean|x|)))
/// ```
///
/// Zero-valued input samples leave the gain untouched, so silence neither
/// blows the gain up nor divides by zero.
#[derive(Clone, Debug)]
pub struct Agc<T> {
    state: AgcState<T>,
    window: usize,
    mags: VecDeque<T>,
}

impl<T: Real> Agc<T> {
    pub fn new(state: AgcState<T>, window: usize) -> Result<Self> {
        if window == 0 {
            return Err(config_err("agc window must be positive"));
        }
        Ok(Self {
            state,
            window,
            mags: VecDeque::with_capacity(window),
        })
    }

    pub fn state(&self) -> AgcState<T> {
        self.state
    }

    pub fn push(&mut self, x: Complex<T>) -> Complex<T> {
        let y = x * self.state.current_gain;
        let mag = x.norm();
        if self.mags.len() == self.window {
            self.mags.pop_front();
        }
        self.mags.push_back(mag);
        if mag > T::zero() {
            let mean = self.mags.iter().copied().sum::<T>() / T::from_usize_lossy(self.mags.len());
            let measured = self.state.current_gain * mean;
            let g = self.state.current_gain
                * (self.state.step * (self.state.target_amplitude.ln() - measured.ln())).exp();
            if g.is_finite() && g > T::zero() {
                self.state.current_gain = g;
            }
        }
        y
    }

    pub fn process(&mut self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        x.iter().map(|&v| self.push(v)).collect()
    }
}

/// Runs a fresh 32-sample-window AGC from `state` over `x`.
pub fn agc<T: Real>(x: &[Complex<T>], state: AgcState<T>) -> Result<(Vec<Complex<T>>, AgcState<T>)> {
    let mut a = Agc::new(state, 32)?;
    let y = a.process(x);
    Ok((y, a.state()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cis;

    fn tone(n: usize, amp: f64) -> Vec<Complex<f64>> {
        (0..n).map(|k| cis(0.05 * k as f64) * amp).collect()
    }

    #[test]
    fn at_target_gain_stays_near_one() {
        let st = AgcState::new(0.5, 0.01).unwrap();
        let (_, s) = agc(&tone(1000, 0.5), st).unwrap();
        assert!((s.current_gain - 1.0).abs() < 0.01);
    }

    #[test]
    fn large_input_converges_to_target() {
        let st = AgcState::new(0.5, 0.01).unwrap();
        let (y, _) = agc(&tone(3000, 5.0), st).unwrap();
        let tail = &y[2000..];
        let mean = tail.iter().map(|v| v.norm()).sum::<f64>() / tail.len() as f64;
        assert!((mean - 0.5).abs() / 0.5 < 0.02, "mean {mean}");
    }

    #[test]
    fn zero_input_freezes_gain() {
        let mut st = AgcState::new(0.5, 0.05).unwrap();
        st.current_gain = 1.7;
        let (y, s) = agc(&vec![Complex::new(0.0, 0.0); 500], st).unwrap();
        assert!(y.iter().all(|v| v.norm() == 0.0));
        assert_eq!(s.current_gain, 1.7);
    }

    #[test]
    fn chunking_does_not_change_output() {
        let x = tone(777, 3.0);
        let st = AgcState::new(0.5, 0.01).unwrap();
        let mut a = Agc::new(st, 32).unwrap();
        let batch = a.process(&x);
        let mut b = Agc::new(st, 32).unwrap();
        let mut streamed = Vec::new();
        for c in x.chunks(13) {
            streamed.extend(b.process(c));
        }
        assert_eq!(batch, streamed);
    }

    #[test]
    fn rejects_bad_state() {
        assert!(AgcState::new(0.0f64, 0.01).is_err());
        assert!(AgcState::new(0.5f64, -1.0).is_err());
    }
}
