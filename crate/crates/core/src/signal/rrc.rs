//! Root-raised-cosine pulse design.
//!
//! The continuous pulse (time in symbol periods, rolloff `β`) is
//!
//! ```text
//!         sin(πt(1-β)) + 4βt·cos(πt(1+β))
//! h(t) = ---------------------------------
//!              πt·(1 - (4βt)²)
//! ```
//!
//! with the removable singularities evaluated by their limits:
//! `h(0) = 1 - β + 4β/π` and
//! `h(±1/(4β)) = β/√2·[(1 + 2/π)·sin(π/(4β)) + (1 - 2/π)·cos(π/(4β))]`.

use super::TapSet;
use crate::error::{config_err, Result};
use crate::scalar::Real;

fn check_rolloff<T: Real>(rolloff: T) -> Result<()> {
    if !(rolloff > T::zero() && rolloff <= T::one()) {
        return Err(config_err(format!("rolloff must lie in (0, 1], got {rolloff}")));
    }
    Ok(())
}

/// Distance below which `t` is treated as sitting on a singular point.
fn singular_tol<T: Real>() -> T {
    T::epsilon().sqrt()
}

/// Analytic RRC impulse response at `t` symbol periods.
pub fn rrc_impulse<T: Real>(t: T, rolloff: T) -> T {
    let pi = T::PI();
    let one = T::one();
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let b = rolloff;
    if t.abs() < singular_tol() {
        return one - b + four * b / pi;
    }
    let x = four * b * t;
    if (x.abs() - one).abs() < singular_tol() {
        let arg = pi / (four * b);
        return b / two.sqrt() * ((one + two / pi) * arg.sin() + (one - two / pi) * arg.cos());
    }
    ((pi * t * (one - b)).sin() + four * b * t * (pi * t * (one + b)).cos())
        / (pi * t * (one - x * x))
}

/// Analytic raised-cosine pulse (the RRC self-convolution), `p(0) = 1`.
pub fn raised_cosine_pulse<T: Real>(t: T, rolloff: T) -> T {
    let pi = T::PI();
    let one = T::one();
    let two = T::lit(2.0);
    let sinc = if t.abs() < singular_tol() {
        one
    } else {
        (pi * t).sin() / (pi * t)
    };
    let x = two * rolloff * t;
    if (x.abs() - one).abs() < singular_tol() {
        return pi / T::lit(4.0) * sinc;
    }
    sinc * (pi * rolloff * t).cos() / (one - x * x)
}

/// Unit-energy RRC taps at `samples_per_symbol`.
///
/// `span_symbols` is the one-sided extent (the filter delay in symbols), so
/// the design has `2·span·sps + 1` taps with the peak at the centre.
pub fn design_rrc<T: Real>(rolloff: T, span_symbols: usize, samples_per_symbol: usize) -> Result<TapSet<T>> {
    check_rolloff(rolloff)?;
    if span_symbols == 0 {
        return Err(config_err("RRC span must be at least one symbol"));
    }
    if samples_per_symbol < 2 {
        return Err(config_err(format!(
            "RRC needs at least 2 samples per symbol, got {samples_per_symbol}"
        )));
    }
    let len = 2 * span_symbols * samples_per_symbol + 1;
    let centre = (len - 1) as i64 / 2;
    let sps = T::from_usize_lossy(samples_per_symbol);
    let mut taps: Vec<T> = (0..len as i64)
        .map(|i| {
            let t = T::lit((i - centre) as f64) / sps;
            rrc_impulse(t, rolloff)
        })
        .collect();
    // mirror so the design is bit-exactly symmetric
    for i in 0..len / 2 {
        taps[len - 1 - i] = taps[i];
    }
    let energy: T = taps.iter().map(|&h| h * h).sum();
    let gain = T::one() / energy.sqrt();
    taps.iter_mut().for_each(|h| *h *= gain);
    Ok(TapSet { taps, gain })
}
