use crate::scalar::Real;

/// Proportional and integral gains of a second-order PLL with a
/// proportional-plus-integral loop filter.
///
/// `bn_t` is the noise bandwidth normalized to the update rate, `zeta` the
/// damping factor, `kp` the detector gain and `k0` the NCO gain:
///
/// ```text
/// θ  = BnT / (ζ + 1/(4ζ))
/// K1 = 4ζθ / ((1 + 2ζθ + θ²)·Kp·K0)
/// K2 = 4θ² / ((1 + 2ζθ + θ²)·Kp·K0)
/// ```
pub fn pi_loop_gains<T: Real>(bn_t: T, zeta: T, kp: T, k0: T) -> (T, T) {
    let one = T::one();
    let four = T::lit(4.0);
    let theta = bn_t / (zeta + one / (four * zeta));
    let d = (one + T::lit(2.0) * zeta * theta + theta * theta) * kp * k0;
    (four * zeta * theta / d, four * theta * theta / d)
}

/// Exponential moving average used by the lock detectors and detector
/// normalizers.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Ema<T> {
    value: T,
    primed: bool,
}

impl<T: Real> Ema<T> {
    /// An average that starts at `v` instead of at its first input.
    pub(crate) fn starting_at(v: T) -> Self {
        Self { value: v, primed: true }
    }

    pub(crate) fn update(&mut self, x: T, alpha: T) -> T {
        if self.primed {
            self.value += alpha * (x - self.value);
        } else {
            self.value = x;
            self.primed = true;
        }
        self.value
    }

    pub(crate) fn value(&self) -> T {
        self.value
    }

    pub(crate) fn is_primed(&self) -> bool {
        self.primed
    }
}

pub(crate) fn sgn<T: Real>(x: T) -> T {
    if x >= T::zero() {
        T::one()
    } else {
        -T::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gains_match_closed_form() {
        let (k1, k2) = pi_loop_gains(0.01f64, 0.707, 1.0, 1.0);
        let theta = 0.01 / (0.707 + 1.0 / (4.0 * 0.707));
        let d = 1.0 + 2.0 * 0.707 * theta + theta * theta;
        assert!((k1 - 4.0 * 0.707 * theta / d).abs() < 1e-15);
        assert!((k2 - 4.0 * theta * theta / d).abs() < 1e-15);
        // closed-loop poles of the linearized loop lie inside the unit circle
        let a = k1 + k2;
        let disc: f64 = (2.0 - a) * (2.0 - a) - 4.0 * (1.0 - k1);
        let r = if disc < 0.0 { (1.0 - k1).sqrt() } else { ((2.0 - a).abs() + disc.sqrt()) / 2.0 };
        assert!(r < 1.0);
    }

    #[test]
    fn gains_scale_inversely_with_detector_gain() {
        let (a1, a2) = pi_loop_gains(0.005f64, 1.0, 1.0, 1.0);
        let (b1, b2) = pi_loop_gains(0.005f64, 1.0, 2.0, 2.0);
        assert!((a1 / b1 - 4.0).abs() < 1e-12);
        assert!((a2 / b2 - 4.0).abs() < 1e-12);
    }
}
