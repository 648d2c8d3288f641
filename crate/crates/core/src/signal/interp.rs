use crate::scalar::{Real, Sample};

/// Piecewise-parabolic (Farrow, α = ½) interpolation at `base + mu`.
///
/// Uses the four samples `x[base-1] .. x[base+2]`; indices outside the
/// slice read as zero. `mu` is expected in `[0, 1)`.
pub fn parabolic_interpolate<T: Real, S: Sample<T>>(x: &[S], base: isize, mu: T) -> S {
    let alpha = T::lit(0.5);
    let mu2 = mu * mu;
    let outer = alpha * mu2 - alpha * mu;
    let c = [
        outer,
        -alpha * mu2 + (alpha - T::one()) * mu + T::one(),
        -alpha * mu2 + (T::one() + alpha) * mu,
        outer,
    ];
    let mut acc = S::default();
    for (k, &ck) in c.iter().enumerate() {
        let idx = base - 1 + k as isize;
        if idx >= 0 && (idx as usize) < x.len() {
            acc += x[idx as usize] * ck;
        }
    }
    acc
}

/// Windowed-sinc fractional-delay interpolator with a fixed number of taps.
///
/// The kernel is `sinc(d)·w(d)` with a Kaiser window over the tap span and
/// is renormalized to unit DC gain. Integer positions are returned exactly.
#[derive(Clone, Debug)]
pub struct WindowedSinc<T> {
    taps: usize,
    beta: T,
    i0_beta: T,
}

impl<T: Real> WindowedSinc<T> {
    /// Default used by the channel: 8 taps, Kaiser β = 5.
    pub fn new() -> Self {
        Self::with_params(8, T::lit(5.0))
    }

    pub fn with_params(taps: usize, beta: T) -> Self {
        assert!(taps >= 2 && taps.is_multiple_of(2), "windowed sinc needs an even tap count");
        Self {
            taps,
            beta,
            i0_beta: bessel_i0(beta),
        }
    }

    pub fn taps(&self) -> usize {
        self.taps
    }

    fn kernel(&self, d: T) -> T {
        let half = T::from_usize_lossy(self.taps / 2);
        let r = d / half;
        if r.abs() >= T::one() {
            return T::zero();
        }
        let sinc = if d == T::zero() {
            T::one()
        } else {
            (T::PI() * d).sin() / (T::PI() * d)
        };
        let w = bessel_i0(self.beta * (T::one() - r * r).sqrt()) / self.i0_beta;
        sinc * w
    }

    /// Value of the band-limited reconstruction of `x` at time `t` samples.
    pub fn sample_at<S: Sample<T>>(&self, x: &[S], t: T) -> S {
        let base = t.floor();
        let frac = t - base;
        let base = base.to_i64().unwrap_or(i64::MIN / 2);
        if frac == T::zero() {
            return if base >= 0 && (base as usize) < x.len() {
                x[base as usize]
            } else {
                S::default()
            };
        }
        let half = (self.taps / 2) as i64;
        let mut acc = S::default();
        let mut wsum = T::zero();
        for k in (base - half + 1)..=(base + half) {
            let w = self.kernel(t - T::lit(k as f64));
            wsum += w;
            if k >= 0 && (k as usize) < x.len() {
                acc += x[k as usize] * w;
            }
        }
        acc * (T::one() / wsum)
    }
}

impl<T: Real> Default for WindowedSinc<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Modified Bessel function of the first kind, order zero (power series).
fn bessel_i0<T: Real>(x: T) -> T {
    let half = x / T::lit(2.0);
    let mut term = T::one();
    let mut sum = T::one();
    for k in 1..64 {
        let kf = T::from_usize_lossy(k);
        term *= (half / kf) * (half / kf);
        sum += term;
        if term < sum * T::epsilon() {
            break;
        }
    }
    sum
}
