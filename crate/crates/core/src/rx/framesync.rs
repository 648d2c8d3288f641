//! Preamble correlation, carrier-ambiguity resolution and demapping.
//!
//! The normalized correlation `ρ_k = |Σ r_{k+i} p_i*| / √(Σ|r_{k+i}|²·Σ|p_i|²)`
//! is computed at every offset. Local maxima over `±(P−1)` symbols that
//! reach the threshold are candidates; candidates are accepted strongest
//! first, discarding any that would start inside an accepted frame. The
//! phase of the accepted correlation, rounded to a multiple of 90°, is the
//! QPSK ambiguity removed from that frame's payload.
//!
//! A payload runs from the end of the preamble for `payload_symbols`
//! symbols, cut short by the next accepted frame or the end of the stream.
//! `valid` is high exactly on those symbols; `bit1`/`bit2` are false
//! elsewhere.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};
use crate::scalar::Real;
use crate::tx::qpsk_demap_symbol;

/// Default detection threshold on the normalized correlation.
pub const DEFAULT_THRESHOLD: f64 = 0.6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectedFrame<T> {
    /// Symbol index of the first preamble symbol.
    pub start: usize,
    pub payload_start: usize,
    /// Payload symbols actually decoded (shorter than nominal if truncated).
    pub payload_len: usize,
    pub correlation: T,
    /// Ambiguity rotation removed, in quarter turns.
    pub quadrant: u8,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FrameSyncOutput<T> {
    pub bit1: Vec<bool>,
    pub bit2: Vec<bool>,
    pub valid: Vec<bool>,
    pub frames: Vec<DetectedFrame<T>>,
    /// Gaps between accepted frames long enough to hold at least one more
    /// frame, counted in frames.
    pub dropped_estimate: usize,
}

/// Normalized correlation at every offset `0..=N−P`.
pub fn preamble_correlation<T: Real>(symbols: &[Complex<T>], preamble: &[Complex<T>]) -> Vec<(T, Complex<T>)> {
    let p = preamble.len();
    if p == 0 || symbols.len() < p {
        return Vec::new();
    }
    let ep: T = preamble.iter().map(|v| v.norm_sqr()).sum();
    let mut er: T = symbols[..p].iter().map(|v| v.norm_sqr()).sum();
    let mut out = Vec::with_capacity(symbols.len() - p + 1);
    for k in 0..=symbols.len() - p {
        if k > 0 {
            er = er - symbols[k - 1].norm_sqr() + symbols[k + p - 1].norm_sqr();
            if k % 4096 == 0 {
                er = symbols[k..k + p].iter().map(|v| v.norm_sqr()).sum();
            }
        }
        let c: Complex<T> = symbols[k..k + p]
            .iter()
            .zip(preamble)
            .fold(Complex::default(), |acc, (r, q)| acc + r * q.conj());
        let den = (er.max(T::zero()) * ep).sqrt();
        let rho = if den > T::zero() { c.norm() / den } else { T::zero() };
        out.push((rho, c));
    }
    out
}

pub fn frame_sync_decode<T: Real>(
    symbols: &[Complex<T>],
    preamble: &[Complex<T>],
    payload_symbols: usize,
    threshold: T,
) -> Result<FrameSyncOutput<T>> {
    if preamble.is_empty() {
        return Err(config_err("preamble is empty"));
    }
    if !(threshold > T::zero() && threshold <= T::one()) {
        return Err(config_err(format!("frame threshold must lie in (0, 1], got {threshold}")));
    }
    let n = symbols.len();
    let p = preamble.len();
    let frame_len = p + payload_symbols;
    let corr = preamble_correlation(symbols, preamble);

    let mut cands: Vec<usize> = Vec::new();
    for k in 0..corr.len() {
        let r = corr[k].0;
        if r < threshold {
            continue;
        }
        let lo = k.saturating_sub(p - 1);
        let hi = (k + p).min(corr.len());
        let is_max = (lo..hi).all(|j| {
            let o = corr[j].0;
            if j < k {
                o < r
            } else {
                o <= r
            }
        });
        if is_max {
            cands.push(k);
        }
    }
    cands.sort_by(|&a, &b| corr[b].0.partial_cmp(&corr[a].0).unwrap().then(a.cmp(&b)));
    let guard = frame_len.saturating_sub(2).max(p);
    let mut accepted: Vec<usize> = Vec::new();
    for k in cands {
        if accepted.iter().all(|&a| a.abs_diff(k) >= guard) {
            accepted.push(k);
        }
    }
    accepted.sort_unstable();

    let mut out = FrameSyncOutput {
        bit1: vec![false; n],
        bit2: vec![false; n],
        valid: vec![false; n],
        frames: Vec::with_capacity(accepted.len()),
        dropped_estimate: 0,
    };
    for (i, &k) in accepted.iter().enumerate() {
        let c = corr[k].1;
        let quarter = T::FRAC_PI_2();
        let q = ((c.im.atan2(c.re) / quarter).round().to_i64().unwrap_or(0)).rem_euclid(4) as u8;
        let derot = match q {
            0 => Complex::new(T::one(), T::zero()),
            1 => Complex::new(T::zero(), -T::one()),
            2 => Complex::new(-T::one(), T::zero()),
            _ => Complex::new(T::zero(), T::one()),
        };
        let start = k + p;
        let next = accepted.get(i + 1).copied().unwrap_or(n);
        let end = (start + payload_symbols).min(next).min(n);
        for j in start..end {
            let (b1, b2) = qpsk_demap_symbol(symbols[j] * derot);
            out.bit1[j] = b1;
            out.bit2[j] = b2;
            out.valid[j] = true;
        }
        if let Some(nx) = accepted.get(i + 1) {
            let gap = nx - k;
            if gap >= 2 * frame_len - 2 {
                out.dropped_estimate += (gap + 2) / frame_len - 1;
            }
        }
        out.frames.push(DetectedFrame {
            start: k,
            payload_start: start,
            payload_len: end.saturating_sub(start),
            correlation: corr[k].0,
            quadrant: q,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tx::{preamble_symbols, qpsk_map};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn bits(n: usize, rng: &mut ChaCha8Rng) -> Vec<bool> {
        (0..n).map(|_| rng.random()).collect()
    }

    #[test]
    fn ambiguity_rotation_resolved() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let pre = preamble_symbols::<f64>();
        for q in 0..4 {
            let payload = bits(200, &mut rng);
            let mut s = qpsk_map::<f64>(&bits(40, &mut rng)).unwrap();
            s.extend(pre.iter().copied());
            s.extend(qpsk_map::<f64>(&payload).unwrap());
            let rot = Complex::new(0.0, 1.0).powu(q);
            let s: Vec<_> = s.into_iter().map(|v| v * rot).collect();
            let out = frame_sync_decode(&s, &pre, 100, 0.6).unwrap();
            assert_eq!(out.frames.len(), 1);
            let f = &out.frames[0];
            assert_eq!(f.start, 20);
            assert_eq!(f.quadrant as u32, q);
            let got: Vec<bool> = (f.payload_start..f.payload_start + 100)
                .flat_map(|j| [out.bit1[j], out.bit2[j]])
                .collect();
            assert_eq!(got, payload);
        }
    }

    #[test]
    fn bits_only_where_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let pre = preamble_symbols::<f64>();
        let mut s = Vec::new();
        for _ in 0..5 {
            s.extend(pre.iter().copied());
            s.extend(qpsk_map::<f64>(&bits(120, &mut rng)).unwrap());
        }
        let out = frame_sync_decode(&s, &pre, 60, 0.6).unwrap();
        assert_eq!(out.frames.len(), 5);
        for j in 0..s.len() {
            if !out.valid[j] {
                assert!(!out.bit1[j] && !out.bit2[j]);
            }
        }
        assert_eq!(out.valid.iter().filter(|&&v| v).count(), 300);
        assert_eq!(out.dropped_estimate, 0);
    }

    #[test]
    fn false_alarm_rate_on_random_symbols() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        let pre = preamble_symbols::<f64>();
        let s = qpsk_map::<f64>(&bits(2 * 200_000, &mut rng)).unwrap();
        let corr = preamble_correlation(&s, &pre);
        let hits = corr.iter().filter(|c| c.0 >= 0.6).count();
        let rate = hits as f64 / corr.len() as f64;
        assert!(rate <= 1e-3, "false alarm rate {rate}");
    }

    #[test]
    fn missing_frame_counted() {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        let pre = preamble_symbols::<f64>();
        let mut s = Vec::new();
        for i in 0..4 {
            if i == 2 {
                s.extend(qpsk_map::<f64>(&bits(52, &mut rng)).unwrap());
            } else {
                s.extend(pre.iter().copied());
            }
            s.extend(qpsk_map::<f64>(&bits(200, &mut rng)).unwrap());
        }
        let out = frame_sync_decode(&s, &pre, 100, 0.6).unwrap();
        assert_eq!(out.frames.len(), 3);
        assert_eq!(out.dropped_estimate, 1);
        // frame 1's payload is not cut by the missing frame
        assert_eq!(out.frames[1].payload_len, 100);
    }
}
