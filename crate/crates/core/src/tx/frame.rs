use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};
use crate::seed::rng_for;

/// The 13-chip Barker code.
pub const BARKER13: [i8; 13] = [1, 1, 1, 1, 1, -1, -1, 1, 1, -1, 1, -1, 1];

pub const HEADER_LEN: usize = 26;

/// Frame header: Barker-13 twice, chip `+1 -> 0`, `-1 -> 1`.
pub const HEADER_BITS: [bool; HEADER_LEN] = {
    let mut h = [false; HEADER_LEN];
    let mut i = 0;
    while i < HEADER_LEN {
        h[i] = BARKER13[i % 13] < 0;
        i += 1;
    }
    h
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FramePayload {
    pub header_bits: Vec<bool>,
    pub payload_bits: Vec<bool>,
    pub frame_index: u64,
}

impl FramePayload {
    /// Header followed by payload.
    pub fn bits(&self) -> Vec<bool> {
        let mut b = self.header_bits.clone();
        b.extend_from_slice(&self.payload_bits);
        b
    }
}

/// Frame with a pseudo-random payload drawn from ChaCha8 seeded by
/// `derive_seed(seed, frame_index)`.
pub fn generate_frame(seed: u64, frame_index: u64, payload_len: usize) -> Result<FramePayload> {
    if !payload_len.is_multiple_of(2) {
        return Err(config_err(format!("payload length must be even, got {payload_len}")));
    }
    let mut rng = rng_for(seed, frame_index);
    Ok(FramePayload {
        header_bits: HEADER_BITS.to_vec(),
        payload_bits: (0..payload_len).map(|_| rng.random::<bool>()).collect(),
        frame_index,
    })
}

pub fn generate_frame_bits(seed: u64, payload_len: usize) -> Result<FramePayload> {
    generate_frame(seed, 0, payload_len)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        assert_eq!(generate_frame_bits(7, 512).unwrap(), generate_frame_bits(7, 512).unwrap());
        assert_ne!(generate_frame_bits(7, 512).unwrap(), generate_frame_bits(8, 512).unwrap());
    }

    #[test]
    fn header_constant() {
        let expect = [
            false, false, false, false, false, true, true, false, false, true, false, true, false,
        ];
        for idx in 0..20 {
            let f = generate_frame(3, idx, 64).unwrap();
            assert_eq!(&f.bits()[..13], &expect);
            assert_eq!(&f.bits()[13..26], &expect);
        }
    }

    #[test]
    fn odd_length_rejected() {
        assert!(generate_frame_bits(1, 33).is_err());
    }

    #[test]
    fn monobit_balance() {
        // a fair-coin source exceeds 4·sqrt(n) imbalance with probability ~6e-5
        let len = 4096;
        for seed in 0..20 {
            let f = generate_frame_bits(seed, len).unwrap();
            let ones = f.payload_bits.iter().filter(|&&b| b).count() as i64;
            let zeros = len as i64 - ones;
            assert!((ones - zeros).abs() as f64 <= 4.0 * (len as f64).sqrt());
        }
    }
}
