//! Fast Walsh-Hadamard transform.
//!
//! The butterfly network produces coefficients in natural (Hadamard) order:
//! coefficient `k` is the inner product with row `k` of the Sylvester
//! Hadamard matrix, `H[k][n] = (-1)^popcount(k & n)`. Sequency order
//! re-indexes them so that coefficient `s` corresponds to the basis
//! function with exactly `s` sign changes. The transform is unnormalized.

use crate::error::{dim_err, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WhtOrdering {
    /// Sylvester/Hadamard row order.
    #[default]
    Natural,
    /// Ordered by number of sign changes of the basis function.
    Sequency,
}

/// In-place natural-order FWHT. Length must be a power of two.
pub fn fwht_in_place<T: Real>(x: &mut [T]) -> Result<()> {
    let n = x.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(dim_err(format!("FWHT length must be a power of two, got {n}")));
    }
    let mut h = 1;
    while h < n {
        for block in x.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*a, *b);
                *a = u + v;
                *b = u - v;
            }
        }
        h *= 2;
    }
    Ok(())
}

/// Natural index holding sequency coefficient `s` for a transform of
/// `2^bits` points: bit-reversal of the Gray code of `s`.
pub fn hadamard_to_sequency_index(s: usize, bits: u32) -> usize {
    let gray = s ^ (s >> 1);
    if bits == 0 {
        return 0;
    }
    gray.reverse_bits() >> (usize::BITS - bits)
}

/// Out-of-place FWHT with the requested coefficient ordering.
pub fn fwht<T: Real>(x: &[T], ordering: WhtOrdering) -> Result<Vec<T>> {
    let mut y = x.to_vec();
    fwht_in_place(&mut y)?;
    match ordering {
        WhtOrdering::Natural => Ok(y),
        WhtOrdering::Sequency => {
            let bits = y.len().trailing_zeros();
            Ok((0..y.len())
                .map(|s| y[hadamard_to_sequency_index(s, bits)])
                .collect())
        }
    }
}
