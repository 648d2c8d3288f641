//! Gray-coded QPSK with unit average energy.
//!
//! | bits (b0 b1) | symbol          |
//! |--------------|-----------------|
//! | 0 0          | (+1 + j)/√2     |
//! | 0 1          | (+1 - j)/√2     |
//! | 1 0          | (-1 + j)/√2     |
//! | 1 1          | (-1 - j)/√2     |
//!
//! `b0` selects the sign of the in-phase rail, `b1` the quadrature rail.

use num_complex::Complex;

use super::frame::HEADER_BITS;
use crate::error::{dim_err, Result};
use crate::scalar::Real;

pub const BITS_PER_SYMBOL: usize = 2;

fn rail<T: Real>(bit: bool) -> T {
    let a = T::FRAC_1_SQRT_2();
    if bit {
        -a
    } else {
        a
    }
}

pub fn qpsk_map<T: Real>(bits: &[bool]) -> Result<Vec<Complex<T>>> {
    if !bits.len().is_multiple_of(2) {
        return Err(dim_err(format!("QPSK needs an even bit count, got {}", bits.len())));
    }
    Ok(bits
        .chunks_exact(2)
        .map(|p| Complex::new(rail(p[0]), rail(p[1])))
        .collect())
}

/// Hard-decision demapping of one symbol to `(bit1, bit2)`.
#[inline]
pub fn qpsk_demap_symbol<T: Real>(s: Complex<T>) -> (bool, bool) {
    (s.re < T::zero(), s.im < T::zero())
}

pub fn qpsk_demap<T: Real>(symbols: &[Complex<T>]) -> Vec<bool> {
    symbols
        .iter()
        .flat_map(|&s| {
            let (a, b) = qpsk_demap_symbol(s);
            [a, b]
        })
        .collect()
}

/// BPSK on the QPSK diagonal: bit pair `(b, b)`.
pub fn bpsk_diagonal<T: Real>(bit: bool) -> Complex<T> {
    Complex::new(rail(bit), rail(bit))
}

/// Preamble symbols: each header bit sent as diagonal BPSK.
pub fn preamble_symbols<T: Real>() -> Vec<Complex<T>> {
    HEADER_BITS.iter().map(|&b| bpsk_diagonal(b)).collect()
}
