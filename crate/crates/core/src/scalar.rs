//! Scalar abstraction shared by every numeric kernel.
//!
//! All DSP and field computations are written against [`Real`], which is
//! implemented for `f32` and `f64`. The crate root exposes `f64` aliases for
//! the common types.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, RemAssign, SubAssign};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FftNum
    + Default
    + Display
    + Debug
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + RemAssign
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("f64 literal representable")
    }

    /// Converts a count or index into this scalar type.
    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A value that can be scaled by a real tap: real samples and complex samples.
pub trait Sample<T: Real>:
    Copy + Default + Debug + Send + Sync + std::ops::Add<Output = Self> + std::ops::Mul<T, Output = Self> + AddAssign
{
    fn is_finite_sample(&self) -> bool;
    fn norm_sqr_sample(&self) -> T;
}

impl<T: Real> Sample<T> for T {
    fn is_finite_sample(&self) -> bool {
        self.is_finite()
    }
    fn norm_sqr_sample(&self) -> T {
        *self * *self
    }
}

impl<T: Real> Sample<T> for Complex<T> {
    fn is_finite_sample(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn norm_sqr_sample(&self) -> T {
        self.norm_sqr()
    }
}

/// Unit phasor `exp(j·phase)`.
#[inline]
pub fn cis<T: Real>(phase: T) -> Complex<T> {
    let (s, c) = phase.sin_cos();
    Complex::new(c, s)
}
