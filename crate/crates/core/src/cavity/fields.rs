use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{mode_eigenvalue, CavitySpec, ModeIndices};
use crate::error::{config_err, Error, Result};
use crate::scalar::Real;

/// Standing-wave amplitude and wave parameters of a resonant mode.
/// `e0` is the peak transverse electric field (`E₀ = −2jB⁺` in terms of the
/// forward travelling-wave amplitude).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSolution<T> {
    pub e0: T,
    /// Wavenumber of the filling, rad/m.
    pub k: T,
    /// Propagation constant along Z, rad/m.
    pub alpha: T,
    /// Intrinsic impedance of the filling, ohm.
    pub eta: T,
}

impl<T: Real> FieldSolution<T> {
    pub fn new(e0: T, k: T, alpha: T, eta: T) -> Result<Self> {
        if !(k > T::zero()) || !(eta > T::zero()) || !(alpha >= T::zero()) || !e0.is_finite() {
            return Err(config_err(format!("invalid field solution (E0={e0}, K={k}, α={alpha}, η={eta})")));
        }
        Ok(Self { e0, k, alpha, eta })
    }

    /// The solution at the resonance of `mode`: `K = √O`, `α = lπ/b`.
    pub fn resonant(mode: ModeIndices, spec: &CavitySpec<T>, e0: T) -> Result<Self> {
        spec.validate()?;
        mode.validate()?;
        let alpha = T::PI() * T::from_u32(mode.l).unwrap_or(T::zero()) / spec.b;
        Self::new(e0, mode_eigenvalue(mode, spec).sqrt(), alpha, spec.eta())
    }

    /// Angular frequency `ω = K/√(με)`.
    pub fn omega(&self, spec: &CavitySpec<T>) -> T {
        self.k / (spec.mu() * spec.eps()).sqrt()
    }

    /// TE wave impedance `Z_w = Kη/α`.
    pub fn wave_impedance(&self) -> T {
        self.k * self.eta / self.alpha
    }

    /// Wavelength in the filling.
    pub fn wavelength(&self) -> T {
        T::TAU() / self.k
    }
}

/// `(E_y, H_x, H_z)` of the TE10l mode at `(x, y, z)`.
pub fn field_at<T: Real>(
    x: T,
    y: T,
    z: T,
    mode: ModeIndices,
    sol: &FieldSolution<T>,
    spec: &CavitySpec<T>,
) -> Result<(Complex<T>, Complex<T>, Complex<T>)> {
    mode.require_te10l()?;
    let inside = |v: T, len: T| v >= T::zero() && v <= len;
    if !(inside(x, spec.a) && inside(y, spec.c) && inside(z, spec.b)) {
        return Err(Error::Domain(format!(
            "point ({x}, {y}, {z}) lies outside the {}×{}×{} cavity",
            spec.a, spec.c, spec.b
        )));
    }
    let l = T::from_u32(mode.l).unwrap_or(T::zero());
    let (sx, cx) = (T::PI() * x / spec.a).sin_cos();
    let (sz, cz) = (l * T::PI() * z / spec.b).sin_cos();
    let ey = sol.e0 * sx * sz;
    let hx = -(sol.e0 / sol.wave_impedance()) * sx * cz;
    let hz = T::PI() * sol.e0 / (sol.k * sol.eta * spec.a) * cx * sz;
    Ok((
        Complex::new(ey, T::zero()),
        Complex::new(T::zero(), hx),
        Complex::new(T::zero(), hz),
    ))
}

/// Time-averaged electric and magnetic stored energy:
/// `U_E = ε·a·c·b·E₀²/16` and
/// `U_M = μ·a·c·b·E₀²/16·(1/Z_w² + π²/(K²η²a²))`, equal at resonance.
pub fn stored_energies<T: Real>(sol: &FieldSolution<T>, spec: &CavitySpec<T>, mode: ModeIndices) -> Result<(T, T)> {
    mode.require_te10l()?;
    let base = spec.volume() * sol.e0 * sol.e0 / T::lit(16.0);
    let u_e = spec.eps() * base;
    let zw = sol.wave_impedance();
    let u_m = spec.mu() * base * (T::one() / (zw * zw) + (T::PI() / (sol.k * sol.eta * spec.a)).powi(2));
    Ok((u_e, u_m))
}
