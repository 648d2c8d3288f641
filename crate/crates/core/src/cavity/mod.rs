//! Rectangular cavity resonator: mode eigenvalues, resonance, TE10l fields,
//! stored energies, conductor and dielectric loss, and quality factors.
//!
//! The resonator is an `a × c × b` box: `a` along X, `c` along Y and the
//! resonant length `b` along Z. Although the structure is sometimes
//! described as a closed cylinder, every field expression here is a
//! separable Cartesian standing wave, so the rectangular reading is the only
//! self-consistent one. A TE_mn waveguide mode of the `a × c` cross-section
//! resonates when its propagation constant satisfies `α·b = lπ`.
//!
//! Resonance uses the standard form `f = c₀/(2π√(μr·εr))·√O_mnl`.

mod fields;
mod loss;
pub mod quadrature;

pub use fields::{field_at, stored_energies, FieldSolution};
pub use loss::{combine_q, effective_conductivity, q_factors, wall_loss, QosReport};

use serde::{Deserialize, Serialize};

use crate::error::{config_err, Error, Result};
use crate::scalar::Real;

/// Vacuum speed of light, m/s.
pub const C0: f64 = 299_792_458.0;
/// Vacuum permeability (CODATA 2018), H/m.
pub const MU0: f64 = 1.256_637_062_12e-6;
/// Vacuum permittivity (CODATA 2018), F/m.
pub const EPS0: f64 = 8.854_187_812_8e-12;

/// Box geometry and material. `rs` is the wall surface resistance in ohms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct CavitySpec<T> {
    pub a: T,
    pub c: T,
    pub b: T,
    #[serde(default = "one")]
    pub mu_r: T,
    #[serde(default = "one")]
    pub eps_r: T,
    #[serde(default)]
    pub tan_delta: T,
    #[serde(default, alias = "Rs")]
    pub rs: T,
}

fn one<T: Real>() -> T {
    T::one()
}

impl<T: Real> CavitySpec<T> {
    /// Vacuum-filled, lossless box.
    pub fn vacuum(a: T, c: T, b: T) -> Self {
        Self {
            a,
            c,
            b,
            mu_r: T::one(),
            eps_r: T::one(),
            tan_delta: T::zero(),
            rs: T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a", self.a), ("c", self.c), ("b", self.b), ("mu_r", self.mu_r), ("eps_r", self.eps_r)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(config_err(format!("cavity {name} must be positive and finite, got {v}")));
            }
        }
        for (name, v) in [("tan_delta", self.tan_delta), ("rs", self.rs)] {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(config_err(format!("cavity {name} must be non-negative and finite, got {v}")));
            }
        }
        Ok(())
    }

    pub fn mu(&self) -> T {
        self.mu_r * T::lit(MU0)
    }

    pub fn eps(&self) -> T {
        self.eps_r * T::lit(EPS0)
    }

    /// Intrinsic impedance `η = √(μ/ε)` of the filling.
    pub fn eta(&self) -> T {
        (self.mu() / self.eps()).sqrt()
    }

    pub fn volume(&self) -> T {
        self.a * self.b * self.c
    }

    /// Surface resistance `√(ωμ₀/2σ)` of a non-magnetic wall metal of
    /// conductivity `sigma` at frequency `f_hz`.
    pub fn surface_resistance(sigma: T, f_hz: T) -> T {
        (T::TAU() * f_hz * T::lit(MU0) / (T::lit(2.0) * sigma)).sqrt()
    }
}

/// Mode indices along X, Y and Z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeIndices {
    pub m: u32,
    pub n: u32,
    pub l: u32,
}

impl ModeIndices {
    pub fn new(m: u32, n: u32, l: u32) -> Result<Self> {
        let mode = Self { m, n, l };
        mode.validate()?;
        Ok(mode)
    }

    pub fn te10(l: u32) -> Result<Self> {
        Self::new(1, 0, l)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 && self.n == 0 {
            return Err(config_err(format!("mode {self}: m and n cannot both be zero")));
        }
        if self.l == 0 {
            return Err(config_err(format!("mode {self}: l must be at least 1 for resonance")));
        }
        Ok(())
    }

    pub fn is_te10l(&self) -> bool {
        self.m == 1 && self.n == 0
    }

    pub(crate) fn require_te10l(&self) -> Result<()> {
        self.validate()?;
        if !self.is_te10l() {
            return Err(Error::Domain(format!("closed-form fields exist only for TE10l, got {self}")));
        }
        Ok(())
    }
}

impl std::fmt::Display for ModeIndices {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.m, self.n, self.l)
    }
}

/// Guided-wave propagation constant, or the attenuation constant when the
/// wavenumber is below cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Propagation<T> {
    Propagating(T),
    Evanescent(T),
}

impl<T: Real> Propagation<T> {
    pub fn propagating(self) -> Option<T> {
        match self {
            Propagation::Propagating(a) => Some(a),
            Propagation::Evanescent(_) => None,
        }
    }
}

/// `α = √(K² − (mπ/a)² − (nπ/c)²)` for the TE/TM_mn mode of an `a × c`
/// cross-section. At cutoff the result is `Propagating(0)`.
pub fn propagation_constant<T: Real>(k: T, m: u32, n: u32, a: T, c: T) -> Result<Propagation<T>> {
    if !(k > T::zero() && a > T::zero() && c > T::zero()) {
        return Err(config_err(format!("K, a, c must be positive (K={k}, a={a}, c={c})")));
    }
    let kc2 = (T::PI() * T::from_u32(m).unwrap_or(T::zero()) / a).powi(2)
        + (T::PI() * T::from_u32(n).unwrap_or(T::zero()) / c).powi(2);
    let d = k * k - kc2;
    Ok(if d >= T::zero() {
        Propagation::Propagating(d.sqrt())
    } else {
        Propagation::Evanescent((-d).sqrt())
    })
}

/// `O = (mπ/a)² + (nπ/c)² + (lπ/b)²`.
pub fn mode_eigenvalue<T: Real>(mode: ModeIndices, spec: &CavitySpec<T>) -> T {
    let term = |i: u32, len: T| (T::PI() * T::from_u32(i).unwrap_or(T::zero()) / len).powi(2);
    term(mode.m, spec.a) + term(mode.n, spec.c) + term(mode.l, spec.b)
}

pub fn resonance_frequency<T: Real>(mode: ModeIndices, spec: &CavitySpec<T>) -> T {
    T::lit(C0) / (T::TAU() * (spec.mu_r * spec.eps_r).sqrt()) * mode_eigenvalue(mode, spec).sqrt()
}
