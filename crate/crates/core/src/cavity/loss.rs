use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::fields::{stored_energies, FieldSolution};
use super::{resonance_frequency, CavitySpec, ModeIndices, EPS0};
use crate::error::{config_err, Result};
use crate::scalar::Real;

/// Conductor loss of the TE10l mode,
/// `P = Rs·E₀²·λ²/(8η²)·[l²ac/b² + cb/a² + l²a/(2b) + b/(2a)]`,
/// the sum of `(Rs/2)∮|H_tan|²dS` over the six walls.
pub fn wall_loss<T: Real>(sol: &FieldSolution<T>, spec: &CavitySpec<T>, mode: ModeIndices) -> Result<T> {
    mode.require_te10l()?;
    if !(spec.rs >= T::zero()) {
        return Err(config_err(format!("surface resistance must be non-negative, got {}", spec.rs)));
    }
    let (a, b, c) = (spec.a, spec.b, spec.c);
    let l2 = T::from_u32(mode.l * mode.l).unwrap_or(T::zero());
    let two = T::lit(2.0);
    let lambda = sol.wavelength();
    let bracket = l2 * a * c / (b * b) + c * b / (a * a) + l2 * a / (two * b) + b / (two * a);
    Ok(spec.rs * sol.e0 * sol.e0 * lambda * lambda / (T::lit(8.0) * sol.eta * sol.eta) * bracket)
}

/// Dielectric conductivity `σ = ω·εr·ε₀·tanδ`.
pub fn effective_conductivity<T: Real>(omega: T, spec: &CavitySpec<T>) -> Result<T> {
    if !(omega > T::zero()) {
        return Err(config_err(format!("angular frequency must be positive, got {omega}")));
    }
    Ok(omega * spec.eps_r * T::lit(EPS0) * spec.tan_delta)
}

/// Quality-factor summary of one mode. A lossless channel has an infinite
/// Q, stored as `f64::INFINITY` and serialized as the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real + Serialize", deserialize = "T: Real + Deserialize<'de>"))]
pub struct QosReport<T> {
    pub mode: ModeIndices,
    pub f_mnl: T,
    pub u_e: T,
    pub u_m: T,
    pub p_wall: T,
    pub p_dielectric: T,
    pub sigma_eff: T,
    #[serde(serialize_with = "ser_q", deserialize_with = "de_q")]
    pub q_tx: T,
    #[serde(serialize_with = "ser_q", deserialize_with = "de_q")]
    pub q_rx: T,
    #[serde(serialize_with = "ser_q", deserialize_with = "de_q")]
    pub q_total: T,
}

fn ser_q<T: Real, S: Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() && *v > T::zero() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(v.to_f64_lossy())
    }
}

fn de_q<'de, T: Real, D: Deserializer<'de>>(d: D) -> std::result::Result<T, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Q {
        Num(f64),
        Str(String),
    }
    match Q::deserialize(d)? {
        Q::Num(v) => Ok(T::lit(v)),
        Q::Str(s) if s == "inf" => Ok(T::infinity()),
        Q::Str(s) => Err(serde::de::Error::custom(format!("invalid quality factor '{s}'"))),
    }
}

impl<T: Real> QosReport<T> {
    pub const CSV_HEADER: &'static str =
        "m,n,l,a,c,b,eps_r,tan_delta,rs,f_mnl,u_e,u_m,p_wall,p_dielectric,sigma_eff,q_tx,q_rx,q_total";

    pub fn is_lossless(&self) -> bool {
        self.q_total.is_infinite()
    }

    pub fn csv_row(&self, spec: &CavitySpec<T>) -> String {
        let q = |v: T| if v.is_infinite() { "inf".to_string() } else { format!("{v:?}") };
        format!(
            "{},{},{},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?},{},{},{}",
            self.mode.m,
            self.mode.n,
            self.mode.l,
            spec.a,
            spec.c,
            spec.b,
            spec.eps_r,
            spec.tan_delta,
            spec.rs,
            self.f_mnl,
            self.u_e,
            self.u_m,
            self.p_wall,
            self.p_dielectric,
            self.sigma_eff,
            q(self.q_tx),
            q(self.q_rx),
            q(self.q_total)
        )
    }
}

/// `Q_tx = 2ω₀U_E/P_wall`, `Q_rx = 1/tanδ` and their parallel combination.
pub fn q_factors<T: Real>(
    sol: &FieldSolution<T>,
    spec: &CavitySpec<T>,
    mode: ModeIndices,
    omega0: T,
) -> Result<QosReport<T>> {
    spec.validate()?;
    let (u_e, u_m) = stored_energies(sol, spec, mode)?;
    let p_wall = wall_loss(sol, spec, mode)?;
    let sigma_eff = effective_conductivity(omega0, spec)?;
    // (σ/2)∫|E|²dV
    let p_dielectric = sigma_eff * spec.volume() * sol.e0 * sol.e0 / T::lit(8.0);
    let q_tx = if p_wall > T::zero() {
        T::lit(2.0) * omega0 * u_e / p_wall
    } else {
        T::infinity()
    };
    let q_rx = if spec.tan_delta > T::zero() {
        T::one() / spec.tan_delta
    } else {
        T::infinity()
    };
    // a lossless channel drops out exactly instead of through 1/(1/q)
    let q_total = match (q_tx.is_infinite(), q_rx.is_infinite()) {
        (true, _) => q_rx,
        (false, true) => q_tx,
        (false, false) => combine_q(q_tx, q_rx),
    };
    Ok(QosReport {
        mode,
        f_mnl: resonance_frequency(mode, spec),
        u_e,
        u_m,
        p_wall,
        p_dielectric,
        sigma_eff,
        q_tx,
        q_rx,
        q_total,
    })
}

/// Parallel combination of two quality factors.
pub fn combine_q<T: Real>(q_tx: T, q_rx: T) -> T {
    T::one() / (T::one() / q_tx + T::one() / q_rx)
}
