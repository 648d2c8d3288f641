//! Numerical oracles for the closed forms: midpoint-rule volume and surface
//! integrals, and a finite-difference check of Faraday's law.

use num_complex::Complex;

use super::fields::{field_at, FieldSolution};
use super::{CavitySpec, ModeIndices};
use crate::error::{config_err, Result};
use crate::scalar::Real;

fn midpoints<T: Real>(len: T, n: usize) -> impl Iterator<Item = T> {
    let h = len / T::from_usize_lossy(n);
    (0..n).map(move |i| (T::from_usize_lossy(i) + T::lit(0.5)) * h)
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(config_err(format!("quadrature needs at least 2 points per axis, got {n}")));
    }
    Ok(())
}

/// Sums `f(E_y, H_x, H_z)` over an `n³` midpoint grid times the cell volume.
/// The TE10l fields do not depend on y, so the y sum collapses to a factor.
fn volume_integral<T: Real>(
    sol: &FieldSolution<T>,
    spec: &CavitySpec<T>,
    mode: ModeIndices,
    n: usize,
    f: impl Fn(Complex<T>, Complex<T>, Complex<T>) -> T,
) -> Result<T> {
    check_n(n)?;
    let mut acc = T::zero();
    for x in midpoints(spec.a, n) {
        for z in midpoints(spec.b, n) {
            let (ey, hx, hz) = field_at(x, spec.c / T::lit(2.0), z, mode, sol, spec)?;
            acc += f(ey, hx, hz);
        }
    }
    let nn = T::from_usize_lossy(n);
    Ok(acc * spec.a * spec.b * spec.c / (nn * nn))
}

/// `(ε/4)∫|E|²dV`.
pub fn electric_energy<T: Real>(sol: &FieldSolution<T>, spec: &CavitySpec<T>, mode: ModeIndices, n: usize) -> Result<T> {
    let e = spec.eps() / T::lit(4.0);
    volume_integral(sol, spec, mode, n, |ey, _, _| e * ey.norm_sqr())
}

/// `(μ/4)∫|H|²dV`.
pub fn magnetic_energy<T: Real>(sol: &FieldSolution<T>, spec: &CavitySpec<T>, mode: ModeIndices, n: usize) -> Result<T> {
    let m = spec.mu() / T::lit(4.0);
    volume_integral(sol, spec, mode, n, |_, hx, hz| m * (hx.norm_sqr() + hz.norm_sqr()))
}

/// `(Rs/2)∮|H_tan|²dS` over all six walls on an `n × n` midpoint grid per
/// wall.
pub fn wall_loss<T: Real>(sol: &FieldSolution<T>, spec: &CavitySpec<T>, mode: ModeIndices, n: usize) -> Result<T> {
    check_n(n)?;
    let (a, b, c) = (spec.a, spec.b, spec.c);
    let nn = T::from_usize_lossy(n * n);
    let h = |x: T, y: T, z: T| field_at(x, y, z, mode, sol, spec).map(|(_, hx, hz)| (hx.norm_sqr(), hz.norm_sqr()));
    let mut total = T::zero();
    // z = 0 and z = b: tangential H_x, H_y (H_y is identically zero)
    for zw in [T::zero(), b] {
        let mut s = T::zero();
        for x in midpoints(a, n) {
            for y in midpoints(c, n) {
                s += h(x, y, zw)?.0;
            }
        }
        total += s * a * c / nn;
    }
    // x = 0 and x = a: tangential H_y, H_z
    for xw in [T::zero(), a] {
        let mut s = T::zero();
        for y in midpoints(c, n) {
            for z in midpoints(b, n) {
                s += h(xw, y, z)?.1;
            }
        }
        total += s * c * b / nn;
    }
    // y = 0 and y = c: tangential H_x, H_z
    for yw in [T::zero(), c] {
        let mut s = T::zero();
        for x in midpoints(a, n) {
            for z in midpoints(b, n) {
                let (p, q) = h(x, yw, z)?;
                s += p + q;
            }
        }
        total += s * a * b / nn;
    }
    Ok(spec.rs / T::lit(2.0) * total)
}

/// Largest relative residual of `∇×E = −jωμH` over the interior points of
/// an `n³` grid, with central differences of step `len/n`. Each component
/// is scaled by the peak of `ωμ|H|` for that component.
pub fn curl_residual<T: Real>(sol: &FieldSolution<T>, spec: &CavitySpec<T>, mode: ModeIndices, n: usize) -> Result<T> {
    check_n(n)?;
    let (hx_step, hz_step) = (spec.a / T::from_usize_lossy(n), spec.b / T::from_usize_lossy(n));
    let two = T::lit(2.0);
    let jwmu = Complex::new(T::zero(), sol.omega(spec) * spec.mu());
    let hx_peak = jwmu.im * sol.e0 / sol.wave_impedance();
    let hz_peak = jwmu.im * T::PI() * sol.e0 / (sol.k * sol.eta * spec.a);
    let y = spec.c / two;
    let mut worst = T::zero();
    for i in 1..n {
        let x = T::from_usize_lossy(i) * hx_step;
        for k in 1..n {
            let z = T::from_usize_lossy(k) * hz_step;
            let ey = |x: T, z: T| field_at(x, y, z, mode, sol, spec).map(|f| f.0);
            let d_dz = (ey(x, z + hz_step)? - ey(x, z - hz_step)?) / (two * hz_step);
            let d_dx = (ey(x + hx_step, z)? - ey(x - hx_step, z)?) / (two * hx_step);
            let (_, hx, hz) = field_at(x, y, z, mode, sol, spec)?;
            // (∇×E)_x = −∂E_y/∂z, (∇×E)_z = ∂E_y/∂x
            let rx = (-d_dz + jwmu * hx).norm() / hx_peak;
            let rz = (d_dx + jwmu * hz).norm() / hz_peak;
            worst = worst.max(rx).max(rz);
        }
    }
    Ok(worst)
}
