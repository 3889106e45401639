//! Dressed levels of the one-excitation manifold and the predicted position of
//! the transparency window.
//!
//! Only the block coupling `|ψ₊⁽⁰'⁰⁾⟩` to `|ψ₋⁽⁰'¹⁾⟩` is diagonalised. Energies are
//! angular frequencies in rad/s measured from `ω_a`; transition frequencies are
//! measured from `|ψ₋⁽⁰'⁰⁾⟩`.

use serde::{Deserialize, Serialize};

use crate::num::{lit, Real};
use crate::params::{DerivedParams, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DressedLevels<T> {
    /// Jaynes-Cummings mixing angle of the lowest manifold, rad.
    pub theta: T,
    /// Vibrational matrix element between the two mixed states.
    pub kappa: T,
    /// Energy of `|ψ₋⁽⁰'⁰⁾⟩`.
    pub e_minus_00: T,
    pub e_plus: T,
    pub e_minus: T,
    pub omega_plus: T,
    pub omega_minus: T,
    /// Mixing angle of the hybrid block, rad.
    pub phi: T,
}

/// Mixing angle and the two energies (upper first) of the manifold with
/// `m + 1` excitations, measured from `(m + 1)·ω_a`.
pub fn jc_doublet<T: Real>(m: u32, params: &SystemParams<T>) -> (T, [T; 2]) {
    let d = params.delta_a - params.delta_c;
    let two = lit::<T>(2.0);
    let coupling = two * lit::<T>(f64::from(m) + 1.0).sqrt() * params.g;
    let theta = if d == T::zero() { T::FRAC_PI_2() } else { coupling.atan2(d) };
    let half_split = (d * d + coupling * coupling).sqrt() / two;
    (theta, [d / two + half_split, d / two - half_split])
}

/// Hybrid levels on atom-cavity resonance, or for the actual detuning
/// `Ω − ω_a = Δ_a − Δ_c` when `general` is set.
pub fn hybrid_levels<T: Real>(params: &SystemParams<T>, derived: &DerivedParams<T>, general: bool) -> DressedLevels<T> {
    let two = lit::<T>(2.0);
    let half = lit::<T>(0.5);
    let g = params.g;
    let omega = params.omega;
    if !general {
        let kappa = derived.eta * half;
        let root = ((g - omega * half).powi(2) + kappa * kappa).sqrt();
        let centre = g + omega * half;
        return DressedLevels {
            theta: T::FRAC_PI_2(),
            kappa,
            e_minus_00: -g,
            e_plus: omega * half + root,
            e_minus: omega * half - root,
            omega_plus: centre + root,
            omega_minus: centre - root,
            phi: half * (two * kappa).atan2(two * g - omega),
        };
    }
    let (theta, [upper, lower]) = jc_doublet(0, params);
    let split = upper - lower;
    let kappa = derived.eta * half * theta.sin();
    let root = ((split - omega).powi(2) / lit(4.0) + kappa * kappa).sqrt();
    let centre = (split + omega) * half;
    DressedLevels {
        theta,
        kappa,
        e_minus_00: lower,
        e_plus: lower + centre + root,
        e_minus: lower + centre - root,
        omega_plus: centre + root,
        omega_minus: centre - root,
        phi: half * (two * kappa).atan2(split - omega),
    }
}

/// Probe detuning of the transparency window, `ω₋` on resonance.
pub fn predict_dip<T: Real>(params: &SystemParams<T>, derived: &DerivedParams<T>) -> T {
    hybrid_levels(params, derived, false).omega_minus
}
