//! First-sideband linear response to the probe and the atom-channel output field.
//!
//! Every variable is expanded as `X₀ + X₊e^{iδt} + X₋e^{−iδt}` and the chain
//! `B → A → Z → L` is evaluated in model units. The atomic coherence sidebands
//! close on themselves as a 2×2 system in `(L₊, L₋*)`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{lit, re, Real};
use crate::params::Model;
use crate::steady_state::SteadyBranch;

/// Relative size below which a denominator counts as a pole.
pub const POLE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidebandCoefficients<T> {
    /// Probe detuning, model units.
    pub delta: T,
    /// Probe amplitude the chain was evaluated with, model units.
    pub eps: T,
    pub lambda1: Complex<T>,
    pub lambda2: Complex<T>,
    pub lambda3: Complex<T>,
    pub b_coef1: Complex<T>,
    pub b_coef2: Complex<T>,
    pub a_coef1: Complex<T>,
    pub a_coef2: Complex<T>,
    pub a_coef3: Complex<T>,
    pub a_coef4: Complex<T>,
    pub a_coef5: Complex<T>,
    pub a_coef6: Complex<T>,
    pub z_coef1: Complex<T>,
    pub z_coef2: Complex<T>,
    pub z_coef3: Complex<T>,
    pub z_coef4: Complex<T>,
    pub l_coef1: Complex<T>,
    pub l_coef2: Complex<T>,
    pub l_coef3: Complex<T>,
    pub l_coef4: Complex<T>,
    pub l_coef5: Complex<T>,
    pub l_coef6: Complex<T>,
}

/// First-order amplitudes and output field at one probe detuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SidebandResponse<T> {
    pub a_plus: Complex<T>,
    pub a_minus: Complex<T>,
    pub b_plus: Complex<T>,
    pub b_minus: Complex<T>,
    pub z_plus: Complex<T>,
    pub z_minus: Complex<T>,
    pub l_plus: Complex<T>,
    pub l_minus: Complex<T>,
    /// Static output component, √(rad/s).
    pub l_out0: Complex<T>,
    /// Output component at the probe frequency per unit probe, 1/√(rad/s).
    pub l_out_minus: Complex<T>,
    /// Output component at the mirror frequency per unit probe, 1/√(rad/s).
    pub l_out_plus: Complex<T>,
    pub eps_out: Complex<T>,
    /// Absorption quadrature.
    pub mu_p: T,
    /// Dispersion quadrature.
    pub nu_p: T,
}

fn check_pole<T: Real>(
    coefficient: &'static str,
    value: Complex<T>,
    terms: &[Complex<T>],
    delta: T,
    scale: T,
) -> Result<()> {
    let size = terms.iter().fold(T::zero(), |m, t| m.max(t.norm()));
    let tol = lit::<T>(POLE_TOL).max(lit::<T>(4.0) * T::epsilon());
    if !(value.re.is_finite() && value.im.is_finite()) || value.norm() <= tol * size {
        return Err(Error::Pole { coefficient, delta: (delta * scale).to_f64().unwrap_or(f64::NAN) });
    }
    Ok(())
}

fn inv<T: Real>(
    coefficient: &'static str,
    den: Complex<T>,
    terms: &[Complex<T>],
    delta: T,
    scale: T,
) -> Result<Complex<T>> {
    check_pole(coefficient, den, terms, delta, scale)?;
    Ok(den.inv())
}

/// Evaluates the coefficient chain at probe detuning `delta` (model units).
pub fn coefficients<T: Real>(branch: &SteadyBranch<T>, model: &Model<T>, delta: T) -> Result<SidebandCoefficients<T>> {
    coefficients_with_eps(branch, model, delta, model.eps)
}

fn coefficients_with_eps<T: Real>(
    branch: &SteadyBranch<T>,
    m: &Model<T>,
    delta: T,
    eps: T,
) -> Result<SidebandCoefficients<T>> {
    if !delta.is_finite() {
        return Err(Error::InvalidParameter { name: "delta", reason: "must be finite".into() });
    }
    let two = lit::<T>(2.0);
    let half = lit::<T>(0.5);
    let i = Complex::new(T::zero(), T::one());
    let s = m.scale;
    let (a0, b0, l0, z0) = (branch.a0, branch.b0, branch.l0, branch.z0);
    let u = a0.norm_sqr();
    let g = m.g;

    let den1 = Complex::new(delta, -m.gamma_q);
    let lambda1 = inv("lambda1", den1, &[re(delta), re(m.gamma_q)], delta, s)? * two;
    let den2 = Complex::new(two * (delta + m.delta_a), -m.gamma_q);
    let lambda2 = inv("lambda2", den2, &[re(two * delta), re(two * m.delta_a), re(m.gamma_q)], delta, s)? * two;
    let den3 = Complex::new(two * (m.delta_a - delta), -m.gamma_q);
    let lambda3 = inv("lambda3", den3, &[re(two * delta), re(two * m.delta_a), re(m.gamma_q)], delta, s)? * two;

    let b_coef1 = re(-two * m.eta) / Complex::new(m.gamma_b, two * (m.omega + delta));
    let b_coef2 = re(-two * m.eta) / Complex::new(m.gamma_b, two * (m.omega - delta));

    let beta = b0 - b0.conj();
    let c_plus = b_coef1 - b_coef2.conj();
    let c_minus = b_coef2 - b_coef1.conj();
    let a5 = Complex::new(-(delta + m.delta_c), m.gamma_a * half) - i * m.eta * (beta + c_plus * u);
    let a6 = Complex::new(delta - m.delta_c, m.gamma_a * half) - i * m.eta * (beta + c_minus * u);
    let direct = a5 * a6.conj();
    let cross = c_plus * c_plus * (m.eta * m.eta * u * u);
    let det = direct + cross;
    let det_inv = inv("det(A5, A6)", det, &[direct, cross], delta, s)?;
    let a_coef1 = a6.conj() * g * det_inv;
    let a_coef2 = i * a0 * a0 * c_plus * (m.eta * g) * det_inv;
    let a_coef3 = a5.conj() * g * det_inv.conj();
    let a_coef4 = i * a0 * a0 * c_minus * (m.eta * g) * det_inv.conj();

    let w = a0 * g + m.xi;
    let wc = w.conj();
    let z_coef1 = lambda1 * (wc + a_coef4.conj() * l0 * g - a_coef1 * l0.conj() * g);
    let z_coef2 = lambda1 * (-w + a_coef3.conj() * l0 * g - a_coef2 * l0.conj() * g);
    let z_coef3 = lambda1.conj() * (-wc + a_coef3 * l0.conj() * g - a_coef2.conj() * l0 * g);
    let z_coef4 = lambda1.conj() * (w + a_coef4 * l0.conj() * g - a_coef1.conj() * l0 * g);

    let gz = g * z0;
    let l_coef1 = lambda2 * (z_coef1 * w + a_coef1 * gz);
    let l_coef2 = lambda2 * (z_coef2 * w + a_coef2 * gz);
    let l_coef3 = lambda1 * lambda2 * l0 * w * eps;
    let l_coef4 = lambda3 * (z_coef3 * w + a_coef3 * gz);
    let l_coef5 = lambda3 * (z_coef4 * w + a_coef4 * gz);
    let l_coef6 = lambda3 * (lambda1.conj() * l0.conj() * w * eps + re(eps * z0));

    Ok(SidebandCoefficients {
        delta,
        eps,
        lambda1,
        lambda2,
        lambda3,
        b_coef1,
        b_coef2,
        a_coef1,
        a_coef2,
        a_coef3,
        a_coef4,
        a_coef5: a5,
        a_coef6: a6,
        z_coef1,
        z_coef2,
        z_coef3,
        z_coef4,
        l_coef1,
        l_coef2,
        l_coef3,
        l_coef4,
        l_coef5,
        l_coef6,
    })
}

/// Coherence sideband at the probe frequency, `e^{−iδt}` component.
pub fn l_minus<T: Real>(c: &SidebandCoefficients<T>) -> Result<Complex<T>> {
    let one = re(T::one());
    let direct = (one - c.l_coef1.conj()) * (one - c.l_coef4);
    let cross = c.l_coef2.conj() * c.l_coef5;
    let den = direct - cross;
    check_pole("L- denominator", den, &[direct, cross], c.delta, T::one())?;
    Ok((c.l_coef6 * (one - c.l_coef1.conj()) + c.l_coef5 * c.l_coef3.conj()) / den)
}

/// Coherence sideband at the mirror frequency, `e^{+iδt}` component.
pub fn l_plus<T: Real>(c: &SidebandCoefficients<T>) -> Result<Complex<T>> {
    let one = re(T::one());
    let direct = (one - c.l_coef1) * (one - c.l_coef4.conj());
    let cross = c.l_coef2 * c.l_coef5.conj();
    let den = direct - cross;
    check_pole("L+ denominator", den, &[direct, cross], c.delta, T::one())?;
    Ok((c.l_coef2 * c.l_coef6.conj() + c.l_coef3 * (one - c.l_coef4.conj())) / den)
}

/// Full first-order response and output field at `delta` (model units).
///
/// With `model.eps = 0` the sidebands vanish and the per-unit-probe quantities
/// (`eps_out`, `l_out_minus`, `l_out_plus`) come from a unit reference probe.
pub fn output_field<T: Real>(branch: &SteadyBranch<T>, model: &Model<T>, delta: T) -> Result<SidebandResponse<T>> {
    let c = coefficients(branch, model, delta).map_err(|e| rescale_pole(e, model))?;
    let lm = l_minus(&c).map_err(|e| rescale_pole(e, model))?;
    let lp = l_plus(&c).map_err(|e| rescale_pole(e, model))?;
    let (lm_unit, lp_unit) = if model.eps != T::zero() {
        (lm / model.eps, lp / model.eps)
    } else {
        let cu = coefficients_with_eps(branch, model, delta, T::one())?;
        (l_minus(&cu).map_err(|e| rescale_pole(e, model))?, l_plus(&cu).map_err(|e| rescale_pole(e, model))?)
    };

    let a_plus = c.a_coef1 * lp + c.a_coef2 * lm.conj();
    let a_minus = c.a_coef3 * lm + c.a_coef4 * lp.conj();
    let a0 = branch.a0;
    let b_plus = c.b_coef1 * (a0.conj() * a_plus + a0 * a_minus.conj());
    let b_minus = c.b_coef2 * (a0.conj() * a_minus + a0 * a_plus.conj());
    let z_plus = c.z_coef1 * lp + c.z_coef2 * lm.conj() + c.lambda1 * branch.l0 * model.eps;
    let z_minus = c.z_coef3 * lm + c.z_coef4 * lp.conj() + c.lambda1.conj() * branch.l0.conj() * model.eps;

    let sq = model.gamma_q.sqrt();
    let root_scale = model.scale.sqrt();
    let l_out0 = (branch.l0 * sq - re(model.xi / sq)) * root_scale;
    let l_out_minus = (lm_unit * sq - re(T::one() / sq)) / root_scale;
    let l_out_plus = lp_unit * sq / root_scale;
    let eps_out = lm_unit * model.gamma_q;

    Ok(SidebandResponse {
        a_plus,
        a_minus,
        b_plus,
        b_minus,
        z_plus,
        z_minus,
        l_plus: lp,
        l_minus: lm,
        l_out0,
        l_out_minus,
        l_out_plus,
        eps_out,
        mu_p: eps_out.re,
        nu_p: eps_out.im,
    })
}

// l_minus / l_plus see only coefficients, so their pole detunings are in model units.
fn rescale_pole<T: Real>(e: Error, model: &Model<T>) -> Error {
    match e {
        Error::Pole { coefficient, delta } if coefficient.starts_with('L') => {
            Error::Pole { coefficient, delta: delta * model.scale.to_f64().unwrap_or(f64::NAN) }
        }
        other => other,
    }
}
