//! Drive-only steady states: inversion, the photon-number cubic, branch
//! completion, linear stability and drive sweeps.
//!
//! All frequencies are model units (see [`Model`]); amplitudes are dimensionless.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{self, State};
use crate::num::{im, lit, re, Real};
use crate::params::{Model, ZeroOrderMode};

/// Iteration cap of the damped fixed point.
pub const MAX_ITERATIONS: usize = 1000;
/// Weight of the previous inversion in the damped update.
pub const DAMPING: f64 = 0.5;
/// Branches closer than this relative distance in `u` are merged.
pub const MERGE_TOL: f64 = 1e-6;
/// Half-width of the marginal band, relative to the trap frequency.
pub const MARGINAL_BAND: f64 = 1e-9;
/// Number of photon-number samples of the bracketing scan.
const SCAN_POINTS: usize = 2400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl Stability {
    pub fn as_str(&self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        }
    }
}

/// One zero-order solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyBranch<T> {
    pub a0: Complex<T>,
    pub b0: Complex<T>,
    pub l0: Complex<T>,
    pub z0: T,
    /// Photon number `|A₀|²`.
    pub u: T,
    pub stable: Stability,
    /// Largest real part of the linearised spectrum, model units.
    pub growth_rate: T,
    /// How `z0` was obtained. Unless it is [`ZeroOrderMode::Exact`] the inversion
    /// equation is not balanced and stability is judged with `σ_z` held at `z0`.
    pub mode: ZeroOrderMode,
}

impl<T: Real> SteadyBranch<T> {
    pub fn state(&self) -> State<T> {
        State { a: self.a0, b: self.b0, sigma: self.l0, z: self.z0 }
    }

    pub fn b0_sq(&self) -> T {
        self.b0.norm_sqr()
    }
}

/// Coefficients of `c3 u³ + c2 u² + c1 u + c0 = 0` in the photon number `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicCoefficients<T> {
    pub c3: T,
    pub c2: T,
    pub c1: T,
    pub c0: T,
}

impl<T: Real> CubicCoefficients<T> {
    pub fn eval(&self, u: T) -> T {
        ((self.c3 * u + self.c2) * u + self.c1) * u + self.c0
    }

    fn deriv(&self, u: T) -> T {
        (lit::<T>(3.0) * self.c3 * u + lit::<T>(2.0) * self.c2) * u + self.c1
    }

    /// `|p(u)|` divided by the largest monomial magnitude.
    pub fn relative_residual(&self, u: T) -> T {
        let terms = [self.c3 * u * u * u, self.c2 * u * u, self.c1 * u, self.c0];
        let scale = terms.iter().fold(T::zero(), |m, t| m.max(t.abs()));
        if scale == T::zero() {
            T::zero()
        } else {
            self.eval(u).abs() / scale
        }
    }

    /// Real non-negative roots, ascending.
    pub fn real_roots(&self) -> Vec<T> {
        let mut out = Vec::new();
        let (mut c3, mut c2, mut c1, mut c0) = (self.c3, self.c2, self.c1, self.c0);
        if c0 == T::zero() {
            out.push(T::zero());
            c0 = c1;
            c1 = c2;
            c2 = c3;
            c3 = T::zero();
        }
        for r in poly_roots(c3, c2, c1, c0) {
            let accept = r.im.abs() <= imag_tol::<T>() * (T::one() + r.re.abs()) && r.re >= T::zero();
            if accept {
                out.push(self.polish(r.re));
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
        out
    }

    fn polish(&self, mut u: T) -> T {
        for _ in 0..3 {
            let d = self.deriv(u);
            if d == T::zero() {
                break;
            }
            let next = u - self.eval(u) / d;
            if !next.is_finite() || next < T::zero() || self.eval(next).abs() >= self.eval(u).abs() {
                break;
            }
            u = next;
        }
        u
    }
}

fn imag_tol<T: Real>() -> T {
    if T::epsilon() < lit(1e-12) {
        lit(1e-8)
    } else {
        T::epsilon().sqrt()
    }
}

/// Roots of `c3 x³ + c2 x² + c1 x + c0`, dropping leading zeros.
fn poly_roots<T: Real>(c3: T, c2: T, c1: T, c0: T) -> Vec<Complex<T>> {
    roots_of(&[c3, c2, c1, c0])
}

fn roots_of<T: Real>(coeffs: &[T]) -> Vec<Complex<T>> {
    let Some(lead) = coeffs.iter().position(|c| *c != T::zero()) else {
        return Vec::new();
    };
    let c = &coeffs[lead..];
    let degree = c.len() - 1;
    if degree == 0 {
        return Vec::new();
    }
    let monic: Vec<T> = c[1..].iter().map(|x| *x / c[0]).collect();
    if monic.iter().any(|x| !x.is_finite()) {
        // leading coefficient negligible in this precision
        return roots_of(&c[1..]);
    }
    if degree == 1 {
        return vec![re(-monic[0])];
    }
    let mut m = vec![T::zero(); degree * degree];
    for (k, a) in monic.iter().enumerate() {
        m[k] = -*a;
    }
    for r in 1..degree {
        m[r * degree + r - 1] = T::one();
    }
    T::eigenvalues(degree, &m).unwrap_or_default()
}

/// Inversion of the closed-form ground-state expression at photon number `u`.
pub fn z0_of<T: Real>(model: &Model<T>, u: T) -> T {
    let n = inversion_scale(model);
    let eight = lit::<T>(8.0);
    -n / (n + eight * model.g * model.g * u + eight * model.xi * model.xi)
}

/// Inversion that balances the `σ_z` equation exactly for a given cavity amplitude.
pub fn z0_exact<T: Real>(model: &Model<T>, a0: Complex<T>) -> T {
    let n = inversion_scale(model);
    let w = a0 * model.g + model.xi;
    -n / (n + lit::<T>(8.0) * w.norm_sqr())
}

fn inversion_scale<T: Real>(m: &Model<T>) -> T {
    lit::<T>(4.0) * m.delta_a * m.delta_a + m.gamma_q * m.gamma_q
}

/// Coefficients of the photon-number cubic at inversion `z0`.
pub fn cubic_coefficients<T: Real>(model: &Model<T>, z0: T) -> CubicCoefficients<T> {
    let m = model;
    let two = lit::<T>(2.0);
    let half = lit::<T>(0.5);
    let eta2 = m.eta * m.eta;
    let d = m.gamma_b * m.gamma_b + lit::<T>(4.0) * m.omega * m.omega;
    let p = -two * m.delta_a * m.delta_c + m.gamma_a * m.gamma_q * half - two * m.g * m.g * z0;
    let q = m.delta_c * m.gamma_q + m.gamma_a * m.delta_a;
    let r = lit::<T>(16.0) * eta2 * m.omega * m.delta_a;
    let s = -lit::<T>(8.0) * eta2 * m.omega * m.gamma_q;
    CubicCoefficients {
        c3: r * r + s * s,
        c2: two * d * (p * r + q * s),
        c1: d * d * (p * p + q * q),
        c0: -lit::<T>(4.0) * m.xi * m.xi * m.g * m.g * z0 * z0 * d * d,
    }
}

/// `B₀` from the vibration equation.
pub fn b0_of<T: Real>(model: &Model<T>, u: T) -> Complex<T> {
    re(-lit::<T>(2.0) * model.eta * u) / Complex::new(model.gamma_b, lit::<T>(2.0) * model.omega)
}

/// `M(u) = K(u)·(2Δ_a − iγ_q)` with `K` the dressed cavity factor.
fn m_factor<T: Real>(model: &Model<T>, b0: Complex<T>) -> Complex<T> {
    let k = cavity_factor(model, b0);
    k * Complex::new(lit::<T>(2.0) * model.delta_a, -model.gamma_q)
}

fn cavity_factor<T: Real>(model: &Model<T>, b0: Complex<T>) -> Complex<T> {
    Complex::new(-model.delta_c, model.gamma_a * lit(0.5)) - im(model.eta) * (b0 - b0.conj())
}

/// Completes `(A₀, B₀, L₀)` from a photon number and an inversion.
///
/// Solves `A₀·K = g·L₀`, `L₀·(2Δ_a − iγ_q) = 2Z₀(gA₀ + ξ)` for real positive `ξ`.
pub fn complete<T: Real>(model: &Model<T>, u: T, z0: T) -> Result<(Complex<T>, Complex<T>, Complex<T>)> {
    let b0 = b0_of(model, u);
    let mm = m_factor(model, b0);
    let two = lit::<T>(2.0);
    let det = mm - re(two * model.g * model.g * z0);
    let scale = mm.norm().max((two * model.g * model.g * z0).abs());
    if det.norm() <= lit::<T>(1e-14).max(T::epsilon()) * scale || det.norm() == T::zero() {
        return Err(Error::Degenerate(format!("zero-order linear system singular at u = {u}, z0 = {z0}")));
    }
    let a0 = re(two * model.g * model.xi * z0) / det;
    let l0 = (a0 * model.g + model.xi) * (two * z0) / Complex::new(two * model.delta_a, -model.gamma_q);
    Ok((a0, b0, l0))
}

/// All steady branches, ascending in `u`, with stability attached.
pub fn solve_branches<T: Real>(model: &Model<T>, mode: ZeroOrderMode) -> Result<Vec<SteadyBranch<T>>> {
    let candidates: Vec<(T, T)> = match mode {
        ZeroOrderMode::Fixed(z) => {
            let z0 = lit::<T>(z);
            if !(z0 >= -T::one() && z0 < T::zero()) {
                return Err(Error::InvalidParameter { name: "z0", reason: format!("must lie in [-1, 0), got {z}") });
            }
            cubic_coefficients(model, z0).real_roots().into_iter().map(|u| (u, z0)).collect()
        }
        _ if model.xi == T::zero() => vec![(T::zero(), -T::one())],
        _ => self_consistent_candidates(model, mode)?,
    };

    let mut branches = Vec::with_capacity(candidates.len());
    for (u, z0) in merge(candidates) {
        let (a0, b0, l0) = complete(model, u, z0)?;
        let mut branch = SteadyBranch { a0, b0, l0, z0, u, stable: Stability::Marginal, growth_rate: T::zero(), mode };
        let (stable, growth) = stability_with_growth(&branch, model)?;
        branch.stable = stable;
        branch.growth_rate = growth;
        branches.push(branch);
    }
    Ok(branches)
}

/// Damped fixed point per cubic root, then a bracketing scan of the scalar
/// residual to pick up branches the iteration slides off.
fn self_consistent_candidates<T: Real>(model: &Model<T>, mode: ZeroOrderMode) -> Result<Vec<(T, T)>> {
    let tol = lit::<T>(1e-13).max(lit::<T>(8.0) * T::epsilon());
    let damping = lit::<T>(DAMPING);
    let mut found = Vec::new();
    let mut last_residual = T::zero();

    for seed in cubic_coefficients(model, -T::one()).real_roots() {
        let mut z = -T::one();
        let mut u = seed;
        let mut converged = false;
        for _ in 0..MAX_ITERATIONS {
            let roots = cubic_coefficients(model, z).real_roots();
            let Some(nearest) =
                roots.iter().copied().min_by(|a, b| (*a - u).abs().partial_cmp(&(*b - u).abs()).expect("finite roots"))
            else {
                break;
            };
            u = nearest;
            let target = match mode {
                ZeroOrderMode::Exact => {
                    let Ok((a0, _, _)) = complete(model, u, z) else { break };
                    z0_exact(model, a0)
                }
                _ => z0_of(model, u),
            };
            last_residual = (target - z).abs();
            if last_residual <= tol {
                z = target;
                converged = true;
                break;
            }
            z = damping * z + (T::one() - damping) * target;
        }
        if converged {
            if let Some(u) = cubic_coefficients(model, z)
                .real_roots()
                .into_iter()
                .min_by(|a, b| (*a - u).abs().partial_cmp(&(*b - u).abs()).expect("finite roots"))
            {
                found.push((u, z));
            }
        }
    }

    found.extend(scan_candidates(model, mode));
    if found.is_empty() {
        return Err(Error::Convergence {
            iterations: MAX_ITERATIONS,
            residual: last_residual.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(found)
}

/// Inversion candidates consistent with photon number `u` in the given mode.
fn inversions_at<T: Real>(model: &Model<T>, u: T) -> [Option<T>; 2] {
    // In exact mode, eliminating A₀ between the cubic and the σ_z balance
    // leaves N Z² + N Z + 2u|M|²/g² = 0.
    let n = inversion_scale(model);
    let mm = m_factor(model, b0_of(model, u));
    let disc = T::one() - lit::<T>(8.0) * u * mm.norm_sqr() / (model.g * model.g * n);
    if disc < T::zero() {
        return [None, None];
    }
    let half = lit::<T>(0.5);
    let root = disc.sqrt();
    [Some(-half - half * root), Some(-half + half * root)]
}

fn scan_residual<T: Real>(model: &Model<T>, u: T, z: T) -> T {
    cubic_coefficients(model, z).eval(u)
}

fn scan_candidates<T: Real>(model: &Model<T>, mode: ZeroOrderMode) -> Vec<(T, T)> {
    let u_max = match mode {
        // |σ₋|² ≤ (1 − σ_z²)/4 at an exact fixed point of the flow and |K| ≥ γ_a/2.
        ZeroOrderMode::Exact => lit::<T>(1.01) * model.g * model.g / (lit::<T>(2.0) * model.gamma_a * model.gamma_a),
        _ => cauchy_bound(model),
    };
    if !(u_max.is_finite() && u_max > T::zero()) {
        return Vec::new();
    }
    let lo = u_max * lit(1e-12);
    let ratio = (u_max / lo).ln() / lit::<T>((SCAN_POINTS - 1) as f64);
    let mut grid = Vec::with_capacity(SCAN_POINTS + 1);
    if mode != ZeroOrderMode::Exact {
        // the exact elimination divides by Z₀ and admits a spurious Z₀ = 0 at u = 0
        grid.push(T::zero());
    }
    for k in 0..SCAN_POINTS {
        grid.push(lo * (ratio * lit::<T>(k as f64)).exp());
    }

    let mut out = Vec::new();
    let sides: usize = if mode == ZeroOrderMode::Exact { 2 } else { 1 };
    for side in 0..sides {
        let z_at = |u: T| -> Option<T> {
            match mode {
                ZeroOrderMode::Exact => inversions_at(model, u)[side],
                _ => Some(z0_of(model, u)),
            }
        };
        let f = |u: T| z_at(u).map(|z| scan_residual(model, u, z));
        let mut prev: Option<(T, T)> = None;
        for &u in &grid {
            let cur = f(u).filter(|v| v.is_finite()).map(|v| (u, v));
            if let (Some((u0, f0)), Some((u1, f1))) = (prev, cur) {
                if f0 == T::zero() {
                    out.extend(z_at(u0).map(|z| (u0, z)));
                } else if (f0 < T::zero()) != (f1 < T::zero()) && f1 != T::zero() {
                    if let Some(u) = bisect(&f, u0, u1, f0) {
                        out.extend(z_at(u).map(|z| (u, z)));
                    }
                }
            }
            prev = cur;
        }
    }
    out
}

fn bisect<T: Real>(f: &impl Fn(T) -> Option<T>, mut a: T, mut b: T, mut fa: T) -> Option<T> {
    for _ in 0..200 {
        let mid = (a + b) * lit(0.5);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid)?;
        if fm == T::zero() {
            return Some(mid);
        }
        if (fm < T::zero()) == (fa < T::zero()) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Some((a + b) * lit(0.5))
}

/// Upper bound on positive cubic roots over inversions in `[-1, 0]`.
fn cauchy_bound<T: Real>(model: &Model<T>) -> T {
    let mut bound = T::zero();
    for k in 0..=64 {
        let z = -T::one() + lit::<T>(k as f64 / 64.0) * lit(0.999);
        let c = cubic_coefficients(model, z);
        let b = if c.c3 > T::zero() {
            T::one() + (c.c2.abs().max(c.c1.abs()).max(c.c0.abs())) / c.c3
        } else if c.c2 != T::zero() {
            T::one() + c.c1.abs().max(c.c0.abs()) / c.c2.abs()
        } else if c.c1 != T::zero() {
            c.c0.abs() / c.c1.abs()
        } else {
            T::zero()
        };
        bound = bound.max(b);
    }
    bound * lit(1.5)
}

fn merge<T: Real>(mut c: Vec<(T, T)>) -> Vec<(T, T)> {
    c.retain(|(u, z)| u.is_finite() && z.is_finite());
    c.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
    let mut out: Vec<(T, T)> = Vec::with_capacity(c.len());
    for (u, z) in c {
        match out.last() {
            Some(&(pu, _)) if (u - pu).abs() <= lit::<T>(MERGE_TOL) * u.max(pu) => {}
            _ => out.push((u, z)),
        }
    }
    out
}

/// Linear stability of a branch under the probe-free flow.
pub fn classify_stability<T: Real>(branch: &SteadyBranch<T>, model: &Model<T>) -> Result<Stability> {
    stability_with_growth(branch, model).map(|(s, _)| s)
}

/// Eigenvalues of the linearised flow at the branch.
///
/// Uses the full 7×7 Jacobian for exact branches, and the 6×6 block with `σ_z`
/// held at `z0` otherwise.
pub fn linear_spectrum<T: Real>(branch: &SteadyBranch<T>, model: &Model<T>) -> Result<Vec<Complex<T>>> {
    let model = model.with_eps(T::zero());
    let state = branch.state();
    let n = if branch.mode == ZeroOrderMode::Exact { 7 } else { 6 };
    let f = flow::drift(&model, &state, T::zero(), T::zero()).to_array();
    let residual = f[..n].iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let tol = lit::<T>(1e-8).max(lit::<T>(1e3) * T::epsilon()) * (T::one() + model.xi);
    if !(residual <= tol) {
        return Err(Error::NotSteady { residual: residual.to_f64().unwrap_or(f64::NAN) });
    }
    let full = flow::jacobian(&model, &state);
    let entries: Vec<T> = (0..n).flat_map(|r| (0..n).map(move |c| (r, c))).map(|(r, c)| full[r * 7 + c]).collect();
    T::eigenvalues(n, &entries).ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))
}

fn stability_with_growth<T: Real>(branch: &SteadyBranch<T>, model: &Model<T>) -> Result<(Stability, T)> {
    let ev = linear_spectrum(branch, model)?;
    let growth = ev.iter().fold(T::neg_infinity(), |m, z| m.max(z.re));
    let band = lit::<T>(MARGINAL_BAND) * model.omega;
    let stable = if growth > band {
        Stability::Unstable
    } else if growth < -band {
        Stability::Stable
    } else {
        Stability::Marginal
    };
    Ok((stable, growth))
}

/// Lowest-`u` stable branch, or the lowest branch if none is stable.
pub fn default_branch<T: Real>(branches: &[SteadyBranch<T>]) -> Option<usize> {
    branches.iter().position(|b| b.stable == Stability::Stable).or(if branches.is_empty() { None } else { Some(0) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow<T> {
    /// Drive strength, model units.
    pub xi: T,
    pub branches: Vec<SteadyBranch<T>>,
}

/// Branches at every drive strength of an ascending grid, evaluated in parallel.
pub fn sweep_xi<T: Real>(model: &Model<T>, xi_grid: &[T], mode: ZeroOrderMode) -> Result<Vec<SweepRow<T>>> {
    if xi_grid.is_empty() {
        return Err(Error::InvalidParameter { name: "xi_grid", reason: "empty".into() });
    }
    if xi_grid.windows(2).any(|w| !(w[1] > w[0])) || xi_grid.iter().any(|x| !(x.is_finite() && *x >= T::zero())) {
        return Err(Error::InvalidParameter {
            name: "xi_grid",
            reason: "must be finite, >= 0 and strictly ascending".into(),
        });
    }
    xi_grid
        .par_iter()
        .map(|&xi| {
            let m = model.with_xi(xi);
            solve_branches(&m, mode).map(|branches| SweepRow { xi, branches })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn bistable() -> Model<f64> {
        Model {
            scale: 1e6,
            g: 1.0,
            omega: 0.2,
            delta_a: 10.0,
            delta_c: 0.5,
            gamma_a: 0.06,
            gamma_b: 0.05,
            gamma_q: 0.05,
            xi: 0.69,
            eps: 0.0,
            eta: 0.102_69,
        }
    }

    #[test]
    fn undriven_atom_sits_in_ground_state() {
        let m = bistable().with_xi(0.0);
        assert_eq!(z0_of(&m, 0.0), -1.0);
        let b = solve_branches(&m, ZeroOrderMode::SelfConsistent).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].u, 0.0);
        assert_eq!(b[0].a0, Complex::new(0.0, 0.0));
        assert_eq!(b[0].stable, Stability::Stable);
    }

    #[test]
    fn closed_form_inversion_value() {
        let m = Model { delta_a: 10.0, gamma_q: 0.05, xi: 2.0, ..bistable() };
        assert!((z0_of(&m, 0.0) + 400.0025 / 432.0025).abs() < 1e-15);
    }

    #[test]
    fn cubic_degenerates_without_motion() {
        let c = cubic_coefficients(&bistable().with_eta(0.0), -0.99);
        assert_eq!((c.c3, c.c2), (0.0, 0.0));
        assert_eq!(c.real_roots().len(), 1);
    }

    #[test]
    fn roots_satisfy_cubic() {
        let m = bistable().with_xi(0.8);
        let c = cubic_coefficients(&m, -0.99);
        let roots = c.real_roots();
        assert_eq!(roots.len(), 3);
        for u in roots {
            assert!(c.relative_residual(u) < 1e-9);
            let (a0, _, _) = complete(&m, u, -0.99).unwrap();
            assert!((a0.norm_sqr() - u).abs() <= 1e-8 * u.max(1.0));
        }
    }

    #[test]
    fn exact_branches_bracket_an_unstable_middle() {
        let b = solve_branches(&bistable(), ZeroOrderMode::Exact).unwrap();
        let s: Vec<_> = b.iter().map(|b| b.stable).collect();
        assert_eq!(s, [Stability::Stable, Stability::Unstable, Stability::Stable], "{b:?}");
        for br in &b {
            assert!((br.z0 - z0_exact(&bistable(), br.a0)).abs() < 1e-10);
        }
    }

    #[test]
    fn self_consistent_fixed_point() {
        let m = bistable().with_xi(1.5);
        for br in solve_branches(&m, ZeroOrderMode::SelfConsistent).unwrap() {
            assert!((br.z0 - z0_of(&m, br.u)).abs() <= 1e-10);
            assert!(cubic_coefficients(&m, br.z0).relative_residual(br.u) < 1e-9);
        }
    }

    #[test]
    fn negative_cavity_damping_is_unstable() {
        let m = Model { gamma_a: -0.06, ..bistable().with_xi(0.0) };
        let b = solve_branches(&m, ZeroOrderMode::SelfConsistent).unwrap();
        assert_eq!(b[0].stable, Stability::Unstable);
    }

    #[test]
    fn off_branch_state_is_rejected() {
        let m = bistable();
        let mut b = solve_branches(&m, ZeroOrderMode::Exact).unwrap()[0];
        b.a0 *= 1.01;
        assert!(matches!(classify_stability(&b, &m), Err(Error::NotSteady { .. })));
    }

    #[test]
    fn sweep_rejects_descending_grid() {
        assert!(sweep_xi(&bistable(), &[1.0, 0.5], ZeroOrderMode::SelfConsistent).is_err());
    }
}
