//! Mean-field flow of the driven atom-cavity-vibration system in the frame of
//! the drive, in model units (time in 1/g).

use num_complex::Complex;

use crate::num::{im, lit, Real};
use crate::params::Model;

/// Mean-field state: cavity `a`, vibration `b`, coherence `σ₋` and inversion `σ_z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub sigma: Complex<T>,
    pub z: T,
}

impl<T: Real> State<T> {
    /// Atom in the ground state, fields empty.
    pub fn ground() -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        Self { a: zero, b: zero, sigma: zero, z: -T::one() }
    }

    /// `(Re a, Im a, Re b, Im b, Re σ₋, Im σ₋, σ_z)`.
    pub fn to_array(&self) -> [T; 7] {
        [self.a.re, self.a.im, self.b.re, self.b.im, self.sigma.re, self.sigma.im, self.z]
    }

    pub fn from_array(x: &[T; 7]) -> Self {
        Self { a: Complex::new(x[0], x[1]), b: Complex::new(x[2], x[3]), sigma: Complex::new(x[4], x[5]), z: x[6] }
    }

    pub fn norm(&self) -> T {
        self.to_array().iter().fold(T::zero(), |acc, v| acc + *v * *v).sqrt()
    }
}

/// Time derivative at scaled time `t` with probe detuning `delta` (both model units).
///
/// The probe amplitude is `model.eps`; with `eps = 0` the flow is autonomous.
pub fn drift<T: Real>(model: &Model<T>, s: &State<T>, t: T, delta: T) -> State<T> {
    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    let i = im(T::one());
    let m = model;

    let da = -(i * m.delta_c + m.gamma_a * half) * s.a - i * m.g * s.sigma + s.a * (s.b - s.b.conj()) * m.eta;
    let db = -(i * m.omega + m.gamma_b * half) * s.b - m.eta * s.a.norm_sqr();

    let (mut probe_sigma, mut probe_z) = (Complex::new(T::zero(), T::zero()), T::zero());
    if m.eps != T::zero() {
        let phase = Complex::from_polar(T::one(), -delta * t);
        probe_sigma = i * m.eps * s.z * phase;
        // 2iε(σ e^{iδt} − c.c.) = −4ε Im(σ e^{iδt})
        probe_z = -lit::<T>(4.0) * m.eps * (s.sigma * phase.conj()).im;
    }
    let dsigma = -(i * m.delta_a + m.gamma_q * half) * s.sigma + i * (s.a * m.g + m.xi) * s.z + probe_sigma;
    let dz =
        -m.gamma_q * (s.z + T::one()) - lit::<T>(4.0) * m.g * (s.a.conj() * s.sigma).im - two * two * m.xi * s.sigma.im
            + probe_z;
    State { a: da, b: db, sigma: dsigma, z: dz }
}

/// Row-major 7×7 Jacobian of the probe-free flow in the variables of [`State::to_array`].
pub fn jacobian<T: Real>(model: &Model<T>, s: &State<T>) -> [T; 49] {
    let m = model;
    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let [x1, x2, _x3, x4, x5, x6, z] = s.to_array();
    let dp = m.delta_c - two * m.eta * x4;
    let mut j = [T::zero(); 49];
    let mut set = |r: usize, c: usize, v: T| j[r * 7 + c] = v;

    set(0, 0, -m.gamma_a * half);
    set(0, 1, dp);
    set(0, 3, -two * m.eta * x2);
    set(0, 5, m.g);

    set(1, 0, -dp);
    set(1, 1, -m.gamma_a * half);
    set(1, 3, two * m.eta * x1);
    set(1, 4, -m.g);

    set(2, 0, -two * m.eta * x1);
    set(2, 1, -two * m.eta * x2);
    set(2, 2, -m.gamma_b * half);
    set(2, 3, m.omega);

    set(3, 2, -m.omega);
    set(3, 3, -m.gamma_b * half);

    set(4, 1, -m.g * z);
    set(4, 4, -m.gamma_q * half);
    set(4, 5, m.delta_a);
    set(4, 6, -m.g * x2);

    set(5, 0, m.g * z);
    set(5, 4, -m.delta_a);
    set(5, 5, -m.gamma_q * half);
    set(5, 6, m.g * x1 + m.xi);

    set(6, 0, -four * m.g * x6);
    set(6, 1, four * m.g * x5);
    set(6, 4, four * m.g * x2);
    set(6, 5, -four * m.g * x1 - four * m.xi);
    set(6, 6, -m.gamma_q);
    j
}
