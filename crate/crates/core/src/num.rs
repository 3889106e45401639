//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use serde::{de::DeserializeOwned, Serialize};

/// Floating point scalar the simulation is generic over, implemented for f32 and f64.
///
/// The dense eigenvalue solve is routed through the trait so that generic code
/// never has to name both `num_traits::Float` and `nalgebra::RealField`, whose
/// method sets overlap.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Eigenvalues of the `n`×`n` matrix stored row-major in `entries`.
    ///
    /// Returns `None` if the Schur iteration fails to converge.
    fn eigenvalues(n: usize, entries: &[Self]) -> Option<Vec<Complex<Self>>>;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn eigenvalues(n: usize, entries: &[Self]) -> Option<Vec<Complex<Self>>> {
                assert_eq!(entries.len(), n * n, "matrix must be {n}x{n}");
                let m = nalgebra::DMatrix::<$t>::from_row_slice(n, n, entries);
                let schur = nalgebra::linalg::Schur::try_new(m, <$t>::EPSILON, 10_000)?;
                let ev = schur.complex_eigenvalues();
                Some(ev.iter().map(|z| Complex::new(z.re, z.im)).collect())
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Complex number from its real part.
#[inline]
pub fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

/// Purely imaginary number.
#[inline]
pub fn im<T: Real>(x: T) -> Complex<T> {
    Complex::new(T::zero(), x)
}

/// Relative difference `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn rel_diff<T: Real>(a: Complex<T>, b: Complex<T>) -> T {
    let scale = a.norm().max(b.norm());
    if scale == T::zero() {
        T::zero()
    } else {
        (a - b).norm() / scale
    }
}

/// Same as [`rel_diff`] for real numbers.
pub fn rel_diff_real<T: Real>(a: T, b: T) -> T {
    rel_diff(re(a), re(b))
}
