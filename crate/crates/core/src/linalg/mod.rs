//! Linear-algebra building blocks shared by the solvers.
//!
//! Everything here works on plain slices. Operators are applied through the
//! [`SymmetricOperator`] trait so the eigensolvers stay matrix free.

mod banded;
mod dense;
mod lanczos;
mod sparse;

pub use banded::BandedSymmetric;
pub use dense::{dense_eigenpair, dense_eigenvalues, dense_lowest, operator_to_dense};
pub use lanczos::{lanczos_lowest, LanczosOptions};
pub use sparse::{Csr, KronSum, KronTerm};

use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use num_complex::Complex64;

/// Scalar field of a state vector: real for static problems, complex for
/// time propagation.
pub trait Scalar:
    Copy
    + Default
    + PartialEq
    + core::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
    + AddAssign
    + SubAssign
    + Send
    + Sync
    + 'static
{
    fn zero() -> Self {
        Self::default()
    }
    fn from_real(x: f64) -> Self;
    fn norm_sqr(self) -> f64;
    fn conj(self) -> Self;
    fn times(self, other: Self) -> Self;
    fn real(self) -> f64;
    fn imag(self) -> f64;
}

impl Scalar for f64 {
    #[inline]
    fn from_real(x: f64) -> Self {
        x
    }
    #[inline]
    fn norm_sqr(self) -> f64 {
        self * self
    }
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn times(self, other: Self) -> Self {
        self * other
    }
    #[inline]
    fn real(self) -> f64 {
        self
    }
    #[inline]
    fn imag(self) -> f64 {
        0.0
    }
}

impl Scalar for Complex64 {
    #[inline]
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    #[inline]
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    #[inline]
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    #[inline]
    fn times(self, other: Self) -> Self {
        self * other
    }
    #[inline]
    fn real(self) -> f64 {
        self.re
    }
    #[inline]
    fn imag(self) -> f64 {
        self.im
    }
}

/// A real symmetric linear operator applied matrix free.
pub trait SymmetricOperator {
    fn dim(&self) -> usize;
    /// `y <- A x`; `y` is overwritten.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl<T: SymmetricOperator + ?Sized> SymmetricOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (**self).apply(x, y)
    }
}

/// Lowest eigenpair of a symmetric operator together with convergence data.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: alloc::vec::Vec<f64>,
    /// `||A v - value v||` of the returned normalized vector.
    pub residual: f64,
    pub iterations: usize,
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// `<a|b>` with the first argument conjugated.
pub fn inner<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        acc += x.conj().times(*y);
    }
    acc
}

pub fn norm_sqr<T: Scalar>(a: &[T]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Normalizes in place and returns the previous norm.
pub fn normalize(a: &mut [f64]) -> f64 {
    let n = norm(a);
    if n > 0.0 {
        a.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Fixes the sign of a real eigenvector so the component of largest
/// magnitude is positive.
pub fn fix_sign(v: &mut [f64]) {
    let mut best = 0.0_f64;
    let mut sign = 1.0;
    for &x in v.iter() {
        if libm::fabs(x) > best + 1e-14 * best {
            best = libm::fabs(x);
            sign = if x < 0.0 { -1.0 } else { 1.0 };
        }
    }
    if sign < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Residual norm `||A v - e v||` for a normalized `v`.
pub fn residual_norm<A: SymmetricOperator + ?Sized>(op: &A, v: &[f64], e: f64) -> f64 {
    let mut y = alloc::vec![0.0; v.len()];
    op.apply(v, &mut y);
    let mut r = 0.0;
    for (yi, vi) in y.iter().zip(v) {
        let d = yi - e * vi;
        r += d * d;
    }
    libm::sqrt(r)
}

/// Dimension below which ground states are computed by dense diagonalization.
pub const DENSE_LIMIT: usize = 600;

/// Lowest eigenpair: dense below [`DENSE_LIMIT`], Lanczos above.
pub fn lowest_eigenpair<A: SymmetricOperator + ?Sized>(
    op: &A,
    opts: &LanczosOptions,
) -> crate::Result<Eigenpair> {
    if op.dim() <= DENSE_LIMIT {
        Ok(dense_lowest(op))
    } else {
        lanczos_lowest(op, opts)
    }
}
