//! Scalar abstractions shared by the linear algebra and the estimators.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, One, Zero};

/// Floating point type the crate computes in: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Lossy for `f32`, which is the point.
    fn lit(x: f64) -> Self;

    fn to_f64_lossy(self) -> f64;
}

impl Scalar for f32 {
    #[inline]
    fn lit(x: f64) -> Self {
        x as f32
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    #[inline]
    fn lit(x: f64) -> Self {
        x
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self
    }
}

/// Matrix entry types: reals, complex numbers and quaternions.
pub trait Entry:
    Copy
    + Zero
    + One
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + PartialEq
    + Debug
    + Send
    + Sync
    + 'static
{
    type Real: Scalar;

    fn conj(self) -> Self;

    /// `|z|²`.
    fn norm_sqr(self) -> Self::Real;

    fn from_real(r: Self::Real) -> Self;

    fn is_finite(self) -> bool;
}

impl<T: Scalar> Entry for T {
    type Real = T;

    #[inline]
    fn conj(self) -> Self {
        self
    }

    #[inline]
    fn norm_sqr(self) -> T {
        self * self
    }

    #[inline]
    fn from_real(r: T) -> Self {
        r
    }

    #[inline]
    fn is_finite(self) -> bool {
        Float::is_finite(self)
    }
}

impl<T: Scalar> Entry for Complex<T> {
    type Real = T;

    #[inline]
    fn conj(self) -> Self {
        Complex::conj(&self)
    }

    #[inline]
    fn norm_sqr(self) -> T {
        self.re * self.re + self.im * self.im
    }

    #[inline]
    fn from_real(r: T) -> Self {
        Complex::new(r, T::zero())
    }

    #[inline]
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Commutative field entries for Hermitian eigensolvers: the reals and the complex numbers.
pub trait Field: Entry + NumAssign + AddAssign + SubAssign + MulAssign + DivAssign {
    fn re(self) -> Self::Real;

    fn im(self) -> Self::Real;

    #[inline]
    fn modulus(self) -> Self::Real {
        self.re().hypot(self.im())
    }

    #[inline]
    fn scale(self, r: Self::Real) -> Self {
        self * Self::from_real(r)
    }

    /// `z / |z|`, or one for `z = 0`.
    #[inline]
    fn phase(self) -> Self {
        let m = self.modulus();
        if m == Self::Real::zero() {
            Self::one()
        } else {
            self.scale(m.recip())
        }
    }
}

impl<T: Scalar> Field for T {
    #[inline]
    fn re(self) -> T {
        self
    }

    #[inline]
    fn im(self) -> T {
        T::zero()
    }

    #[inline]
    fn modulus(self) -> T {
        self.abs()
    }

    #[inline]
    fn scale(self, r: T) -> Self {
        self * r
    }
}

impl<T: Scalar> Field for Complex<T> {
    #[inline]
    fn re(self) -> T {
        self.re
    }

    #[inline]
    fn im(self) -> T {
        self.im
    }

    #[inline]
    fn scale(self, r: T) -> Self {
        Complex::new(self.re * r, self.im * r)
    }
}
