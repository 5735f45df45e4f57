use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::{Entry, Scalar};

/// Quaternion `w + x·i + y·j + z·k` with `i² = j² = k² = ijk = −1`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Quaternion<T> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Quaternion<T> {
    #[inline]
    pub const fn new(w: T, x: T, y: T, z: T) -> Self {
        Self { w, x, y, z }
    }

    #[inline]
    pub fn real(w: T) -> Self {
        Self::new(w, T::zero(), T::zero(), T::zero())
    }

    pub fn i() -> Self {
        Self::new(T::zero(), T::one(), T::zero(), T::zero())
    }

    pub fn j() -> Self {
        Self::new(T::zero(), T::zero(), T::one(), T::zero())
    }

    pub fn k() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::one())
    }

    /// Embeds a 3D point as `a + b·i + c·j + 0·k`.
    #[inline]
    pub fn from_point(p: [T; 3]) -> Self {
        Self::new(p[0], p[1], p[2], T::zero())
    }

    /// Real, `i` and `j` parts; the `k` part is dropped.
    #[inline]
    pub fn to_point(self) -> [T; 3] {
        [self.w, self.x, self.y]
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    #[inline]
    pub fn norm_sqr(self) -> T {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    #[inline]
    pub fn norm(self) -> T {
        self.norm_sqr().sqrt()
    }

    #[inline]
    pub fn scale(self, s: T) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// Unit quaternion in the same direction, `None` when the norm is below `tiny`.
    pub fn normalized(self, tiny: T) -> Option<Self> {
        let n = self.norm();
        if n < tiny || !n.is_finite() {
            None
        } else {
            Some(self.scale(n.recip()))
        }
    }

    #[inline]
    pub fn inverse(self) -> Self {
        self.conj().scale(self.norm_sqr().recip())
    }

    /// Euclidean inner product of the coefficient 4-vectors, `Re(conj(self)·other)`.
    #[inline]
    pub fn dot(self, other: Self) -> T {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    /// Symplectic split `q = a + b·j` with `a = w + x·i`, `b = y + z·i`.
    #[inline]
    pub fn to_complex_pair(self) -> (Complex<T>, Complex<T>) {
        (Complex::new(self.w, self.x), Complex::new(self.y, self.z))
    }

    #[inline]
    pub fn from_complex_pair(a: Complex<T>, b: Complex<T>) -> Self {
        Self::new(a.re, a.im, b.re, b.im)
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Hamilton product.
#[inline]
pub fn qmul<T: Scalar>(a: Quaternion<T>, b: Quaternion<T>) -> Quaternion<T> {
    Quaternion::new(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )
}

impl<T: Scalar> Entry for Quaternion<T> {
    type Real = T;

    #[inline]
    fn conj(self) -> Self {
        Quaternion::conj(self)
    }

    #[inline]
    fn norm_sqr(self) -> T {
        Quaternion::norm_sqr(self)
    }

    #[inline]
    fn from_real(r: T) -> Self {
        Self::real(r)
    }

    #[inline]
    fn is_finite(self) -> bool {
        Quaternion::is_finite(self)
    }
}

impl<T: Scalar> Add for Quaternion<T> {
    type Output = Self;

    #[inline]
    fn add(self, rhs: Self) -> Self {
        Self::new(self.w + rhs.w, self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl<T: Scalar> Sub for Quaternion<T> {
    type Output = Self;

    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.w - rhs.w, self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl<T: Scalar> Neg for Quaternion<T> {
    type Output = Self;

    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl<T: Scalar> Mul for Quaternion<T> {
    type Output = Self;

    #[inline]
    fn mul(self, rhs: Self) -> Self {
        qmul(self, rhs)
    }
}

impl<T: Scalar> AddAssign for Quaternion<T> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<T: Scalar> SubAssign for Quaternion<T> {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<T: Scalar> MulAssign for Quaternion<T> {
    #[inline]
    fn mul_assign(&mut self, rhs: Self) {
        *self = qmul(*self, rhs);
    }
}

impl<T: Scalar> Zero for Quaternion<T> {
    fn zero() -> Self {
        Self::real(T::zero())
    }

    fn is_zero(&self) -> bool {
        self.w.is_zero() && self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }
}

impl<T: Scalar> One for Quaternion<T> {
    fn one() -> Self {
        Self::real(T::one())
    }
}

impl<T: Scalar> Sum for Quaternion<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, q| acc + q)
    }
}

impl<T: Scalar> fmt::Display for Quaternion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.w, self.x, self.y, self.z)
    }
}
