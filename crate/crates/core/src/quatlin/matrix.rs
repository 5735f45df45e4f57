use std::ops::{Index, IndexMut};

use num_complex::Complex;
use num_traits::{Float, Zero};

use super::Quaternion;
use crate::scalar::{Entry, Scalar};

/// Dense row-major matrix over reals, complex numbers or quaternions.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

pub type RealMatrix<T> = Matrix<T>;
pub type ComplexMatrix<T> = Matrix<Complex<T>>;
pub type QuatMatrix<T> = Matrix<Quaternion<T>>;

impl<E: Entry> Matrix<E> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![E::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = E::one();
        }
        m
    }

    /// Builds from row-major data. Panics when the length does not match.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<E>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length does not match shape");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<E>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_vec(r, c, rows.concat())
    }

    /// Column vector.
    pub fn column(entries: &[E]) -> Self {
        Self::from_vec(entries.len(), 1, entries.to_vec())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[E] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [E] {
        &mut self.data
    }

    pub fn row(&self, r: usize) -> &[E] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<E> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    /// Conjugate transpose `Aᴴ`.
    pub fn adjoint_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn map<F: Entry>(&self, f: impl Fn(E) -> F) -> Matrix<F> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&e| f(e)).collect(),
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o = *o + a * b;
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    pub fn scaled(&self, s: E::Real) -> Self {
        let s = E::from_real(s);
        self.map(|e| e * s)
    }

    pub fn frobenius_norm(&self) -> E::Real {
        self.data
            .iter()
            .map(|e| e.norm_sqr())
            .fold(E::Real::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn max_abs(&self) -> E::Real {
        self.data
            .iter()
            .map(|e| e.norm_sqr().sqrt())
            .fold(E::Real::zero(), |a, b| a.max(b))
    }

    pub fn trace(&self) -> E {
        assert!(self.is_square());
        (0..self.rows).fold(E::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|e| e.is_finite())
    }

    /// Largest `|A − Aᴴ|` entry relative to the Frobenius norm, or zero for a zero matrix.
    pub fn hermitian_defect(&self) -> E::Real {
        assert!(self.is_square());
        let scale = self.frobenius_norm();
        if scale == E::Real::zero() {
            return scale;
        }
        let mut worst = E::Real::zero();
        for r in 0..self.rows {
            for c in r..self.cols {
                let d = (self[(r, c)] - self[(c, r)].conj()).norm_sqr().sqrt();
                worst = worst.max(d);
            }
        }
        worst / scale
    }

    /// Outer product `a·bᴴ` of two column vectors.
    pub fn outer(a: &[E], b: &[E]) -> Self {
        Self::from_fn(a.len(), b.len(), |r, c| a[r] * b[c].conj())
    }
}

impl<T: Scalar> QuatMatrix<T> {
    /// Quaternion matrix–vector product `A·v`.
    pub fn mul_vec(&self, v: &[Quaternion<T>]) -> Vec<Quaternion<T>> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }
}

impl<E> Index<(usize, usize)> for Matrix<E> {
    type Output = E;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &E {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<E> IndexMut<(usize, usize)> for Matrix<E> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut E {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}
