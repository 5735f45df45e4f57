use num_complex::Complex;

use super::matrix::{ComplexMatrix, QuatMatrix};
use super::Quaternion;
use crate::scalar::Scalar;

/// Complex adjoint `χ(Q) = [[A, B], [−conj(B), conj(A)]]` of `Q = A + B·j`.
///
/// `χ` is a ring homomorphism that commutes with the conjugate transpose, so the
/// spectrum of a Hermitian quaternion matrix can be read off its adjoint, with
/// every eigenvalue appearing twice.
pub fn to_adjoint<T: Scalar>(q: &QuatMatrix<T>) -> ComplexMatrix<T> {
    let (m, n) = q.shape();
    let mut out = ComplexMatrix::zeros(2 * m, 2 * n);
    for r in 0..m {
        for c in 0..n {
            let (a, b) = q[(r, c)].to_complex_pair();
            out[(r, c)] = a;
            out[(r, n + c)] = b;
            out[(m + r, c)] = -b.conj();
            out[(m + r, n + c)] = a.conj();
        }
    }
    out
}

/// Inverse of [`to_adjoint`], reading the top block row. Does not check that the
/// input actually has adjoint structure.
pub fn from_adjoint<T: Scalar>(c: &ComplexMatrix<T>) -> QuatMatrix<T> {
    let (m, n) = (c.rows() / 2, c.cols() / 2);
    QuatMatrix::from_fn(m, n, |r, k| {
        Quaternion::from_complex_pair(c[(r, k)], c[(r, n + k)])
    })
}

/// Quaternion column `u` from an adjoint eigenvector `[top; bottom]`, which has the
/// form `[a; −conj(b)]` for `u = a + b·j`.
pub fn quat_vector_from_adjoint<T: Scalar>(y: &[Complex<T>]) -> Vec<Quaternion<T>> {
    let m = y.len() / 2;
    (0..m)
        .map(|i| Quaternion::from_complex_pair(y[i], -y[m + i].conj()))
        .collect()
}

/// First adjoint column of a quaternion vector, `[a; −conj(b)]`.
pub fn adjoint_vector<T: Scalar>(u: &[Quaternion<T>]) -> Vec<Complex<T>> {
    let m = u.len();
    let mut y = vec![Complex::new(T::zero(), T::zero()); 2 * m];
    for (i, q) in u.iter().enumerate() {
        let (a, b) = q.to_complex_pair();
        y[i] = a;
        y[m + i] = -b.conj();
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quatlin::matrix::Matrix;

    type Q = Quaternion<f64>;
    type C = Complex<f64>;

    #[test]
    fn identity_embeds_to_identity() {
        let q = QuatMatrix::from_vec(1, 1, vec![Q::real(1.0)]);
        assert_eq!(to_adjoint(&q), Matrix::<C>::identity(2));
    }

    #[test]
    fn j_embeds_to_symplectic_unit() {
        let q = QuatMatrix::from_vec(1, 1, vec![Q::j()]);
        let expected = Matrix::from_rows(&[
            vec![C::new(0.0, 0.0), C::new(1.0, 0.0)],
            vec![C::new(-1.0, 0.0), C::new(0.0, 0.0)],
        ]);
        assert_eq!(to_adjoint(&q), expected);
    }

    #[test]
    fn roundtrip() {
        let q = QuatMatrix::from_fn(2, 3, |r, c| {
            Q::new(r as f64, c as f64, -(r as f64) * 0.5, 1.0 + c as f64)
        });
        assert_eq!(from_adjoint(&to_adjoint(&q)), q);
        let u = q.row(1).to_vec();
        assert_eq!(quat_vector_from_adjoint(&adjoint_vector(&u)), u);
    }

    #[test]
    fn vector_columns_are_eigvecs_of_scalar_multiple() {
        // χ(λ·u) = χ(u)·λ for real λ; the first column maps back to u.
        let u = vec![Q::new(1.0, 2.0, 3.0, 4.0), Q::new(-1.0, 0.5, 0.0, 2.0)];
        let col = QuatMatrix::column(&u);
        let chi = to_adjoint(&col);
        let y = adjoint_vector(&u);
        for (r, yr) in y.iter().enumerate() {
            assert_eq!(chi[(r, 0)], *yr);
        }
    }
}
