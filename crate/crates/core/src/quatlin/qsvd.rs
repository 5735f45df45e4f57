use num_complex::Complex;

use super::adjoint::{quat_vector_from_adjoint, to_adjoint};
use super::eigen::{check_hermitian, hermitian_eig, EigenError, Tridiagonal};
use super::matrix::{ComplexMatrix, QuatMatrix};
use super::{Quaternion, Tolerances};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QsvdMethod {
    /// Eigenvalues of the tridiagonalized adjoint plus one eigenvector by inverse iteration.
    #[default]
    Dominant,
    /// Full eigendecomposition of the adjoint with [`Tolerances::eigen_method`].
    Full,
}

/// Dominant singular triple of a quaternion matrix.
#[derive(Debug, Clone)]
pub struct QsvdResult<T> {
    /// Largest singular value.
    pub lambda1: T,
    /// Unit left singular vector for `lambda1`.
    pub u1: Vec<Quaternion<T>>,
    /// All singular values, descending.
    pub spectrum: Vec<T>,
    /// Largest relative gap between the two copies of each adjoint eigenvalue.
    pub pairing_defect: T,
}

/// Largest singular value and its left singular vector, through the complex adjoint.
///
/// For a Hermitian `K` the singular values are the moduli of its (right) eigenvalues,
/// which are the eigenvalues of `χ(K)` taken once from each duplicated pair. A
/// non-Hermitian `K` is handled through the Hermitian product `K·Kᴴ`.
pub fn qsvd_dominant<T: Scalar>(
    k: &QuatMatrix<T>,
    hermitian: bool,
    tol: &Tolerances,
) -> Result<QsvdResult<T>, EigenError> {
    if hermitian {
        check_hermitian(k, tol)?;
        dominant_hermitian(k, tol, false)
    } else {
        if !k.is_finite() {
            return Err(EigenError::NonFinite);
        }
        let gram = k.matmul(&k.adjoint_transpose());
        dominant_hermitian(&gram, tol, true)
    }
}

fn dominant_hermitian<T: Scalar>(
    k: &QuatMatrix<T>,
    tol: &Tolerances,
    squared: bool,
) -> Result<QsvdResult<T>, EigenError> {
    let m = k.rows();
    if m == 0 {
        return Ok(QsvdResult {
            lambda1: T::zero(),
            u1: Vec::new(),
            spectrum: Vec::new(),
            pairing_defect: T::zero(),
        });
    }
    let adj = to_adjoint(k);
    let (values, y) = match tol.qsvd_method {
        QsvdMethod::Dominant => {
            let tri = Tridiagonal::new(&adj);
            let mut values = tri.eigenvalues()?;
            values.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
            let upper = values[0].abs() >= values[values.len() - 1].abs();
            let target = if upper { values[0] } else { values[values.len() - 1] };
            (values, tri.extreme_eigenvector(target, upper))
        }
        QsvdMethod::Full => {
            let eig = hermitian_eig(&adj, tol)?;
            let y = pick_paired_vector(&eig.eigenvalues, &eig.eigenvectors);
            (eig.eigenvalues, y)
        }
    };

    let (spectrum, pairing_defect) = pair_spectrum(&values, squared);
    let mut u1 = quat_vector_from_adjoint(&y);
    let norm = u1.iter().map(|q| q.norm_sqr()).sum::<T>().sqrt();
    if norm > T::zero() {
        u1.iter_mut().for_each(|q| *q = q.scale(norm.recip()));
    }
    Ok(QsvdResult {
        lambda1: spectrum[0],
        u1,
        spectrum,
        pairing_defect,
    })
}

/// Among the two adjoint eigenvectors of the dominant pair, the one with the larger
/// first component; ties go to the lower index.
fn pick_paired_vector<T: Scalar>(
    values: &[T],
    vectors: &ComplexMatrix<T>,
) -> Vec<Complex<T>> {
    let n = values.len();
    let upper = values[0].abs() >= values[n - 1].abs();
    let (a, b) = if n < 2 {
        (0, 0)
    } else if upper {
        (0, 1)
    } else {
        (n - 2, n - 1)
    };
    let mag = |i: usize| vectors[(0, i)].norm_sqr();
    let pick = if mag(b) > mag(a) { b } else { a };
    vectors.col(pick)
}

/// Collapses the duplicated adjoint spectrum (sorted descending) into singular values.
fn pair_spectrum<T: Scalar>(values: &[T], squared: bool) -> (Vec<T>, T) {
    let scale = values
        .iter()
        .fold(T::zero(), |acc, v| acc.max(v.abs()))
        .max(T::min_positive_value());
    let mut defect = T::zero();
    let mut out: Vec<T> = values
        .chunks(2)
        .map(|pair| {
            let mean = pair.iter().copied().sum::<T>() / T::lit(pair.len() as f64);
            if pair.len() == 2 {
                defect = defect.max((pair[0] - pair[1]).abs() / scale);
            }
            if squared {
                mean.max(T::zero()).sqrt()
            } else {
                mean.abs()
            }
        })
        .collect();
    out.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    if out.is_empty() {
        out.push(T::zero());
    }
    (out, defect)
}

/// `Σ λ_k u_k u_kᴴ` over the retained rank-1 terms.
pub fn rank1_outer<T: Scalar>(lambda: T, u: &[Quaternion<T>]) -> QuatMatrix<T> {
    QuatMatrix::from_fn(u.len(), u.len(), |r, c| (u[r] * u[c].conj()).scale(lambda))
}

/// Relative Frobenius residual `‖K − λ·u·uᴴ‖_F / ‖K‖_F`.
pub fn rank1_residual<T: Scalar>(k: &QuatMatrix<T>, res: &QsvdResult<T>) -> T {
    let norm = k.frobenius_norm();
    if norm.is_zero() {
        return norm;
    }
    k.sub(&rank1_outer(res.lambda1, &res.u1)).frobenius_norm() / norm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quatlin::matrix::Matrix;

    type Q = Quaternion<f64>;

    fn both() -> [Tolerances; 2] {
        [
            Tolerances::default(),
            Tolerances {
                qsvd_method: QsvdMethod::Full,
                ..Tolerances::default()
            },
        ]
    }

    #[test]
    fn outer_product_of_one_i_j() {
        let nu = vec![Q::real(1.0), Q::i(), Q::j()];
        let k = Matrix::outer(&nu, &nu);
        for tol in both() {
            let res = qsvd_dominant(&k, true, &tol).unwrap();
            assert!((res.lambda1 - 3.0).abs() < 1e-12);
            assert_eq!(res.spectrum.len(), 3);
            assert!(res.spectrum[1].abs() < 1e-12 && res.spectrum[2].abs() < 1e-12);
            assert!(rank1_residual(&k, &res) < 1e-12);
        }
    }

    #[test]
    fn zero_matrix() {
        let k = QuatMatrix::<f64>::zeros(4, 4);
        for tol in both() {
            let res = qsvd_dominant(&k, true, &tol).unwrap();
            assert_eq!(res.lambda1, 0.0);
            assert_eq!(res.spectrum, vec![0.0; 4]);
        }
    }

    #[test]
    fn non_hermitian_via_gram() {
        // Rank-1 a·bᴴ has the single singular value ‖a‖·‖b‖.
        let a = vec![Q::new(1.0, 0.0, 2.0, 0.0), Q::new(0.0, 1.0, 0.0, -1.0)];
        let b = vec![Q::new(0.0, 3.0, 0.0, 0.0), Q::new(1.0, 1.0, 1.0, 1.0)];
        let k = Matrix::outer(&a, &b);
        let na: f64 = a.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt();
        let res = qsvd_dominant(&k, false, &Tolerances::default()).unwrap();
        assert!((res.lambda1 - na * nb).abs() < 1e-10);
        assert!(qsvd_dominant(&k, true, &Tolerances::default()).is_err());
    }

    #[test]
    fn negative_definite_rank1() {
        let nu = vec![Q::new(1.0, 2.0, 0.0, 0.0), Q::new(0.0, 0.0, 1.0, 1.0)];
        let k = Matrix::outer(&nu, &nu).scaled(-1.0);
        for tol in both() {
            let res = qsvd_dominant(&k, true, &tol).unwrap();
            assert!((res.lambda1 - 7.0).abs() < 1e-12);
            let back = rank1_outer(-res.lambda1, &res.u1);
            assert!(back.sub(&k).max_abs() < 1e-10);
        }
    }
}
