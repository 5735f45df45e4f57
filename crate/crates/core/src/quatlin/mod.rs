//! Quaternion, complex and real dense linear algebra.
//!
//! The quaternion SVD goes through the complex adjoint: a Hermitian `M×M`
//! quaternion matrix becomes a `2M×2M` complex Hermitian matrix whose spectrum
//! is the quaternion spectrum with every value doubled.

mod adjoint;
mod eigen;
mod matrix;
mod qsvd;
mod quaternion;

pub use adjoint::{adjoint_vector, from_adjoint, quat_vector_from_adjoint, to_adjoint};
pub use eigen::{hermitian_eig, hermitian_eigvals, EigenError, EigenMethod, EigenResult};
pub use matrix::{ComplexMatrix, Matrix, QuatMatrix, RealMatrix};
pub use qsvd::{qsvd_dominant, rank1_outer, rank1_residual, QsvdMethod, QsvdResult};
pub use quaternion::{qmul, Quaternion};

/// Numerical tolerances for the linear algebra, in one place.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Largest accepted `max|A − Aᴴ| / ‖A‖_F` for Hermitian inputs.
    pub hermitian_rel: f64,
    /// Jacobi stops when the off-diagonal Frobenius norm is below this times `‖A‖_F`.
    pub jacobi_off_rel: f64,
    pub jacobi_max_sweeps: usize,
    pub eigen_method: EigenMethod,
    pub qsvd_method: QsvdMethod,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian_rel: 1e-9,
            jacobi_off_rel: 1e-12,
            jacobi_max_sweeps: 100,
            eigen_method: EigenMethod::Jacobi,
            qsvd_method: QsvdMethod::Dominant,
        }
    }
}

impl Tolerances {
    /// Householder eigensolver with the dominant-pair QSVD; what the estimators use.
    pub fn fast() -> Self {
        Self {
            eigen_method: EigenMethod::Householder,
            qsvd_method: QsvdMethod::Dominant,
            ..Self::default()
        }
    }
}
