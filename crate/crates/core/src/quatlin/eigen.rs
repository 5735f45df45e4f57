//! Hermitian eigensolvers for real symmetric and complex Hermitian matrices.
//!
//! Two routes are provided. [`EigenMethod::Jacobi`] is the cyclic two-sided Jacobi
//! method: slow but simple and accurate to a few ulps. [`EigenMethod::Householder`]
//! reduces to a real symmetric tridiagonal with Householder reflectors, then runs
//! implicit QL. The Householder route also exposes an eigenvalues-only path and a
//! single-eigenvector path by inverse iteration, which is what the quaternion SVD uses.

use num_traits::{Float, One, Zero};
use thiserror::Error;

use super::matrix::Matrix;
use super::Tolerances;
use crate::scalar::{Entry, Field, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EigenError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (relative defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("eigensolver did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenMethod {
    #[default]
    Jacobi,
    Householder,
}

/// Full spectrum of a Hermitian matrix; eigenvalues descending, eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenResult<E: Field> {
    pub eigenvalues: Vec<E::Real>,
    pub eigenvectors: Matrix<E>,
}

impl<E: Field> EigenResult<E> {
    pub fn eigenvector(&self, k: usize) -> Vec<E> {
        self.eigenvectors.col(k)
    }

    /// `V·diag(λ)·Vᴴ`.
    pub fn reconstruct(&self) -> Matrix<E> {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        Matrix::from_fn(n, n, |r, c| {
            (0..n).fold(E::zero(), |acc, k| {
                acc + v[(r, k)].scale(self.eigenvalues[k]) * v[(c, k)].conj()
            })
        })
    }
}

pub(crate) fn check_hermitian<E: Entry>(
    a: &Matrix<E>,
    tol: &Tolerances,
) -> Result<(), EigenError> {
    if !a.is_square() {
        return Err(EigenError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(EigenError::NonFinite);
    }
    let defect = a.hermitian_defect().to_f64_lossy();
    if defect > tol.hermitian_rel {
        return Err(EigenError::NotHermitian { defect });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian (or real symmetric) matrix with the method in `tol`.
pub fn hermitian_eig<E: Field>(
    a: &Matrix<E>,
    tol: &Tolerances,
) -> Result<EigenResult<E>, EigenError> {
    check_hermitian(a, tol)?;
    let mut res = match tol.eigen_method {
        EigenMethod::Jacobi => jacobi(a, tol)?,
        EigenMethod::Householder => Tridiagonal::new(a).eig_full()?,
    };
    sort_descending(&mut res);
    Ok(res)
}

/// Eigenvalues only, descending. Always uses the tridiagonal route.
pub fn hermitian_eigvals<E: Field>(
    a: &Matrix<E>,
    tol: &Tolerances,
) -> Result<Vec<E::Real>, EigenError> {
    check_hermitian(a, tol)?;
    let tri = Tridiagonal::new(a);
    let mut vals = tri.eigenvalues()?;
    vals.sort_by(|x, y| y.partial_cmp(x).expect("finite eigenvalues"));
    Ok(vals)
}

fn sort_descending<E: Field>(res: &mut EigenResult<E>) {
    let n = res.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        res.eigenvalues[j]
            .partial_cmp(&res.eigenvalues[i])
            .expect("finite eigenvalues")
            .then(i.cmp(&j))
    });
    let vals = order.iter().map(|&i| res.eigenvalues[i]).collect();
    let v = &res.eigenvectors;
    let vecs = Matrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    res.eigenvalues = vals;
    res.eigenvectors = vecs;
}

/// Cyclic Jacobi. Stops when the off-diagonal Frobenius norm drops below
/// `jacobi_off_rel·‖A‖_F`.
fn jacobi<E: Field>(a: &Matrix<E>, tol: &Tolerances) -> Result<EigenResult<E>, EigenError> {
    let n = a.rows();
    let mut a = a.clone();
    let mut v = Matrix::<E>::identity(n);
    let norm = a.frobenius_norm();
    let thresh = norm * E::Real::lit(tol.jacobi_off_rel);
    let two = E::Real::lit(2.0);

    let mut converged = norm == E::Real::zero() || n < 2;
    let mut sweep = 0;
    while !converged {
        let mut off = E::Real::zero();
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    off += a[(p, q)].norm_sqr();
                }
            }
        }
        if off.sqrt() <= thresh {
            converged = true;
            break;
        }
        if sweep == tol.jacobi_max_sweeps {
            break;
        }
        sweep += 1;

        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.modulus();
                if mag == E::Real::zero() {
                    continue;
                }
                let app = a[(p, p)].re();
                let aqq = a[(q, q)].re();
                let theta = (aqq - app) / (two * mag);
                let t = if theta.abs() > E::Real::lit(1e150) {
                    (two * theta).recip()
                } else {
                    let t = (theta.abs() + (theta * theta + E::Real::one()).sqrt()).recip();
                    if theta < E::Real::zero() {
                        -t
                    } else {
                        t
                    }
                };
                let c = (t * t + E::Real::one()).sqrt().recip();
                let s = t * c;
                let ph = apq.phase().conj();
                // J = [[c, s], [-s·ph, c·ph]] on the (p, q) plane; A ← Jᴴ A J.
                let jqp = -ph.scale(s);
                let jqq = ph.scale(c);
                let (cc, sc) = (E::from_real(c), E::from_real(s));
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * cc + akq * jqp;
                    a[(k, q)] = akp * sc + akq * jqq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = cc * apk + jqp.conj() * aqk;
                    a[(q, k)] = sc * apk + jqq.conj() * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * cc + vkq * jqp;
                    v[(k, q)] = vkp * sc + vkq * jqq;
                }
                a[(p, q)] = E::zero();
                a[(q, p)] = E::zero();
                a[(p, p)] = E::from_real(a[(p, p)].re());
                a[(q, q)] = E::from_real(a[(q, q)].re());
            }
        }
    }
    if !converged {
        return Err(EigenError::NoConvergence { iterations: sweep });
    }
    Ok(EigenResult {
        eigenvalues: (0..n).map(|i| a[(i, i)].re()).collect(),
        eigenvectors: v,
    })
}

struct Reflector<E: Field> {
    // Acts on rows/columns `offset..n`.
    offset: usize,
    v: Vec<E>,
    tau: E::Real,
}

impl<E: Field> Reflector<E> {
    /// `x ← (I − τ·v·vᴴ)·x` on the trailing block of `x`.
    fn apply(&self, x: &mut [E]) {
        let tail = &mut x[self.offset..];
        let mut dot = E::zero();
        for (vi, xi) in self.v.iter().zip(tail.iter()) {
            dot += vi.conj() * *xi;
        }
        let f = dot.scale(self.tau);
        for (vi, xi) in self.v.iter().zip(tail.iter_mut()) {
            *xi -= *vi * f;
        }
    }
}

/// Unitary reduction `A = Q·D·R·Dᴴ·Qᴴ` with `R` real symmetric tridiagonal and
/// `D` a diagonal of unit phases.
pub(crate) struct Tridiagonal<E: Field> {
    diag: Vec<E::Real>,
    off: Vec<E::Real>,
    phases: Vec<E>,
    reflectors: Vec<Reflector<E>>,
}

impl<E: Field> Tridiagonal<E> {
    pub(crate) fn new(a: &Matrix<E>) -> Self {
        let n = a.rows();
        let mut w = a.clone();
        let mut reflectors = Vec::new();
        let mut sub = vec![E::zero(); n.saturating_sub(1)];

        for k in 0..n.saturating_sub(1) {
            let m = n - k - 1;
            let x: Vec<E> = (k + 1..n).map(|r| w[(r, k)]).collect();
            let tail_sq = x[1..]
                .iter()
                .fold(E::Real::zero(), |acc, e| acc + e.norm_sqr());
            if tail_sq == E::Real::zero() {
                sub[k] = x[0];
                continue;
            }
            let xnorm = (x[0].norm_sqr() + tail_sq).sqrt();
            let alpha = -x[0].phase().scale(xnorm);
            let mut v = x;
            v[0] -= alpha;
            let vhv = v.iter().fold(E::Real::zero(), |acc, e| acc + e.norm_sqr());
            let tau = E::Real::lit(2.0) / vhv;

            // p = τ·W·v over the trailing block, then w = p − (τ/2)(vᴴp)·v.
            let mut p = vec![E::zero(); m];
            for (i, pi) in p.iter_mut().enumerate() {
                let row = &w.as_slice()[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
                let mut acc = E::zero();
                for (wij, vj) in row.iter().zip(&v) {
                    acc += *wij * *vj;
                }
                *pi = acc.scale(tau);
            }
            let mut vhp = E::zero();
            for (vi, pi) in v.iter().zip(&p) {
                vhp += vi.conj() * *pi;
            }
            let kk = vhp.re() * tau * E::Real::lit(0.5);
            let wv: Vec<E> = p.iter().zip(&v).map(|(&pi, &vi)| pi - vi.scale(kk)).collect();
            let vc: Vec<E> = v.iter().map(|e| e.conj()).collect();
            let wc: Vec<E> = wv.iter().map(|e| e.conj()).collect();
            let data = w.as_mut_slice();
            for i in 0..m {
                let (vi, wi) = (v[i], wv[i]);
                let row = &mut data[(k + 1 + i) * n + k + 1..(k + 2 + i) * n];
                for ((x, &wcj), &vcj) in row.iter_mut().zip(&wc).zip(&vc) {
                    *x -= vi * wcj + wi * vcj;
                }
            }
            sub[k] = alpha;
            reflectors.push(Reflector {
                offset: k + 1,
                v,
                tau,
            });
        }

        let diag = (0..n).map(|i| w[(i, i)].re()).collect();
        let mut phases = vec![E::one(); n];
        let mut off = Vec::with_capacity(n.saturating_sub(1));
        for k in 0..n.saturating_sub(1) {
            phases[k + 1] = phases[k] * sub[k].phase();
            off.push(sub[k].modulus());
        }
        Self {
            diag,
            off,
            phases,
            reflectors,
        }
    }

    fn n(&self) -> usize {
        self.diag.len()
    }

    /// Maps an eigenvector of `R` back to one of `A`: `x = Q·D·z`.
    fn back_transform(&self, z: &[E::Real]) -> Vec<E> {
        let mut x: Vec<E> = z
            .iter()
            .zip(&self.phases)
            .map(|(&zi, &ph)| ph.scale(zi))
            .collect();
        for r in self.reflectors.iter().rev() {
            r.apply(&mut x);
        }
        x
    }

    pub(crate) fn eigenvalues(&self) -> Result<Vec<E::Real>, EigenError> {
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(E::Real::zero());
        tql(&mut d, &mut e, None)?;
        Ok(d)
    }

    fn eig_full(&self) -> Result<EigenResult<E>, EigenError> {
        let n = self.n();
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(E::Real::zero());
        // Row i of `zt` is eigenvector i of R.
        let mut zt = vec![E::Real::zero(); n * n];
        for i in 0..n {
            zt[i * n + i] = E::Real::one();
        }
        tql(&mut d, &mut e, Some(&mut zt))?;
        let mut vecs = Matrix::zeros(n, n);
        for i in 0..n {
            let x = self.back_transform(&zt[i * n..(i + 1) * n]);
            for (r, xr) in x.into_iter().enumerate() {
                vecs[(r, i)] = xr;
            }
        }
        Ok(EigenResult {
            eigenvalues: d,
            eigenvectors: vecs,
        })
    }

    /// Unit eigenvector for the extreme eigenvalue `lambda` (the largest when
    /// `upper`, else the smallest) by shifted inverse iteration on `R`.
    pub(crate) fn extreme_eigenvector(&self, lambda: E::Real, upper: bool) -> Vec<E> {
        let n = self.n();
        if n == 0 {
            return Vec::new();
        }
        let scale = self
            .diag
            .iter()
            .chain(&self.off)
            .fold(E::Real::zero(), |acc, x| acc.max(x.abs()));
        if scale == E::Real::zero() {
            let mut z = vec![E::Real::zero(); n];
            z[0] = E::Real::one();
            return self.back_transform(&z);
        }
        // Shift just outside the spectrum so R − μI is definite and needs no pivoting.
        let delta = scale * E::Real::lit(1e-10);
        let mu = if upper { lambda + delta } else { lambda - delta };

        let mut z = vec![E::Real::one(); n];
        normalize_real(&mut z);
        for _ in 0..4 {
            z = solve_shifted_tridiagonal(&self.diag, &self.off, mu, &z);
            normalize_real(&mut z);
        }
        self.back_transform(&z)
    }
}

fn normalize_real<T: Scalar>(z: &mut [T]) {
    let norm = z.iter().map(|&x| x * x).sum::<T>().sqrt();
    if norm > T::zero() && norm.is_finite() {
        z.iter_mut().for_each(|x| *x /= norm);
    }
}

/// Solves `(R − μI)·y = b` by the Thomas algorithm; `R − μI` must be definite.
fn solve_shifted_tridiagonal<T: Scalar>(diag: &[T], off: &[T], mu: T, b: &[T]) -> Vec<T> {
    let n = diag.len();
    let tiny = T::min_positive_value().sqrt();
    let mut piv = vec![T::zero(); n];
    let mut y = b.to_vec();
    piv[0] = diag[0] - mu;
    for i in 1..n {
        let prev = if piv[i - 1].abs() < tiny {
            tiny.copysign(piv[i - 1])
        } else {
            piv[i - 1]
        };
        let l = off[i - 1] / prev;
        piv[i] = diag[i] - mu - l * off[i - 1];
        y[i] = y[i] - l * y[i - 1];
    }
    for i in (0..n).rev() {
        let p = if piv[i].abs() < tiny {
            tiny.copysign(piv[i])
        } else {
            piv[i]
        };
        let upper = if i + 1 < n { off[i] * y[i + 1] } else { T::zero() };
        y[i] = (y[i] - upper) / p;
    }
    y
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal (`e[i]` couples
/// `d[i]` and `d[i+1]`, `e[n-1]` is scratch). Eigenvector rows in `zt` are rotated
/// alongside when given.
fn tql<T: Scalar>(d: &mut [T], e: &mut [T], mut zt: Option<&mut [T]>) -> Result<(), EigenError> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    // Deflate against the matrix norm rather than the neighbouring diagonal, so that
    // clusters of zero eigenvalues still split.
    let eps = T::epsilon();
    let norm = d
        .iter()
        .zip(e.iter())
        .fold(T::zero(), |acc, (a, b)| acc.max(a.abs() + b.abs()));
    let tiny = eps * norm;
    const MAX_ITER: usize = 60;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                if e[m].abs() <= tiny {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_ITER {
                return Err(EigenError::NoConvergence {
                    iterations: MAX_ITER,
                });
            }
            let two = T::lit(2.0);
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = zt.as_deref_mut() {
                    let (lo, hi) = z.split_at_mut((i + 1) * n);
                    let zi = &mut lo[i * n..];
                    let zi1 = &mut hi[..n];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let f = *b;
                        *b = s * *a + c * f;
                        *a = c * *a - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    fn random_hermitian(n: usize, seed: u64) -> Matrix<C> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = Matrix::<C>::zeros(n, n);
        for r in 0..n {
            a[(r, r)] = C::new(rng.random_range(-1.0..1.0), 0.0);
            for c in r + 1..n {
                let z = C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                a[(r, c)] = z;
                a[(c, r)] = z.conj();
            }
        }
        a
    }

    fn tol(method: EigenMethod) -> Tolerances {
        Tolerances {
            eigen_method: method,
            ..Tolerances::default()
        }
    }

    #[test]
    fn identity_spectrum() {
        for method in [EigenMethod::Jacobi, EigenMethod::Householder] {
            let res = hermitian_eig(&Matrix::<f64>::identity(4), &tol(method)).unwrap();
            assert_eq!(res.eigenvalues, vec![1.0; 4]);
        }
    }

    #[test]
    fn diagonal_is_already_solved() {
        let a = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 3.0]]);
        for method in [EigenMethod::Jacobi, EigenMethod::Householder] {
            let res = hermitian_eig(&a, &tol(method)).unwrap();
            assert_eq!(res.eigenvalues, vec![3.0, 1.0]);
            assert!((res.eigenvectors[(1, 0)].abs() - 1.0).abs() < 1e-15);
            assert!((res.eigenvectors[(0, 1)].abs() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn random_hermitian_trace_and_reconstruction() {
        let a = random_hermitian(10, 7);
        let trace = a.trace().re;
        for method in [EigenMethod::Jacobi, EigenMethod::Householder] {
            let res = hermitian_eig(&a, &tol(method)).unwrap();
            let sum: f64 = res.eigenvalues.iter().sum();
            assert!((sum - trace).abs() <= 1e-10 * trace.abs().max(1.0));
            let err = res.reconstruct().sub(&a).frobenius_norm() / a.frobenius_norm();
            assert!(err < 1e-10, "{method:?}: {err}");
            let v = &res.eigenvectors;
            let gram = v.adjoint_transpose().matmul(v);
            assert!(gram.sub(&Matrix::identity(10)).max_abs() < 1e-10);
        }
    }

    #[test]
    fn methods_agree() {
        let a = random_hermitian(25, 11);
        let j = hermitian_eig(&a, &tol(EigenMethod::Jacobi)).unwrap();
        let h = hermitian_eig(&a, &tol(EigenMethod::Householder)).unwrap();
        let vals = hermitian_eigvals(&a, &Tolerances::default()).unwrap();
        for ((x, y), z) in j.eigenvalues.iter().zip(&h.eigenvalues).zip(&vals) {
            assert!((x - y).abs() < 1e-12);
            assert!((x - z).abs() < 1e-12);
        }
    }

    #[test]
    fn extreme_eigenvector_by_inverse_iteration() {
        let a = random_hermitian(30, 3);
        let tri = Tridiagonal::new(&a);
        let vals = hermitian_eigvals(&a, &Tolerances::default()).unwrap();
        for (lambda, upper) in [(vals[0], true), (vals[29], false)] {
            let x = tri.extreme_eigenvector(lambda, upper);
            let mut resid = 0.0;
            for r in 0..30 {
                let ax: C = (0..30).map(|c| a[(r, c)] * x[c]).sum();
                resid += (ax - x[r] * lambda).norm_sqr();
            }
            assert!(resid.sqrt() < 1e-9, "{resid}");
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
        assert!(matches!(
            hermitian_eig(&a, &Tolerances::default()),
            Err(EigenError::NotHermitian { .. })
        ));
        let b = Matrix::<f64>::zeros(2, 3);
        assert!(matches!(
            hermitian_eig(&b, &Tolerances::default()),
            Err(EigenError::NotSquare { .. })
        ));
    }

    #[test]
    fn sweep_limit_reports_no_convergence() {
        let a = random_hermitian(8, 5);
        let t = Tolerances {
            jacobi_max_sweeps: 0,
            ..Tolerances::default()
        };
        assert!(matches!(
            hermitian_eig(&a, &t),
            Err(EigenError::NoConvergence { .. })
        ));
    }

    #[test]
    fn zero_matrix() {
        let a = Matrix::<C>::zeros(3, 3);
        for method in [EigenMethod::Jacobi, EigenMethod::Householder] {
            let res = hermitian_eig(&a, &tol(method)).unwrap();
            assert_eq!(res.eigenvalues, vec![0.0; 3]);
        }
    }
}
