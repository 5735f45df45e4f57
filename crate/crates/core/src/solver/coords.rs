//! Anchored coordinate recovery, similarity alignment and the small dense helpers
//! they need.

use crate::netgeom::{EdgeSet, Point3};
use crate::quatlin::{hermitian_eig, RealMatrix, Tolerances};
use crate::scalar::Scalar;

use super::SolverError;

/// Least-squares solver for `[[I, 0], [C]]·X = [X_A; V]`, factored once per edge set.
#[derive(Debug, Clone)]
pub struct CoordinateSolver<T> {
    pairs: Vec<(usize, usize)>,
    n_anchors: usize,
    n: usize,
    /// Lower Cholesky factor of `diag(I_NA, 0) + CᵀC`, row-major.
    chol: Vec<T>,
}

impl<T: Scalar> CoordinateSolver<T> {
    pub fn new(edges: &EdgeSet) -> Result<Self, SolverError> {
        let n = edges.n_nodes();
        let na = edges.n_anchors();
        let mut g = vec![T::zero(); n * n];
        for i in 0..na {
            g[i * n + i] += T::one();
        }
        for &(i, j) in edges.pairs() {
            g[i * n + i] += T::one();
            g[j * n + j] += T::one();
            g[i * n + j] -= T::one();
            g[j * n + i] -= T::one();
        }
        let chol = cholesky(g, n).ok_or(SolverError::SingularSystem)?;
        Ok(Self {
            pairs: edges.pairs().to_vec(),
            n_anchors: na,
            n,
            chol,
        })
    }

    /// All `N` node coordinates of the least-squares solution.
    pub fn solve_all(&self, v_hat: &RealMatrix<T>, anchors: &[Point3<T>]) -> RealMatrix<T> {
        assert_eq!(v_hat.shape(), (self.pairs.len(), 3), "edge matrix shape");
        assert_eq!(anchors.len(), self.n_anchors, "anchor count");
        let n = self.n;
        let mut rhs = RealMatrix::zeros(n, 3);
        for (i, a) in anchors.iter().enumerate() {
            for c in 0..3 {
                rhs[(i, c)] = a[c];
            }
        }
        for (m, &(i, j)) in self.pairs.iter().enumerate() {
            for c in 0..3 {
                let v = v_hat[(m, c)];
                rhs[(i, c)] += v;
                rhs[(j, c)] -= v;
            }
        }
        for c in 0..3 {
            let mut col: Vec<T> = (0..n).map(|r| rhs[(r, c)]).collect();
            cholesky_solve(&self.chol, n, &mut col);
            for r in 0..n {
                rhs[(r, c)] = col[r];
            }
        }
        rhs
    }

    /// Target block of [`Self::solve_all`].
    pub fn solve(&self, v_hat: &RealMatrix<T>, anchors: &[Point3<T>]) -> RealMatrix<T> {
        let all = self.solve_all(v_hat, anchors);
        target_block(&all, self.n_anchors)
    }
}

pub(crate) fn target_block<T: Scalar>(all: &RealMatrix<T>, n_anchors: usize) -> RealMatrix<T> {
    RealMatrix::from_fn(all.rows() - n_anchors, 3, |r, c| all[(n_anchors + r, c)])
}

/// Target coordinates from an estimated edge matrix and the known anchors.
pub fn recover_coords<T: Scalar>(
    v_hat: &RealMatrix<T>,
    edges: &EdgeSet,
    anchors: &[Point3<T>],
) -> Result<RealMatrix<T>, SolverError> {
    Ok(CoordinateSolver::new(edges)?.solve(v_hat, anchors))
}

/// `ξ = ‖X̂ − X‖_F / N_T`.
pub fn error_metric<T: Scalar>(x_hat: &RealMatrix<T>, x_true: &RealMatrix<T>) -> T {
    let nt = x_true.rows();
    if nt == 0 {
        return T::zero();
    }
    x_hat.sub(x_true).frobenius_norm() / T::lit(nt as f64)
}

/// In-place Cholesky of a symmetric positive definite `n×n` matrix; `None` if not SPD.
fn cholesky<T: Scalar>(mut a: Vec<T>, n: usize) -> Option<Vec<T>> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > T::zero()) {
            return None;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
        for i in 0..j {
            a[i * n + j] = T::zero();
        }
    }
    Some(a)
}

fn cholesky_solve<T: Scalar>(l: &[T], n: usize, b: &mut [T]) {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
}

pub(crate) type Mat3<T> = [[T; 3]; 3];

/// `AᵀB` for two `n×3` matrices.
pub(crate) fn cross_cov<T: Scalar>(a: &RealMatrix<T>, b: &RealMatrix<T>) -> Mat3<T> {
    let mut h = [[T::zero(); 3]; 3];
    for r in 0..a.rows() {
        for i in 0..3 {
            for j in 0..3 {
                h[i][j] += a[(r, i)] * b[(r, j)];
            }
        }
    }
    h
}

fn cross<T: Scalar>(a: [T; 3], b: [T; 3]) -> [T; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// SVD `H = U·diag(s)·Wᵀ` of a 3×3 matrix, singular values descending.
/// Returns `None` when the rank is below two.
pub(crate) fn svd3<T: Scalar>(h: &Mat3<T>) -> Option<(Mat3<T>, [T; 3], Mat3<T>)> {
    let hth = RealMatrix::from_fn(3, 3, |i, j| (0..3).map(|k| h[k][i] * h[k][j]).sum());
    let eig = hermitian_eig::<T>(&hth, &Tolerances::default()).ok()?;
    let s = [0, 1, 2].map(|k| eig.eigenvalues[k].max(T::zero()).sqrt());
    let w: Mat3<T> = [0, 1, 2].map(|r| [0, 1, 2].map(|k| eig.eigenvectors[(r, k)]));
    let tiny = s[0] * T::lit(1e-12);
    if !(s[1] > tiny) {
        return None;
    }
    let mut u_cols = [[T::zero(); 3]; 3];
    for k in 0..2 {
        for r in 0..3 {
            u_cols[k][r] = (0..3).map(|c| h[r][c] * w[c][k]).sum::<T>() / s[k];
        }
    }
    u_cols[2] = if s[2] > tiny {
        let mut u = [T::zero(); 3];
        for r in 0..3 {
            u[r] = (0..3).map(|c| h[r][c] * w[c][2]).sum::<T>() / s[2];
        }
        u
    } else {
        cross(u_cols[0], u_cols[1])
    };
    let u: Mat3<T> = [0, 1, 2].map(|r| [0, 1, 2].map(|k| u_cols[k][r]));
    Some((u, s, w))
}

/// Orthogonal `Q` (reflections allowed) minimizing `‖A·Q − B‖_F`.
pub(crate) fn orthogonal_procrustes<T: Scalar>(
    a: &RealMatrix<T>,
    b: &RealMatrix<T>,
) -> Option<Mat3<T>> {
    let h = cross_cov(a, b);
    let (u, _, w) = svd3(&h)?;
    Some([0, 1, 2].map(|i| [0, 1, 2].map(|j| (0..3).map(|k| u[i][k] * w[j][k]).sum())))
}

pub(crate) fn apply3<T: Scalar>(x: &RealMatrix<T>, q: &Mat3<T>) -> RealMatrix<T> {
    RealMatrix::from_fn(x.rows(), 3, |r, c| (0..3).map(|k| x[(r, k)] * q[k][c]).sum())
}

/// Similarity transform `s·X·Q + t` fitted on `anchor_rows` of `x_hat` against
/// `x_ref` (one row per anchor) and applied to every row of `x_hat`.
pub fn procrustes_align<T: Scalar>(
    x_hat: &RealMatrix<T>,
    x_ref: &RealMatrix<T>,
    anchor_rows: &[usize],
) -> Result<RealMatrix<T>, SolverError> {
    let n = anchor_rows.len();
    if n < 4 || x_ref.rows() != n {
        return Err(SolverError::DegenerateReference);
    }
    let nf = T::lit(n as f64);
    let mut mh = [T::zero(); 3];
    let mut mr = [T::zero(); 3];
    for (k, &r) in anchor_rows.iter().enumerate() {
        for c in 0..3 {
            mh[c] += x_hat[(r, c)] / nf;
            mr[c] += x_ref[(k, c)] / nf;
        }
    }
    let a = RealMatrix::from_fn(n, 3, |k, c| x_hat[(anchor_rows[k], c)] - mh[c]);
    let b = RealMatrix::from_fn(n, 3, |k, c| x_ref[(k, c)] - mr[c]);
    let (u, s, w) = svd3(&cross_cov(&a, &b)).ok_or(SolverError::DegenerateReference)?;
    if !(s[2] > s[0] * T::lit(1e-9)) {
        return Err(SolverError::DegenerateReference);
    }
    let q: Mat3<T> = [0, 1, 2].map(|i| [0, 1, 2].map(|j| (0..3).map(|k| u[i][k] * w[j][k]).sum()));
    let norm_a = a.frobenius_norm();
    let scale = (s[0] + s[1] + s[2]) / (norm_a * norm_a);
    let rot = apply3(x_hat, &q);
    let mh_rot: Vec<T> = (0..3)
        .map(|c| (0..3).map(|k| mh[k] * q[k][c]).sum())
        .collect();
    Ok(RealMatrix::from_fn(x_hat.rows(), 3, |r, c| {
        scale * (rot[(r, c)] - mh_rot[c]) + mr[c]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgeom::{true_edges, NetworkLayout};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn layout(rng: &mut ChaCha8Rng) -> NetworkLayout<f64> {
        let anchors = vec![
            [0.0, 0.0, 10.0],
            [30.0, 0.0, 10.0],
            [30.0, 30.0, 10.0],
            [0.0, 30.0, 10.0],
            [0.0, 0.0, 0.0],
        ];
        let targets = (0..15)
            .map(|_| {
                [
                    rng.random_range(0.0..30.0),
                    rng.random_range(0.0..30.0),
                    rng.random_range(0.0..10.0),
                ]
            })
            .collect();
        NetworkLayout::new(anchors, targets).unwrap()
    }

    #[test]
    fn exact_edges_give_exact_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let l = layout(&mut rng);
        let e = l.edges();
        let te = true_edges(&l, &e);
        let x = recover_coords(&te.vectors, &e, l.anchors()).unwrap();
        let truth = RealMatrix::from_fn(15, 3, |r, c| l.targets()[r][c]);
        assert!(x.sub(&truth).max_abs() < 1e-10);
        let all = CoordinateSolver::new(&e).unwrap().solve_all(&te.vectors, l.anchors());
        let c = e.structure_matrix::<f64>();
        assert!(c.matmul(&all).sub(&te.vectors).max_abs() < 1e-10);
    }

    #[test]
    fn zero_edges_single_anchor() {
        let e = EdgeSet::canonical(2, 3).unwrap();
        let x = recover_coords(&RealMatrix::zeros(e.len(), 3), &e, &[[0.0; 3], [0.0; 3]]).unwrap();
        assert_eq!(x.max_abs(), 0.0);
    }

    #[test]
    fn perturbation_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let l = layout(&mut rng);
        let e = l.edges();
        let te = true_edges(&l, &e);
        let n = e.n_nodes();
        let c = e.structure_matrix::<f64>();
        let mut a = RealMatrix::zeros(e.n_anchors() + e.len(), n);
        for i in 0..e.n_anchors() {
            a[(i, i)] = 1.0;
        }
        for m in 0..e.len() {
            for k in 0..n {
                a[(e.n_anchors() + m, k)] = c[(m, k)];
            }
        }
        let smin = hermitian_eig(&a.transpose().matmul(&a), &Tolerances::default())
            .unwrap()
            .eigenvalues
            .last()
            .unwrap()
            .sqrt();
        let solver = CoordinateSolver::new(&e).unwrap();
        let base = solver.solve(&te.vectors, l.anchors());
        for _ in 0..20 {
            let delta = RealMatrix::from_fn(e.len(), 3, |_, _| rng.random_range(-1.0..1.0));
            let mut v = te.vectors.clone();
            for m in 0..e.len() {
                for k in 0..3 {
                    v[(m, k)] += delta[(m, k)];
                }
            }
            let moved = solver.solve(&v, l.anchors()).sub(&base).frobenius_norm();
            assert!(moved <= delta.frobenius_norm() / smin * (1.0 + 1e-9));
        }
    }

    #[test]
    fn metric_examples() {
        let t: RealMatrix<f64> = RealMatrix::from_rows(&[vec![1.0, 2.0, 3.0]]);
        assert_eq!(error_metric(&t, &t), 0.0);
        let h = RealMatrix::from_rows(&[vec![4.0, 6.0, 3.0]]);
        assert!((error_metric(&h, &t) - 5.0).abs() < 1e-15);
        let t2: RealMatrix<f64> = RealMatrix::from_rows(&[vec![0.0; 3], vec![0.0; 3]]);
        let h2 = RealMatrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]);
        let h4 = h2.scaled(2.0);
        assert!((error_metric(&h4, &t2) - 2.0 * error_metric(&h2, &t2)).abs() < 1e-15);
    }

    fn random_orthogonal(rng: &mut ChaCha8Rng, reflect: bool) -> Mat3<f64> {
        let q = crate::quatlin::Quaternion::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        )
        .normalized(1e-9)
        .unwrap();
        let (w, x, y, z) = (q.w, q.x, q.y, q.z);
        let mut r = [
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ];
        if reflect {
            for row in &mut r {
                row[0] = -row[0];
            }
        }
        r
    }

    #[test]
    fn similarity_is_undone() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let l = layout(&mut rng);
        let x = l.coordinate_matrix();
        let anchors: Vec<usize> = (0..5).collect();
        let xref = RealMatrix::from_fn(5, 3, |r, c| x[(r, c)]);
        for reflect in [false, true] {
            let q = random_orthogonal(&mut rng, reflect);
            let moved = apply3(&x, &q);
            let moved = RealMatrix::from_fn(x.rows(), 3, |r, c| 1.7 * moved[(r, c)] + [3.0, -2.0, 5.0][c]);
            let back = procrustes_align(&moved, &xref, &anchors).unwrap();
            assert!(back.sub(&x).max_abs() < 1e-9);
        }
        let same = procrustes_align(&x, &xref, &anchors).unwrap();
        assert!(same.sub(&x).max_abs() < 1e-10);
    }

    #[test]
    fn alignment_never_increases_anchor_misfit() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let l = layout(&mut rng);
        let x = l.coordinate_matrix();
        let anchors: Vec<usize> = (0..5).collect();
        let xref = RealMatrix::from_fn(5, 3, |r, c| x[(r, c)]);
        for _ in 0..50 {
            let noisy = RealMatrix::from_fn(x.rows(), 3, |r, c| x[(r, c)] + rng.random_range(-2.0..2.0));
            let aligned = procrustes_align(&noisy, &xref, &anchors).unwrap();
            let misfit = |m: &RealMatrix<f64>| {
                RealMatrix::from_fn(5, 3, |r, c| m[(r, c)]).sub(&xref).frobenius_norm()
            };
            assert!(misfit(&aligned) <= misfit(&noisy) + 1e-9);
        }
    }

    #[test]
    fn degenerate_reference() {
        let x = RealMatrix::from_fn(5, 3, |r, c| if c == 2 { 0.0 } else { (r * (c + 1)) as f64 });
        let anchors: Vec<usize> = (0..5).collect();
        assert!(matches!(
            procrustes_align(&x, &x, &anchors),
            Err(SolverError::DegenerateReference)
        ));
        assert!(procrustes_align(&x, &x, &anchors[..3]).is_err());
    }
}
