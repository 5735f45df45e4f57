use crate::netgeom::{EdgeSet, NetworkLayout, TrueEdges};
use crate::quatlin::{hermitian_eig, qsvd_dominant, QuatMatrix, Quaternion, RealMatrix, Tolerances};
use crate::scalar::Scalar;

use super::coords::{apply3, orthogonal_procrustes, target_block, CoordinateSolver};
use super::{error_metric, procrustes_align, SolverError};

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics<T> {
    /// Eigenvalues (real path) or singular values (quaternion path), descending.
    pub spectrum: Vec<T>,
    /// `‖V̂_AA − V_AA‖_F / ‖V_AA‖_F` after the gauge fix.
    pub gauge_residual: T,
    /// Share of `‖ν̂‖²` in the discarded `k` components. Quaternion path only.
    pub k_energy: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult<T> {
    /// Target coordinates, `N_T×3`.
    pub x_hat: RealMatrix<T>,
    /// Estimated edge matrix, `M×3`.
    pub v_hat: RealMatrix<T>,
    pub xi: T,
    pub diagnostics: Diagnostics<T>,
}

/// What the estimators share for one layout: the exact anchor–anchor edges, the
/// factored recovery system and the ground truth used for scoring.
#[derive(Debug, Clone)]
pub struct EstimationContext<T> {
    pub edges: EdgeSet,
    pub anchors: Vec<[T; 3]>,
    pub x_true: RealMatrix<T>,
    pub aa_edges: Vec<usize>,
    pub aa_vectors: RealMatrix<T>,
    pub aa_quats: Vec<Quaternion<T>>,
    pub solver: CoordinateSolver<T>,
    pub tol: Tolerances,
    pub procrustes: bool,
}

impl<T: Scalar> EstimationContext<T> {
    pub fn new(layout: &NetworkLayout<T>, truth: &TrueEdges<T>) -> Result<Self, SolverError> {
        let edges = layout.edges();
        let aa_edges: Vec<usize> = edges.anchor_edges().collect();
        if aa_edges.is_empty() {
            return Err(SolverError::DegenerateGauge);
        }
        Ok(Self {
            solver: CoordinateSolver::new(&edges)?,
            anchors: layout.anchors().to_vec(),
            x_true: RealMatrix::from_fn(layout.n_targets(), 3, |r, c| layout.targets()[r][c]),
            aa_vectors: RealMatrix::from_fn(aa_edges.len(), 3, |r, c| truth.vectors[(aa_edges[r], c)]),
            aa_quats: aa_edges.iter().map(|&m| truth.quats[m]).collect(),
            aa_edges,
            edges,
            tol: Tolerances::fast(),
            procrustes: false,
        })
    }

    pub fn with_procrustes(mut self, on: bool) -> Self {
        self.procrustes = on;
        self
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    fn finish(&self, v_hat: RealMatrix<T>, diagnostics: Diagnostics<T>) -> Result<EstimateResult<T>, SolverError> {
        let all = self.solver.solve_all(&v_hat, &self.anchors);
        let x_hat = if self.procrustes {
            let na = self.anchors.len();
            let xref = RealMatrix::from_fn(na, 3, |r, c| self.anchors[r][c]);
            let rows: Vec<usize> = (0..na).collect();
            target_block(&procrustes_align(&all, &xref, &rows)?, na)
        } else {
            target_block(&all, self.anchors.len())
        };
        if !x_hat.is_finite() {
            return Err(SolverError::NonFinite);
        }
        let xi = error_metric(&x_hat, &self.x_true);
        Ok(EstimateResult {
            x_hat,
            v_hat,
            xi,
            diagnostics,
        })
    }

    fn aa_residual(&self, v_hat: &RealMatrix<T>) -> T {
        let est = RealMatrix::from_fn(self.aa_edges.len(), 3, |r, c| v_hat[(self.aa_edges[r], c)]);
        est.sub(&self.aa_vectors).frobenius_norm() / self.aa_vectors.frobenius_norm()
    }
}

/// Real-domain SMDS: rank-3 factorization of the real GEK, orthogonal gauge fixed on
/// the anchor–anchor edges, then anchored recovery.
pub fn smds_estimate<T: Scalar>(
    k: &RealMatrix<T>,
    ctx: &EstimationContext<T>,
) -> Result<EstimateResult<T>, SolverError> {
    let eig = hermitian_eig(k, &ctx.tol)?;
    // Positive beyond roundoff of the leading eigenvalue.
    let floor = eig.eigenvalues.first().copied().unwrap_or_else(T::zero).abs() * T::lit(1e-12);
    let positive = eig.eigenvalues.iter().take(3).filter(|&&l| l > floor).count();
    if positive < 3 {
        return Err(SolverError::RankDeficient(positive));
    }
    let roots: Vec<T> = eig.eigenvalues[..3].iter().map(|l| l.max(T::zero()).sqrt()).collect();
    let v_prime = RealMatrix::from_fn(k.rows(), 3, |r, c| eig.eigenvectors[(r, c)] * roots[c]);
    let aa = RealMatrix::from_fn(ctx.aa_edges.len(), 3, |r, c| v_prime[(ctx.aa_edges[r], c)]);
    let q = orthogonal_procrustes(&aa, &ctx.aa_vectors).ok_or(SolverError::DegenerateGauge)?;
    let v_hat = apply3(&v_prime, &q);
    let diagnostics = Diagnostics {
        spectrum: eig.eigenvalues,
        gauge_residual: ctx.aa_residual(&v_hat),
        k_energy: None,
    };
    ctx.finish(v_hat, diagnostics)
}

/// Right-multiplies `nu_hat` by the unit quaternion that best maps its anchor–anchor
/// entries onto the true ones.
pub fn fix_quaternion_gauge<T: Scalar>(
    nu_hat: &[Quaternion<T>],
    aa_edges: &[usize],
    aa_true: &[Quaternion<T>],
) -> Result<Vec<Quaternion<T>>, SolverError> {
    let s: Quaternion<T> = aa_edges
        .iter()
        .zip(aa_true)
        .map(|(&m, &t)| nu_hat[m].conj() * t)
        .sum();
    let q = s.normalized(T::lit(1e-12)).ok_or(SolverError::DegenerateGauge)?;
    Ok(nu_hat.iter().map(|&v| v * q).collect())
}

/// Quaternion-domain SMDS: rank-1 truncation of the quaternion GEK, gauge fix, then
/// the real, `i` and `j` parts as the edge matrix.
pub fn qdsmds_estimate<T: Scalar>(
    k: &QuatMatrix<T>,
    ctx: &EstimationContext<T>,
) -> Result<EstimateResult<T>, SolverError> {
    let res = qsvd_dominant(k, true, &ctx.tol)?;
    let root = res.lambda1.sqrt();
    let nu_prime: Vec<Quaternion<T>> = res.u1.iter().map(|q| q.scale(root)).collect();
    let nu = fix_quaternion_gauge(&nu_prime, &ctx.aa_edges, &ctx.aa_quats)?;
    let total: T = nu.iter().map(|q| q.norm_sqr()).sum();
    let k_part: T = nu.iter().map(|q| q.z * q.z).sum();
    let v_hat = RealMatrix::from_fn(nu.len(), 3, |r, c| nu[r].to_point()[c]);
    let diagnostics = Diagnostics {
        spectrum: res.spectrum,
        gauge_residual: ctx.aa_residual(&v_hat),
        k_energy: Some(if total > T::zero() { k_part / total } else { T::zero() }),
    };
    ctx.finish(v_hat, diagnostics)
}
