//! Network layout, canonical edge enumeration and the node/edge structure matrix.
//!
//! Nodes are indexed from zero: anchors first (`0..N_A`), then targets. Edges are
//! every anchor–anchor and anchor–target pair `(i, j)` with `i < j`, in ascending
//! lexicographic order. Target–target pairs are never measured.

use thiserror::Error;

use crate::quatlin::{Quaternion, RealMatrix};
use crate::scalar::Scalar;

pub type Point3<T> = [T; 3];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid node counts: {anchors} anchors, {targets} targets")]
    InvalidCounts { anchors: usize, targets: usize },
    #[error("at least 4 anchors are required, got {0}")]
    TooFewAnchors(usize),
    #[error("at least one target is required")]
    NoTargets,
    #[error("anchors are coplanar")]
    CoplanarAnchors,
    #[error("node coordinates must be finite")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkLayout<T> {
    anchors: Vec<Point3<T>>,
    targets: Vec<Point3<T>>,
}

impl<T: Scalar> NetworkLayout<T> {
    /// Validated layout: at least four non-coplanar anchors and one target.
    pub fn new(anchors: Vec<Point3<T>>, targets: Vec<Point3<T>>) -> Result<Self, GeometryError> {
        if anchors.len() < 4 {
            return Err(GeometryError::TooFewAnchors(anchors.len()));
        }
        if targets.is_empty() {
            return Err(GeometryError::NoTargets);
        }
        if anchors
            .iter()
            .chain(&targets)
            .any(|p| p.iter().any(|c| !c.is_finite()))
        {
            return Err(GeometryError::NonFinite);
        }
        if centered_rank(&anchors) < 3 {
            return Err(GeometryError::CoplanarAnchors);
        }
        Ok(Self { anchors, targets })
    }

    /// Layout without the anchor-count and coplanarity checks, for small test networks.
    pub fn new_unchecked(anchors: Vec<Point3<T>>, targets: Vec<Point3<T>>) -> Self {
        Self { anchors, targets }
    }

    pub fn anchors(&self) -> &[Point3<T>] {
        &self.anchors
    }

    pub fn targets(&self) -> &[Point3<T>] {
        &self.targets
    }

    pub fn n_anchors(&self) -> usize {
        self.anchors.len()
    }

    pub fn n_targets(&self) -> usize {
        self.targets.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.anchors.len() + self.targets.len()
    }

    /// Node `i` in global indexing (anchors first).
    pub fn node(&self, i: usize) -> Point3<T> {
        if i < self.anchors.len() {
            self.anchors[i]
        } else {
            self.targets[i - self.anchors.len()]
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = Point3<T>> + '_ {
        self.anchors.iter().chain(&self.targets).copied()
    }

    /// `N×3` coordinate matrix `X = [X_A; X_T]`.
    pub fn coordinate_matrix(&self) -> RealMatrix<T> {
        RealMatrix::from_fn(self.n_nodes(), 3, |r, c| self.node(r)[c])
    }

    pub fn edges(&self) -> EdgeSet {
        EdgeSet::canonical(self.n_anchors(), self.n_targets())
            .expect("layout always has at least two anchors")
    }
}

/// Numerical rank of the centered point cloud.
fn centered_rank<T: Scalar>(points: &[Point3<T>]) -> usize {
    let n = T::lit(points.len() as f64);
    let mut mean = [T::zero(); 3];
    for p in points {
        for k in 0..3 {
            mean[k] += p[k] / n;
        }
    }
    let mut rows: Vec<[T; 3]> = points
        .iter()
        .map(|p| [p[0] - mean[0], p[1] - mean[1], p[2] - mean[2]])
        .collect();
    let scale = rows
        .iter()
        .flat_map(|r| r.iter())
        .fold(T::zero(), |a, &b| a.max(b.abs()));
    if scale == T::zero() {
        return 0;
    }
    let tiny = scale * T::lit(1e-9);
    // Gaussian elimination with full column pivot search.
    let mut rank = 0;
    for col in 0..3 {
        let pivot = (rank..rows.len()).max_by(|&a, &b| {
            rows[a][col]
                .abs()
                .partial_cmp(&rows[b][col].abs())
                .expect("finite")
        });
        let Some(p) = pivot else { break };
        if rows[p][col].abs() <= tiny {
            continue;
        }
        rows.swap(rank, p);
        let pr = rows[rank];
        for row in rows.iter_mut().skip(rank + 1) {
            let f = row[col] / pr[col];
            for k in col..3 {
                row[k] -= f * pr[k];
            }
        }
        rank += 1;
    }
    rank
}

/// Measurable node pairs in canonical order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSet {
    n_anchors: usize,
    n_targets: usize,
    pairs: Vec<(usize, usize)>,
}

impl EdgeSet {
    /// `(0,1),…,(0,N−1),(1,2),…,(N_A−1,N−1)`, skipping target–target pairs.
    pub fn canonical(n_anchors: usize, n_targets: usize) -> Result<Self, GeometryError> {
        if n_anchors < 2 {
            return Err(GeometryError::InvalidCounts {
                anchors: n_anchors,
                targets: n_targets,
            });
        }
        let n = n_anchors + n_targets;
        let pairs = (0..n_anchors)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Ok(Self {
            n_anchors,
            n_targets,
            pairs,
        })
    }

    /// `M = N_A(N_A−1)/2 + N_A·N_T`.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn n_anchors(&self) -> usize {
        self.n_anchors
    }

    pub fn n_nodes(&self) -> usize {
        self.n_anchors + self.n_targets
    }

    /// Whether edge `m` joins two anchors.
    pub fn is_anchor_edge(&self, m: usize) -> bool {
        self.pairs[m].1 < self.n_anchors
    }

    /// Indices of the anchor–anchor edges.
    pub fn anchor_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&m| self.is_anchor_edge(m))
    }

    /// Structure matrix `C` (`M×N`): row `m` has `+1` at `i` and `−1` at `j`.
    pub fn structure_matrix<T: Scalar>(&self) -> RealMatrix<T> {
        let mut c = RealMatrix::zeros(self.len(), self.n_nodes());
        for (m, &(i, j)) in self.pairs.iter().enumerate() {
            c[(m, i)] = T::one();
            c[(m, j)] = -T::one();
        }
        c
    }
}

impl EdgeSet {
    /// `(C_AA, C_AT)`: the anchor–anchor rows, then the anchor–target rows grouped by
    /// anchor, each in canonical order.
    pub fn structure_blocks<T: Scalar>(&self) -> (RealMatrix<T>, RealMatrix<T>) {
        let c = self.structure_matrix::<T>();
        let pick = |rows: Vec<usize>| {
            RealMatrix::from_fn(rows.len(), self.n_nodes(), |r, k| c[(rows[r], k)])
        };
        let aa = self.anchor_edges().collect();
        let at = (0..self.len()).filter(|&m| !self.is_anchor_edge(m)).collect();
        (pick(aa), pick(at))
    }
}

/// Embeds a point as `a + b·i + c·j + 0·k`.
#[inline]
pub fn coords_to_quat<T: Scalar>(p: Point3<T>) -> Quaternion<T> {
    Quaternion::from_point(p)
}

#[inline]
pub fn quat_to_coords<T: Scalar>(q: Quaternion<T>) -> Point3<T> {
    q.to_point()
}

#[inline]
pub fn sub3<T: Scalar>(a: Point3<T>, b: Point3<T>) -> Point3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn norm3<T: Scalar>(v: Point3<T>) -> T {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Edge vectors `x_i − x_j` as an `M×3` matrix and as quaternions.
#[derive(Debug, Clone)]
pub struct TrueEdges<T> {
    pub vectors: RealMatrix<T>,
    pub quats: Vec<Quaternion<T>>,
}

impl<T: Scalar> TrueEdges<T> {
    pub fn vector(&self, m: usize) -> Point3<T> {
        let r = self.vectors.row(m);
        [r[0], r[1], r[2]]
    }

    pub fn lengths(&self) -> Vec<T> {
        (0..self.quats.len()).map(|m| norm3(self.vector(m))).collect()
    }
}

pub fn true_edges<T: Scalar>(layout: &NetworkLayout<T>, edges: &EdgeSet) -> TrueEdges<T> {
    let vecs: Vec<Point3<T>> = edges
        .pairs()
        .iter()
        .map(|&(i, j)| sub3(layout.node(i), layout.node(j)))
        .collect();
    TrueEdges {
        vectors: RealMatrix::from_fn(vecs.len(), 3, |r, c| vecs[r][c]),
        quats: vecs.into_iter().map(coords_to_quat).collect(),
    }
}
