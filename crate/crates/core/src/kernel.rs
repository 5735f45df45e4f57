//! Edge kernels: the real Gram edge kernel and its quaternion counterpart, plus the
//! plane-projection geometry that feeds the quaternion entries.
//!
//! Edge `m` has vector `v_m = (a, b, c)`. Its projection onto plane `P` has length
//! `d^P_m` and direction angle `ψ^P_m` (`atan2(b,a)` for xy, `atan2(c,a)` for xz,
//! `atan2(c,b)` for yz). The plane ADoA of a pair is `α^P_mp = ψ^P_p − ψ^P_m`, so that
//! the quaternion entry
//!
//! ```text
//! d_m d_p cos α_mp − i·d^xy_m d^xy_p sin α^xy_mp − j·d^xz_m d^xz_p sin α^xz_mp − k·d^yz_m d^yz_p sin α^yz_mp
//! ```
//!
//! equals `ν_m·conj(ν_p)` for `ν = a + b·i + c·j`.

use thiserror::Error;

use crate::netgeom::Point3;
use crate::quatlin::{QuatMatrix, Quaternion, RealMatrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("edge {0} has zero length")]
    ZeroEdge(usize),
    #[error("missing {field} for {at}")]
    MissingField { field: &'static str, at: String },
    #[error("observation table has {got} pair entries, expected {expected}")]
    Shape { got: usize, expected: usize },
}

/// Where a value came from.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Observed<T> {
    Measured(T),
    Estimated(T),
    #[default]
    Absent,
}

impl<T: Copy> Observed<T> {
    pub fn value(self) -> Option<T> {
        match self {
            Observed::Measured(v) | Observed::Estimated(v) => Some(v),
            Observed::Absent => None,
        }
    }

    pub fn is_measured(self) -> bool {
        matches!(self, Observed::Measured(_))
    }

    fn require(self, field: &'static str, at: impl FnOnce() -> String) -> Result<T, KernelError> {
        self.value()
            .ok_or_else(|| KernelError::MissingField { field, at: at() })
    }
}

/// Plane index: xy, xz, yz.
pub const PLANES: [&str; 3] = ["xy", "xz", "yz"];

/// Full geometric description of one edge vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeProjection<T> {
    pub d: T,
    /// Projected lengths onto the xy, xz and yz planes.
    pub plane_d: [T; 3],
    /// Direction angle of each projection.
    pub plane_psi: [T; 3],
    /// Elevation above the xy plane.
    pub theta: T,
    /// Azimuth in the xy plane.
    pub phi: T,
}

impl<T: Scalar> EdgeProjection<T> {
    pub fn d_xy(&self) -> T {
        self.plane_d[0]
    }

    pub fn d_xz(&self) -> T {
        self.plane_d[1]
    }

    pub fn d_yz(&self) -> T {
        self.plane_d[2]
    }
}

pub fn project_edge<T: Scalar>(v: Point3<T>) -> Result<EdgeProjection<T>, KernelError> {
    let [a, b, c] = v;
    let d = (a * a + b * b + c * c).sqrt();
    if !(d > T::zero()) {
        return Err(KernelError::ZeroEdge(0));
    }
    Ok(EdgeProjection {
        d,
        plane_d: [a.hypot(b), a.hypot(c), b.hypot(c)],
        plane_psi: [b.atan2(a), c.atan2(a), c.atan2(b)],
        theta: (c / d).max(-T::one()).min(T::one()).asin(),
        phi: b.atan2(a),
    })
}

/// Plane geometry of an edge of length `d` seen at elevation `theta` and azimuth `phi`.
pub fn derive_plane_quantities_from_angles<T: Scalar>(
    d: T,
    theta: T,
    phi: T,
) -> Result<EdgeProjection<T>, KernelError> {
    if !(d > T::zero()) {
        return Err(KernelError::ZeroEdge(0));
    }
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let u = [ct * cp, ct * sp, st];
    Ok(EdgeProjection {
        d,
        plane_d: [
            d * ct.abs(),
            d * (ct * ct * cp * cp + st * st).sqrt(),
            d * (ct * ct * sp * sp + st * st).sqrt(),
        ],
        plane_psi: [u[1].atan2(u[0]), u[2].atan2(u[0]), u[2].atan2(u[1])],
        theta,
        phi,
    })
}

/// 3D angle between two edge vectors, in `[0, π]`.
pub fn adoa<T: Scalar>(u: Point3<T>, v: Point3<T>) -> T {
    let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    let cross = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    let cn = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    cn.atan2(dot)
}

/// Plane ADoAs `ψ^P_p − ψ^P_m`.
pub fn plane_adoas<T: Scalar>(m: &EdgeProjection<T>, p: &EdgeProjection<T>) -> [T; 3] {
    [0, 1, 2].map(|k| p.plane_psi[k] - m.plane_psi[k])
}

/// Per-edge quantities.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EdgeObservation<T> {
    pub d: Observed<T>,
    /// Projected lengths onto xy, xz, yz.
    pub plane_d: [Observed<T>; 3],
}

/// Per-pair quantities for `m < p`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PairObservation<T> {
    pub adoa: Observed<T>,
    /// Plane ADoAs for xy, xz, yz.
    pub plane_adoa: [Observed<T>; 3],
    /// Pair-specific projected lengths of edges `m` and `p`. When present they
    /// replace the per-edge values for this entry only.
    pub plane_d_pair: Option<([Observed<T>; 3], [Observed<T>; 3])>,
    /// Pair-specific lengths of `m` and `p` for the real part.
    pub d_pair: Option<(Observed<T>, Observed<T>)>,
}

/// Observations for every edge and every unordered edge pair, upper triangle packed
/// row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationTable<T> {
    edges: Vec<EdgeObservation<T>>,
    pairs: Vec<PairObservation<T>>,
}

/// Position of `(m, p)`, `m < p < n`, in the packed upper triangle.
#[inline]
pub fn pair_index(m: usize, p: usize, n: usize) -> usize {
    debug_assert!(m < p && p < n);
    m * (2 * n - m - 1) / 2 + (p - m - 1)
}

impl<T: Scalar> ObservationTable<T> {
    pub fn new(m: usize) -> Self {
        Self {
            edges: vec![EdgeObservation::default(); m],
            pairs: vec![PairObservation::default(); m * m.saturating_sub(1) / 2],
        }
    }

    pub fn from_parts(
        edges: Vec<EdgeObservation<T>>,
        pairs: Vec<PairObservation<T>>,
    ) -> Result<Self, KernelError> {
        let m = edges.len();
        let expected = m * m.saturating_sub(1) / 2;
        if pairs.len() != expected {
            return Err(KernelError::Shape {
                got: pairs.len(),
                expected,
            });
        }
        Ok(Self { edges, pairs })
    }

    /// Noiseless table with every field measured from the true edge vectors.
    pub fn exact(vectors: &[Point3<T>]) -> Result<Self, KernelError> {
        let proj = vectors
            .iter()
            .enumerate()
            .map(|(m, &v)| project_edge(v).map_err(|_| KernelError::ZeroEdge(m)))
            .collect::<Result<Vec<_>, _>>()?;
        let mut table = Self::new(vectors.len());
        for (m, pr) in proj.iter().enumerate() {
            table.edges[m] = EdgeObservation {
                d: Observed::Measured(pr.d),
                plane_d: pr.plane_d.map(Observed::Measured),
            };
        }
        for m in 0..vectors.len() {
            for p in m + 1..vectors.len() {
                let pair = table.pair_mut(m, p);
                pair.adoa = Observed::Measured(adoa(vectors[m], vectors[p]));
                pair.plane_adoa = plane_adoas(&proj[m], &proj[p]).map(Observed::Measured);
            }
        }
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edge(&self, m: usize) -> &EdgeObservation<T> {
        &self.edges[m]
    }

    pub fn edge_mut(&mut self, m: usize) -> &mut EdgeObservation<T> {
        &mut self.edges[m]
    }

    pub fn pair(&self, m: usize, p: usize) -> &PairObservation<T> {
        &self.pairs[pair_index(m, p, self.edges.len())]
    }

    pub fn pair_mut(&mut self, m: usize, p: usize) -> &mut PairObservation<T> {
        let n = self.edges.len();
        &mut self.pairs[pair_index(m, p, n)]
    }

    fn distance(&self, m: usize) -> Result<T, KernelError> {
        self.edges[m].d.require("d", || format!("edge {m}"))
    }
}

/// Quaternion model of `ν_m·conj(ν_p)` from the observed quantities of one pair.
pub fn pair_product<T: Scalar>(
    em: &EdgeObservation<T>,
    ep: &EdgeObservation<T>,
    pair: &PairObservation<T>,
) -> Result<Quaternion<T>, KernelError> {
    let at = || "pair".to_string();
    let (dm, dp) = match pair.d_pair {
        Some((a, b)) => (a, b),
        None => (em.d, ep.d),
    };
    let (pm, pp) = pair.plane_d_pair.unwrap_or((em.plane_d, ep.plane_d));
    let real = dm.require("d", at)? * dp.require("d", at)? * pair.adoa.require("adoa", at)?.cos();
    let mut imag = [T::zero(); 3];
    for k in 0..3 {
        let field = PLANES[k];
        let a = pm[k].require(field, at)?;
        let b = pp[k].require(field, at)?;
        let s = pair.plane_adoa[k].require(field, at)?.sin();
        imag[k] = -(a * b * s);
    }
    Ok(Quaternion::new(real, imag[0], imag[1], imag[2]))
}

/// Hermitian quaternion GEK: diagonal `d̃_m²`, upper triangle from [`pair_product`],
/// lower triangle its conjugate.
pub fn build_quat_gek<T: Scalar>(table: &ObservationTable<T>) -> Result<QuatMatrix<T>, KernelError> {
    let n = table.len();
    let mut k = QuatMatrix::zeros(n, n);
    for m in 0..n {
        let d = table.distance(m)?;
        k[(m, m)] = Quaternion::real(d * d);
        for p in m + 1..n {
            let q = pair_product(&table.edges[m], &table.edges[p], table.pair(m, p)).map_err(
                |e| match e {
                    KernelError::MissingField { field, .. } => KernelError::MissingField {
                        field,
                        at: format!("pair ({m}, {p})"),
                    },
                    other => other,
                },
            )?;
            k[(m, p)] = q;
            k[(p, m)] = q.conj();
        }
    }
    Ok(k)
}

/// Real GEK: `d̃_m d̃_p cos α̃_mp`, diagonal `d̃_m²`.
pub fn build_real_gek<T: Scalar>(table: &ObservationTable<T>) -> Result<RealMatrix<T>, KernelError> {
    let n = table.len();
    let d = (0..n)
        .map(|m| table.distance(m))
        .collect::<Result<Vec<_>, _>>()?;
    let mut k = RealMatrix::zeros(n, n);
    for m in 0..n {
        k[(m, m)] = d[m] * d[m];
        for p in m + 1..n {
            let pair = table.pair(m, p);
            let (dm, dp) = match pair.d_pair {
                Some((a, b)) => (
                    a.require("d", || format!("pair ({m}, {p})"))?,
                    b.require("d", || format!("pair ({m}, {p})"))?,
                ),
                None => (d[m], d[p]),
            };
            let a = pair
                .adoa
                .require("adoa", || format!("pair ({m}, {p})"))?;
            let v = dm * dp * a.cos();
            k[(m, p)] = v;
            k[(p, m)] = v;
        }
    }
    Ok(k)
}

/// A kernel of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelMatrix<T> {
    Real(RealMatrix<T>),
    Quaternion(QuatMatrix<T>),
}

impl<T: Scalar> KernelMatrix<T> {
    pub fn size(&self) -> usize {
        match self {
            KernelMatrix::Real(k) => k.rows(),
            KernelMatrix::Quaternion(k) => k.rows(),
        }
    }

    pub fn frobenius_norm(&self) -> T {
        match self {
            KernelMatrix::Real(k) => k.frobenius_norm(),
            KernelMatrix::Quaternion(k) => k.frobenius_norm(),
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        match self {
            KernelMatrix::Real(k) => (0..k.rows()).map(|i| k[(i, i)]).collect(),
            KernelMatrix::Quaternion(k) => (0..k.rows()).map(|i| k[(i, i)].w).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgeom::coords_to_quat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type Q = Quaternion<f64>;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn project_axis_and_diagonal() {
        let p = project_edge([1.0, 0.0, 0.0]).unwrap();
        assert_eq!((p.d, p.plane_d, p.theta, p.phi), (1.0, [1.0, 1.0, 0.0], 0.0, 0.0));
        let p = project_edge([1.0, 1.0, 1.0]).unwrap();
        let s2 = 2f64.sqrt();
        assert!(close(p.d, 3f64.sqrt()));
        assert!(p.plane_d.iter().all(|&x| close(x, s2)));
        assert!(close(p.theta, (1.0 / 3f64.sqrt()).asin()));
        assert!(close(p.phi, std::f64::consts::FRAC_PI_4));
        assert_eq!(project_edge([0.0; 3]), Err(KernelError::ZeroEdge(0)));
    }

    #[test]
    fn angles_to_planes() {
        let p = derive_plane_quantities_from_angles(2.0, 0.0, 0.0).unwrap();
        assert_eq!(p.plane_d, [2.0, 2.0, 0.0]);
        let p = derive_plane_quantities_from_angles(3.0, std::f64::consts::FRAC_PI_2, 0.7).unwrap();
        assert!(p.d_xy() < 1e-15 && close(p.d_xz(), 3.0) && close(p.d_yz(), 3.0));
        assert!(derive_plane_quantities_from_angles(0.0, 0.1, 0.1).is_err());
    }

    #[test]
    fn orthogonal_unit_pair() {
        let t = ObservationTable::exact(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        let q = pair_product(t.edge(0), t.edge(1), t.pair(0, 1)).unwrap();
        assert!((q - Q::new(0.0, -1.0, 0.0, 0.0)).norm() < 1e-15);
        let k = build_real_gek(&t).unwrap();
        assert!(k.sub(&RealMatrix::identity(2)).max_abs() < 1e-15);
    }

    #[test]
    fn self_product_is_squared_norm() {
        let v = [1.0, -2.0, 0.5];
        let pr = project_edge(v).unwrap();
        let e = EdgeObservation {
            d: Observed::Measured(pr.d),
            plane_d: pr.plane_d.map(Observed::Measured),
        };
        let pair = PairObservation {
            adoa: Observed::Measured(0.0),
            plane_adoa: [Observed::Measured(0.0); 3],
            ..Default::default()
        };
        let q = pair_product(&e, &e, &pair).unwrap();
        assert!((q - Q::real(5.25)).norm() < 1e-12);
    }

    #[test]
    fn missing_field_is_reported() {
        let mut t = ObservationTable::exact(&[[1.0, 0.0, 0.0], [0.0, 1.0, 2.0]]).unwrap();
        t.pair_mut(0, 1).plane_adoa[1] = Observed::Absent;
        assert!(matches!(
            build_quat_gek(&t),
            Err(KernelError::MissingField { field: "xz", .. })
        ));
        assert!(build_real_gek(&t).is_ok());
        t.edge_mut(1).d = Observed::Absent;
        assert!(build_real_gek(&t).is_err());
    }

    #[test]
    fn single_edge() {
        let t = ObservationTable::exact(&[[0.0, 3.0, 4.0]]).unwrap();
        let k = build_quat_gek(&t).unwrap();
        assert_eq!(k.shape(), (1, 1));
        assert!(close(k[(0, 0)].w, 25.0));
    }

    #[test]
    fn pair_index_is_dense() {
        let n = 7;
        let mut seen = vec![false; n * (n - 1) / 2];
        for m in 0..n {
            for p in m + 1..n {
                let i = pair_index(m, p, n);
                assert!(!seen[i]);
                seen[i] = true;
            }
        }
        assert!(seen.into_iter().all(|s| s));
    }

    #[test]
    fn random_pairs_match_quaternion_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..500 {
            let mut v = || [0; 3].map(|_| rng.random_range(-20.0f64..20.0));
            let (a, b) = (v(), v());
            let t = ObservationTable::exact(&[a, b]).unwrap();
            let q = pair_product(t.edge(0), t.edge(1), t.pair(0, 1)).unwrap();
            let want = coords_to_quat(a) * coords_to_quat(b).conj();
            assert!((q - want).norm() < 1e-12 * want.norm().max(1.0));
            let pa = project_edge(a).unwrap();
            let back = derive_plane_quantities_from_angles(pa.d, pa.theta, pa.phi).unwrap();
            for k in 0..3 {
                assert!((back.plane_d[k] - pa.plane_d[k]).abs() < 1e-12 * pa.d);
                let dpsi = (back.plane_psi[k] - pa.plane_psi[k]).sin().abs();
                assert!(dpsi < 1e-12 || pa.plane_d[k] < 1e-9);
            }
            assert!((pa.plane_d[0].powi(2) + a[2] * a[2] - pa.d * pa.d).abs() < 1e-9);
        }
    }
}
