use std::fmt;

use crate::kernel::{
    adoa, build_quat_gek, build_real_gek, derive_plane_quantities_from_angles, pair_index,
    plane_adoas, project_edge, EdgeObservation, KernelError, ObservationTable, Observed, PairObservation,
};
use crate::netgeom::{NetworkLayout, Point3, TrueEdges};
use crate::noise::{NoiseError, NoiseParams, Purpose, RngStream};
use crate::scalar::Scalar;

use super::{qdsmds_estimate, smds_estimate, EstimateResult, EstimationContext, SolverError};

/// Which quantities feed the imaginary parts of the quaternion kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    /// Distances and 3D ADoAs only; plane quantities come from a first SMDS pass.
    One,
    /// Elevation and azimuth are measured too, so plane quantities are observed.
    Two,
}

impl Scenario {
    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Scenario::One),
            2 => Some(Scenario::Two),
            _ => None,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Scenario::One => 1,
            Scenario::Two => 2,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScenarioOptions {
    /// Draw a fresh pair of distances for every kernel entry instead of once per edge.
    pub distance_redraw_per_pair: bool,
}

/// Random streams of one trial, one per measurement kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialStreams {
    base: RngStream,
}

impl TrialStreams {
    pub fn new(master_seed: u64, point: u64, trial: u64) -> Self {
        Self {
            base: RngStream::new(master_seed, point, trial, Purpose::Distance),
        }
    }

    pub fn stream(&self, purpose: Purpose) -> RngStream {
        self.base.with_purpose(purpose)
    }
}

/// Noisy distances and ADoAs shared by both scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurements {
    /// One distance per edge.
    pub d: Vec<f64>,
    /// One 3D ADoA per unordered pair, packed upper triangle.
    pub adoa: Vec<f64>,
    /// Per-pair distance redraws, when enabled.
    pub pair_d: Option<Vec<(f64, f64)>>,
}

fn to_f64(p: Point3<impl Scalar>) -> [f64; 3] {
    p.map(|c| c.to_f64_lossy())
}

pub fn draw_measurements(
    vectors: &[[f64; 3]],
    noise: &NoiseParams,
    streams: &TrialStreams,
    opts: &ScenarioOptions,
) -> Result<Measurements, NoiseError> {
    let n = vectors.len();
    let lengths: Vec<f64> = vectors
        .iter()
        .map(|v| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt())
        .collect();
    let mut rng = streams.stream(Purpose::Distance).rng();
    let d = lengths
        .iter()
        .map(|&l| noise.distance(l, &mut rng))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rng = streams.stream(Purpose::Adoa).rng();
    let mut angles = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for m in 0..n {
        for p in m + 1..n {
            angles.push(noise.angle(adoa(vectors[m], vectors[p]), &mut rng));
        }
    }
    let pair_d = if opts.distance_redraw_per_pair {
        let mut rng = streams.stream(Purpose::PairDistance).rng();
        let mut out = Vec::with_capacity(angles.len());
        for m in 0..n {
            for p in m + 1..n {
                out.push((
                    noise.distance(lengths[m], &mut rng)?,
                    noise.distance(lengths[p], &mut rng)?,
                ));
            }
        }
        Some(out)
    } else {
        None
    };
    Ok(Measurements {
        d,
        adoa: angles,
        pair_d,
    })
}

/// Observation table holding the measured distances and ADoAs; plane fields empty.
fn base_table<T: Scalar>(meas: &Measurements) -> ObservationTable<T> {
    let n = meas.d.len();
    let edges = meas
        .d
        .iter()
        .map(|&d| EdgeObservation {
            d: Observed::Measured(T::lit(d)),
            ..Default::default()
        })
        .collect();
    let pairs = meas
        .adoa
        .iter()
        .enumerate()
        .map(|(i, &a)| PairObservation {
            adoa: Observed::Measured(T::lit(a)),
            d_pair: meas.pair_d.as_ref().map(|pd| {
                (Observed::Measured(T::lit(pd[i].0)), Observed::Measured(T::lit(pd[i].1)))
            }),
            ..Default::default()
        })
        .collect();
    debug_assert_eq!(meas.adoa.len(), n * n.saturating_sub(1) / 2);
    ObservationTable::from_parts(edges, pairs).expect("packed pair count")
}

/// Both estimates of one trial. A failed estimator does not abort the other.
#[derive(Debug, Clone)]
pub struct TrialOutcome<T> {
    pub smds: Result<EstimateResult<T>, SolverError>,
    pub qdsmds: Result<EstimateResult<T>, SolverError>,
}

fn vectors_f64<T: Scalar>(truth: &TrueEdges<T>) -> Vec<[f64; 3]> {
    (0..truth.quats.len()).map(|m| to_f64(truth.vector(m))).collect()
}

/// Scenario I: SMDS from distances and ADoAs, then QD-SMDS on a quaternion kernel whose
/// real parts are measured and whose `i`, `j`, `k` parts take their angles from the
/// SMDS geometry.
pub fn scenario1_pipeline<T: Scalar>(
    ctx: &EstimationContext<T>,
    truth: &TrueEdges<T>,
    noise: &NoiseParams,
    streams: &TrialStreams,
    opts: &ScenarioOptions,
) -> Result<TrialOutcome<T>, SolverError> {
    let meas = draw_measurements(&vectors_f64(truth), noise, streams, opts)?;
    let mut table = base_table::<T>(&meas);
    let smds = build_real_gek(&table)
        .map_err(SolverError::from)
        .and_then(|k| smds_estimate(&k, ctx));
    let qdsmds = match &smds {
        Ok(est) => {
            fill_estimated_planes(&mut table, ctx, &est.x_hat).and_then(|()| {
                let k = build_quat_gek(&table)?;
                qdsmds_estimate(&k, ctx)
            })
        }
        Err(e) => Err(SolverError::Upstream(e.to_string())),
    };
    Ok(TrialOutcome { smds, qdsmds })
}

/// Elevation and azimuth of a vector; a zero vector gets both angles zero.
fn direction(v: [f64; 3]) -> (f64, f64) {
    let [a, b, c] = v;
    (c.atan2(a.hypot(b)), b.atan2(a))
}

/// Scenario I plane fields: directions come from the SMDS coordinates, lengths from
/// the measured distances along those directions.
fn fill_estimated_planes<T: Scalar>(
    table: &mut ObservationTable<T>,
    ctx: &EstimationContext<T>,
    x_targets: &crate::quatlin::RealMatrix<T>,
) -> Result<(), SolverError> {
    let na = ctx.anchors.len();
    let node = |i: usize| -> [f64; 3] {
        if i < na {
            to_f64(ctx.anchors[i])
        } else {
            [0, 1, 2].map(|c| x_targets[(i - na, c)].to_f64_lossy())
        }
    };
    let geo = ctx
        .edges
        .pairs()
        .iter()
        .enumerate()
        .map(|(m, &(i, j))| {
            let (a, b) = (node(i), node(j));
            let (theta, phi) = direction([a[0] - b[0], a[1] - b[1], a[2] - b[2]]);
            let d = table.edge(m).d.value().expect("distance is measured").to_f64_lossy();
            derive_plane_quantities_from_angles(d, theta, phi).map_err(|_| KernelError::ZeroEdge(m))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let n = geo.len();
    for (m, g) in geo.iter().enumerate() {
        table.edge_mut(m).plane_d = g.plane_d.map(|x| Observed::Estimated(T::lit(x)));
    }
    for m in 0..n {
        for p in m + 1..n {
            table.pair_mut(m, p).plane_adoa =
                plane_adoas(&geo[m], &geo[p]).map(|x| Observed::Estimated(T::lit(x)));
        }
    }
    Ok(())
}

/// Scenario II: every kernel entry gets its own noisy elevation and azimuth for both
/// edges, from which that entry's plane lengths and plane ADoAs are derived.
pub fn scenario2_pipeline<T: Scalar>(
    ctx: &EstimationContext<T>,
    truth: &TrueEdges<T>,
    noise: &NoiseParams,
    streams: &TrialStreams,
    opts: &ScenarioOptions,
) -> Result<TrialOutcome<T>, SolverError> {
    let vectors = vectors_f64(truth);
    let meas = draw_measurements(&vectors, noise, streams, opts)?;
    let mut table = base_table::<T>(&meas);
    let smds = build_real_gek(&table)
        .map_err(SolverError::from)
        .and_then(|k| smds_estimate(&k, ctx));

    let n = vectors.len();
    let dirs = vectors
        .iter()
        .enumerate()
        .map(|(m, &v)| {
            project_edge(v)
                .map(|p| (p.theta, p.phi))
                .map_err(|_| KernelError::ZeroEdge(m))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut rng = streams.stream(Purpose::PlaneAngles).rng();
    for m in 0..n {
        for p in m + 1..n {
            let idx = pair_index(m, p, n);
            let (dm, dp) = match &meas.pair_d {
                Some(pd) => pd[idx],
                None => (meas.d[m], meas.d[p]),
            };
            let (tm, fm) = dirs[m];
            let (tp, fp) = dirs[p];
            let tm = noise.angle(tm, &mut rng);
            let fm = noise.angle(fm, &mut rng);
            let tp = noise.angle(tp, &mut rng);
            let fp = noise.angle(fp, &mut rng);
            let gm = derive_plane_quantities_from_angles(dm, tm, fm)
                .map_err(|_| KernelError::ZeroEdge(m))?;
            let gp = derive_plane_quantities_from_angles(dp, tp, fp)
                .map_err(|_| KernelError::ZeroEdge(p))?;
            let pair = table.pair_mut(m, p);
            pair.plane_d_pair = Some((
                gm.plane_d.map(|x| Observed::Measured(T::lit(x))),
                gp.plane_d.map(|x| Observed::Measured(T::lit(x))),
            ));
            pair.plane_adoa =
                [0, 1, 2].map(|k| Observed::Measured(T::lit(gp.plane_psi[k] - gm.plane_psi[k])));
        }
    }
    let qdsmds = build_quat_gek(&table)
        .map_err(SolverError::from)
        .and_then(|k| qdsmds_estimate(&k, ctx));
    Ok(TrialOutcome { smds, qdsmds })
}

/// One trial of either scenario on a fresh context; convenient for single runs.
pub fn run_scenario<T: Scalar>(
    scenario: Scenario,
    layout: &NetworkLayout<T>,
    noise: &NoiseParams,
    streams: &TrialStreams,
    opts: &ScenarioOptions,
    procrustes: bool,
) -> Result<TrialOutcome<T>, SolverError> {
    let truth = crate::netgeom::true_edges(layout, &layout.edges());
    let ctx = EstimationContext::new(layout, &truth)?.with_procrustes(procrustes);
    match scenario {
        Scenario::One => scenario1_pipeline(&ctx, &truth, noise, streams, opts),
        Scenario::Two => scenario2_pipeline(&ctx, &truth, noise, streams, opts),
    }
}
