use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, SimError};
use crate::netgeom::{true_edges, NetworkLayout, TrueEdges};
use crate::noise::{splitmix64, NoiseParams, Purpose, RngStream};
use crate::solver::{
    scenario1_pipeline, scenario2_pipeline, EstimateResult, EstimationContext, Scenario,
    ScenarioOptions, SolverError, TrialOutcome, TrialStreams,
};

/// One row of the per-trial dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub scenario: u8,
    pub epsilon: f64,
    pub sigma_d: f64,
    pub trial: usize,
    pub xi_smds: Option<f64>,
    pub xi_qdsmds: Option<f64>,
    /// `ok` or a failure reason.
    pub smds_status: String,
    pub qdsmds_status: String,
    /// Fourth over first eigenvalue of the real kernel.
    pub real_rank_leak: Option<f64>,
    /// Second over first singular value of the quaternion kernel.
    pub quat_rank_leak: Option<f64>,
    /// Share of the rank-1 factor's energy in the discarded `k` parts.
    pub k_energy: Option<f64>,
    pub gauge_residual_smds: Option<f64>,
    pub gauge_residual_qdsmds: Option<f64>,
}

/// Per-point aggregate over trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub scenario: u8,
    pub epsilon: f64,
    pub sigma_d: f64,
    pub trials: usize,
    pub failed_smds: usize,
    pub failed_qdsmds: usize,
    /// Absent when more than 1% of the trials failed.
    pub mean_smds: Option<f64>,
    pub std_smds: Option<f64>,
    pub mean_qdsmds: Option<f64>,
    pub std_qdsmds: Option<f64>,
}

impl PointSummary {
    /// `mean ξ(SMDS) − mean ξ(QD-SMDS)`; positive when QD-SMDS is better.
    pub fn gap(&self) -> Option<f64> {
        Some(self.mean_smds? - self.mean_qdsmds?)
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub records: Vec<TrialRecord>,
    pub summary: Vec<PointSummary>,
}

/// Largest tolerated failure share before a point's mean is withheld.
pub const MAX_FAILURE_SHARE: f64 = 0.01;

/// Stream key of a sweep point, from the values themselves so that a point draws the
/// same numbers whatever grid it sits in.
pub fn point_key(epsilon: f64, sigma_d: f64) -> u64 {
    splitmix64(splitmix64(epsilon.to_bits()) ^ sigma_d.to_bits())
}

/// Targets of trial `trial`, uniform in the room. Shared by every sweep point.
pub fn trial_layout(cfg: &ExperimentConfig, trial: usize) -> Result<NetworkLayout<f64>, SimError> {
    let mut rng = RngStream::new(cfg.seed, 0, trial as u64, Purpose::Layout).rng();
    let targets = (0..cfg.n_targets)
        .map(|_| cfg.room.map(|extent| rng.random_range(0.0..extent)))
        .collect();
    NetworkLayout::new(cfg.anchors.clone(), targets).map_err(|e| SimError::Config(e.to_string()))
}

struct TrialSetup {
    truth: TrueEdges<f64>,
    ctx: EstimationContext<f64>,
}

fn status(r: &Result<EstimateResult<f64>, SolverError>) -> String {
    match r {
        Ok(_) => "ok".into(),
        Err(e) => e.reason().into(),
    }
}

fn leak(spectrum: &[f64], k: usize) -> Option<f64> {
    let top = *spectrum.first()?;
    let v = *spectrum.get(k)?;
    (top > 0.0).then(|| v.abs() / top)
}

fn record(
    scenario: Scenario,
    noise: &NoiseParams,
    trial: usize,
    outcome: Result<TrialOutcome<f64>, SolverError>,
) -> TrialRecord {
    let mut rec = TrialRecord {
        scenario: scenario.number(),
        epsilon: noise.epsilon,
        sigma_d: noise.sigma_d,
        trial,
        xi_smds: None,
        xi_qdsmds: None,
        smds_status: String::new(),
        qdsmds_status: String::new(),
        real_rank_leak: None,
        quat_rank_leak: None,
        k_energy: None,
        gauge_residual_smds: None,
        gauge_residual_qdsmds: None,
    };
    match outcome {
        Err(e) => {
            rec.smds_status = e.reason().into();
            rec.qdsmds_status = e.reason().into();
        }
        Ok(out) => {
            rec.smds_status = status(&out.smds);
            rec.qdsmds_status = status(&out.qdsmds);
            if let Ok(s) = &out.smds {
                rec.xi_smds = Some(s.xi);
                rec.real_rank_leak = leak(&s.diagnostics.spectrum, 3);
                rec.gauge_residual_smds = Some(s.diagnostics.gauge_residual);
            }
            if let Ok(q) = &out.qdsmds {
                rec.xi_qdsmds = Some(q.xi);
                rec.quat_rank_leak = leak(&q.diagnostics.spectrum, 1);
                rec.k_energy = q.diagnostics.k_energy;
                rec.gauge_residual_qdsmds = Some(q.diagnostics.gauge_residual);
            }
        }
    }
    rec
}

fn sort_key(a: &TrialRecord, b: &TrialRecord) -> std::cmp::Ordering {
    a.scenario
        .cmp(&b.scenario)
        .then(a.epsilon.total_cmp(&b.epsilon))
        .then(a.sigma_d.total_cmp(&b.sigma_d))
        .then(a.trial.cmp(&b.trial))
}

/// Runs every `(ε, σ_d)` point for `trials` trials on `workers` threads. The result
/// does not depend on the worker count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, SimError> {
    cfg.validate()?;
    let scenario = cfg.scenario()?;
    let opts = ScenarioOptions {
        distance_redraw_per_pair: cfg.distance_redraw_per_pair,
    };
    let mut points = Vec::new();
    for &eps in &cfg.epsilon {
        for &sigma in &cfg.sigma_d {
            points.push(NoiseParams::new(sigma, eps)?);
        }
    }
    points.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon).then(a.sigma_d.total_cmp(&b.sigma_d)));
    points.dedup_by(|a, b| a.epsilon == b.epsilon && a.sigma_d == b.sigma_d);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| SimError::Config(e.to_string()))?;

    let records = pool.install(|| -> Result<Vec<TrialRecord>, SimError> {
        let setups = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let layout = trial_layout(cfg, t)?;
                let truth = true_edges(&layout, &layout.edges());
                let ctx = EstimationContext::new(&layout, &truth)
                    .map_err(|e| SimError::Config(e.to_string()))?
                    .with_procrustes(cfg.procrustes);
                Ok(TrialSetup { truth, ctx })
            })
            .collect::<Result<Vec<_>, SimError>>()?;
        let jobs: Vec<(usize, usize)> = (0..points.len())
            .flat_map(|p| (0..cfg.trials).map(move |t| (p, t)))
            .collect();
        Ok(jobs
            .into_par_iter()
            .map(|(p, t)| {
                let noise = &points[p];
                let setup = &setups[t];
                let streams = TrialStreams::new(
                    cfg.seed,
                    point_key(noise.epsilon, noise.sigma_d),
                    t as u64,
                );
                let outcome = match scenario {
                    Scenario::One => {
                        scenario1_pipeline(&setup.ctx, &setup.truth, noise, &streams, &opts)
                    }
                    Scenario::Two => {
                        scenario2_pipeline(&setup.ctx, &setup.truth, noise, &streams, &opts)
                    }
                };
                record(scenario, noise, t, outcome)
            })
            .collect())
    })?;
    let mut records = records;
    records.sort_by(sort_key);
    let summary = summarize(&records);
    Ok(ExperimentOutput { records, summary })
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

/// Per-point means and standard deviations over successful trials.
pub fn summarize(records: &[TrialRecord]) -> Vec<PointSummary> {
    let mut sorted: Vec<&TrialRecord> = records.iter().collect();
    sorted.sort_by(|a, b| sort_key(a, b));
    let mut out = Vec::new();
    for group in sorted.chunk_by(|a, b| {
        a.scenario == b.scenario && a.epsilon == b.epsilon && a.sigma_d == b.sigma_d
    }) {
        let first = group[0];
        let trials = group.len();
        let stats = |xs: Vec<f64>| {
            let failed = trials - xs.len();
            if xs.is_empty() || failed as f64 > MAX_FAILURE_SHARE * trials as f64 {
                (failed, None, None)
            } else {
                let (m, s) = mean_std(&xs);
                (failed, Some(m), Some(s))
            }
        };
        let (failed_smds, mean_smds, std_smds) = stats(group.iter().filter_map(|r| r.xi_smds).collect());
        let (failed_qdsmds, mean_qdsmds, std_qdsmds) =
            stats(group.iter().filter_map(|r| r.xi_qdsmds).collect());
        out.push(PointSummary {
            scenario: first.scenario,
            epsilon: first.epsilon,
            sigma_d: first.sigma_d,
            trials,
            failed_smds,
            failed_qdsmds,
            mean_smds,
            std_smds,
            mean_qdsmds,
            std_qdsmds,
        });
    }
    out
}

/// Runs one trial of one point, for inspection.
pub fn single_trial(
    cfg: &ExperimentConfig,
    sigma_d: f64,
    epsilon: f64,
    trial: usize,
) -> Result<(NetworkLayout<f64>, TrialOutcome<f64>), SimError> {
    cfg.validate()?;
    let noise = NoiseParams::new(sigma_d, epsilon)?;
    let layout = trial_layout(cfg, trial)?;
    let truth = true_edges(&layout, &layout.edges());
    let ctx = EstimationContext::new(&layout, &truth)
        .map_err(|e| SimError::Config(e.to_string()))?
        .with_procrustes(cfg.procrustes);
    let streams = TrialStreams::new(cfg.seed, point_key(epsilon, sigma_d), trial as u64);
    let opts = ScenarioOptions {
        distance_redraw_per_pair: cfg.distance_redraw_per_pair,
    };
    let outcome = match cfg.scenario()? {
        Scenario::One => scenario1_pipeline(&ctx, &truth, &noise, &streams, &opts),
        Scenario::Two => scenario2_pipeline(&ctx, &truth, &noise, &streams, &opts),
    }?;
    Ok((layout, outcome))
}
