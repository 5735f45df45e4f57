//! SMDS and QD-SMDS estimators, coordinate recovery and the two measurement
//! scenarios.

mod coords;
mod estimate;
mod scenario;

pub use coords::{error_metric, procrustes_align, recover_coords, CoordinateSolver};
pub use estimate::{
    fix_quaternion_gauge, qdsmds_estimate, smds_estimate, Diagnostics, EstimateResult,
    EstimationContext,
};
pub use scenario::{
    draw_measurements, scenario1_pipeline, scenario2_pipeline, run_scenario, Measurements,
    Scenario, ScenarioOptions, TrialOutcome, TrialStreams,
};

use thiserror::Error;

use crate::kernel::KernelError;
use crate::noise::NoiseError;
use crate::quatlin::EigenError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("real kernel has only {0} positive leading eigenvalues")]
    RankDeficient(usize),
    #[error("gauge reference is degenerate")]
    DegenerateGauge,
    #[error("Procrustes reference points are degenerate")]
    DegenerateReference,
    #[error("anchored recovery system is singular")]
    SingularSystem,
    #[error("estimate is not finite")]
    NonFinite,
    #[error("real-domain estimate unavailable: {0}")]
    Upstream(String),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Noise(#[from] NoiseError),
}

impl SolverError {
    /// Short machine-friendly reason for CSV output.
    pub fn reason(&self) -> &'static str {
        match self {
            SolverError::RankDeficient(_) => "rank_deficient",
            SolverError::DegenerateGauge => "degenerate_gauge",
            SolverError::DegenerateReference => "degenerate_reference",
            SolverError::SingularSystem => "singular_system",
            SolverError::NonFinite => "non_finite",
            SolverError::Upstream(_) => "upstream",
            SolverError::Eigen(EigenError::NoConvergence { .. }) => "no_convergence",
            SolverError::Eigen(_) => "eigen",
            SolverError::Kernel(_) => "kernel",
            SolverError::Noise(_) => "noise",
        }
    }
}
