//! Monte Carlo driver: configuration, parallel sweeps, CSV tables and plots.

mod config;
mod output;
mod plot;
mod run;

pub use config::{default_sigma_grid, ExperimentConfig};
pub use output::{
    load_trials, read_summary_csv, read_trials_csv, save_tables, trials_to_string,
    write_summary_csv, write_trials_csv,
};
pub use plot::{emit_plots, figures, render_svg, Curve, Figure, EPSILONS_PER_PLOT};
pub use run::{
    point_key, run_experiment, single_trial, summarize, trial_layout, ExperimentOutput,
    PointSummary, TrialRecord, MAX_FAILURE_SHARE,
};

use thiserror::Error;

use crate::noise::{calibrate_rho, NoiseError};
use crate::solver::SolverError;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("dataset has nothing to plot")]
    EmptyDataset,
    #[error("plot rendering failed: {0}")]
    Plot(String),
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `(ε, ρ)` for each bounding angle in degrees.
pub fn calibration_table(epsilons: &[f64]) -> Result<Vec<(f64, f64)>, NoiseError> {
    epsilons.iter().map(|&e| Ok((e, calibrate_rho(e)?))).collect()
}
