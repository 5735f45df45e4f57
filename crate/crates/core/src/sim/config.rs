use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::SimError;
use crate::solver::Scenario;

/// Everything that determines a simulation run.
///
/// Read from flat TOML; every key is optional and falls back to the room
/// experiment (30×30×10 m, four ceiling-corner anchors plus the origin, 15 targets).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Room extent along x, y, z in meters; targets are uniform inside it.
    pub room: [f64; 3],
    pub anchors: Vec<[f64; 3]>,
    pub n_targets: usize,
    /// 1 or 2.
    pub scenario: u8,
    pub sigma_d: Vec<f64>,
    /// Degrees.
    pub epsilon: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    pub procrustes: bool,
    pub distance_redraw_per_pair: bool,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            room: [30.0, 30.0, 10.0],
            anchors: vec![
                [0.0, 0.0, 10.0],
                [30.0, 0.0, 10.0],
                [30.0, 30.0, 10.0],
                [0.0, 30.0, 10.0],
                [0.0, 0.0, 0.0],
            ],
            n_targets: 15,
            scenario: 1,
            sigma_d: default_sigma_grid(),
            epsilon: vec![10.0, 20.0, 30.0, 40.0, 50.0],
            trials: 500,
            seed: 1,
            workers: 0,
            procrustes: false,
            distance_redraw_per_pair: false,
            out_dir: PathBuf::from("out"),
        }
    }
}

/// 0.2, 0.4, …, 3.0 m.
pub fn default_sigma_grid() -> Vec<f64> {
    (1..=15).map(|k| (k as f64 * 0.2 * 10.0).round() / 10.0).collect()
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, SimError> {
        let cfg: Self = toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SimError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn scenario(&self) -> Result<Scenario, SimError> {
        Scenario::from_number(self.scenario)
            .ok_or_else(|| SimError::Config(format!("scenario must be 1 or 2, got {}", self.scenario)))
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::Config(msg));
        self.scenario()?;
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.sigma_d.is_empty() || self.epsilon.is_empty() {
            return bad("sigma_d and epsilon lists must be non-empty".into());
        }
        if let Some(s) = self.sigma_d.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
            return bad(format!("sigma_d values must be finite and non-negative, got {s}"));
        }
        if let Some(e) = self
            .epsilon
            .iter()
            .find(|e| !(**e >= 0.0 && **e < crate::noise::MAX_EPSILON_DEG))
        {
            return bad(format!("epsilon values must lie in [0, 162) degrees, got {e}"));
        }
        if self.anchors.len() < 4 {
            return bad(format!("at least 4 anchors are required, got {}", self.anchors.len()));
        }
        if self.n_targets == 0 {
            return bad("n_targets must be at least 1".into());
        }
        if self.room.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return bad("room dimensions must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid() {
        let g = default_sigma_grid();
        assert_eq!(g.len(), 15);
        assert_eq!(g[0], 0.2);
        assert_eq!(g[4], 1.0);
        assert_eq!(g[14], 3.0);
    }

    #[test]
    fn partial_toml_keeps_defaults() {
        let cfg = ExperimentConfig::from_toml_str("scenario = 2\ntrials = 7\nepsilon = [40.0]\n").unwrap();
        assert_eq!(cfg.scenario, 2);
        assert_eq!(cfg.trials, 7);
        assert_eq!(cfg.anchors.len(), 5);
        let back = ExperimentConfig::from_toml_str(&cfg.to_toml_string()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn rejects_bad_values() {
        for text in [
            "scenario = 3",
            "trials = 0",
            "sigma_d = []",
            "epsilon = [170.0]",
            "sigma_d = [-1.0]",
            "anchors = [[0.0, 0.0, 0.0]]",
            "unknown_key = 1",
        ] {
            assert!(ExperimentConfig::from_toml_str(text).is_err(), "{text}");
        }
    }
}
