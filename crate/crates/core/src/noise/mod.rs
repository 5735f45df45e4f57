//! Measurement noise: Gamma ranging errors, Tikhonov angle errors and seeded
//! random streams.

mod gamma;
mod rng;
mod tikhonov;

pub use gamma::{distance_gamma_params, sample_gamma, sample_gamma_distance};
pub use rng::{splitmix64, Purpose, RngStream};
pub use tikhonov::{
    adaptive_simpson, bessel_i0e, calibrate_rho, central_mass, sample_offset,
    sample_tikhonov_angle, tikhonov_pdf, wrap_pi, CENTRAL_MASS, MAX_EPSILON_DEG,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("distance must be positive and finite, got {0}")]
    ZeroDistance(f64),
    #[error("distance standard deviation must be non-negative and finite, got {0}")]
    InvalidSigma(f64),
    #[error("bounding angle {0}° is outside (0°, 162°)")]
    OutOfRange(f64),
}

/// Noise level of one sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    /// Ranging standard deviation in meters.
    pub sigma_d: f64,
    /// Central 90% bounding angle in degrees. Zero means exact angles.
    pub epsilon: f64,
    /// Tikhonov concentration; infinite when `epsilon` is zero.
    pub rho: f64,
}

impl NoiseParams {
    pub fn new(sigma_d: f64, epsilon: f64) -> Result<Self, NoiseError> {
        if !(sigma_d >= 0.0) || !sigma_d.is_finite() {
            return Err(NoiseError::InvalidSigma(sigma_d));
        }
        let rho = if epsilon == 0.0 {
            f64::INFINITY
        } else {
            calibrate_rho(epsilon)?
        };
        Ok(Self {
            sigma_d,
            epsilon,
            rho,
        })
    }

    pub fn noiseless() -> Self {
        Self {
            sigma_d: 0.0,
            epsilon: 0.0,
            rho: f64::INFINITY,
        }
    }

    pub fn distance<R: rand::Rng + ?Sized>(&self, d: f64, rng: &mut R) -> Result<f64, NoiseError> {
        sample_gamma_distance(d, self.sigma_d, rng)
    }

    pub fn angle<R: rand::Rng + ?Sized>(&self, theta: f64, rng: &mut R) -> f64 {
        sample_tikhonov_angle(theta, self.rho, rng)
    }
}
