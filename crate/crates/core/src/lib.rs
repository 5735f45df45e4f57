//! Anchored 3D localization by super multidimensional scaling, in the real domain
//! (rank-3 Gram edge kernel) and the quaternion domain (rank-1 edge kernel).

pub mod kernel;
pub mod netgeom;
pub mod noise;
pub mod quatlin;
pub mod scalar;
pub mod sim;
pub mod solver;

pub use scalar::{Entry, Field, Scalar};

/// Double precision aliases of the generic types.
pub type Quat = quatlin::Quaternion<f64>;
pub type QuatMatrix = quatlin::QuatMatrix<f64>;
pub type RealMatrix = quatlin::RealMatrix<f64>;
pub type Layout = netgeom::NetworkLayout<f64>;
pub type Estimate = solver::EstimateResult<f64>;
