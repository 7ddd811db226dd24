//! The pushed beta distribution and contaminated binary sampling.
//!
//! A pushed beta distribution is a beta distribution with an extra
//! multiplicative kernel term that shifts mass toward one side of the unit
//! interval: `(1 - x*phi)^gamma` for a left push, `(1 - phi + x*phi)^gamma`
//! for a right push. The family is conjugate for binary data observed
//! through a known contamination mechanism (randomized-response style
//! surveys), which is where it earns its keep.
//!
//! The crate provides:
//!
//! * [`quadrature`] - the underflow-resistant log-integral engine used by
//!   everything else (adaptive Gauss-Kronrod with a beta-quantile midpoint
//!   fallback that survives shape parameters in the thousands);
//! * [`distribution`] - parameters, pdf/cdf/quantile/sampling, moments,
//!   expected-log functionals and entropy;
//! * [`shape`] - density shape classification, modes and highest-density
//!   regions via quadratic sign analysis of the log-density slope;
//! * [`inference`] - the two contaminated binary models, conjugate posterior
//!   updates, KL divergence profiles and consistency simulation;
//! * [`fitting`] - log-likelihood, score and maximum-likelihood estimation
//!   for IID data on (0, 1).

pub mod distribution;
mod error;
pub mod fitting;
pub mod inference;
pub mod quadrature;
pub mod shape;
pub mod special;

pub use distribution::{Direction, ExpectedLogs, PushBeta, PushBetaParams};
pub use error::Error;
pub use fitting::{FitConfig, FitResult, Score};
pub use inference::{BinarySample, KlProfile, ModelVariant, TrajectoryRecord};
pub use quadrature::{LogIntegralRequest, QuadratureConfig, QuadratureMode, WeightSide};
pub use shape::{Classification, CriticalKind, HdrRegion, ShapeReport};

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
