//! Doubly-robust estimation of average treatment effects from observational
//! data: inverse-probability weighting, AIPW, targeted maximum-likelihood
//! estimation (TMLE), and collaborative TMLE with greedy or pre-ordered
//! covariate selection plus a cross-validated selector over pre-ordering
//! schemes. Ships with a parametric-bootstrap study harness, a runtime
//! scaling benchmark, and the deterministic assay-protocol treatment mapper.
//!
//! The numeric core is generic over the floating-point scalar ([`Scalar`]);
//! the aliases below pin the common `f64` instantiation.

pub mod bench;
pub mod ctmle;
mod error;
pub mod estimators;
pub mod glm;
pub mod scalar;
pub mod simulation;
pub mod special;
pub mod tabular;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// `f64` instantiations used by the command-line tools.
pub type Dataset64 = tabular::Dataset<f64>;
pub type GlmFit64 = glm::GlmFit<f64>;
pub type EstimateReport64 = estimators::EstimateReport<f64>;
pub type NuisanceFits64 = estimators::NuisanceFits<f64>;
pub type CtmleReport64 = ctmle::CtmleReport<f64>;
pub type DgpConfig64 = simulation::DgpConfig<f64>;
pub type StudyReport64 = simulation::StudyReport<f64>;

/// `f32` instantiations for memory-constrained callers.
pub type Dataset32 = tabular::Dataset<f32>;
pub type EstimateReport32 = estimators::EstimateReport<f32>;
