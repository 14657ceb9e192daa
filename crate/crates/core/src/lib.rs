//! Non-negative matrix factorization with a permutation step that reconciles
//! weight-based and elastic-distance-based clustering, indirectly shrinking
//! the volume of the score matrix. Also provides volume-based rank
//! estimation, elastic-distance clustering, and a separable synthetic data
//! generator with known ground truth.
//!
//! Entry points:
//! - [`solver::fit`] / [`permute::permuted_fit`] — fit a model, with or
//!   without the per-iteration permutation step.
//! - [`elastic::cluster`] — label samples by largest weight or smallest
//!   elastic distance.
//! - [`rank_scan::scan`] — volume scree over a range of candidate ranks.
//! - [`synth::generate`] — ground-truth datasets for validation.

pub mod elastic;
pub mod error;
mod linalg;
pub mod matrix;
pub mod model;
pub mod permute;
pub mod rank_scan;
pub mod solver;
pub mod synth;

pub use elastic::{cluster, elastic_distances, ClusterAssignment, ClusterRule, ElasticDistances};
pub use error::{Error, Result};
pub use matrix::DenseMatrix;
pub use model::{FactorModel, ScalingScheme};
pub use permute::{permuted_fit, stabilize, PermuteConfig, StabilizedScores};
pub use rank_scan::{component_volume, scan, ScanOptions, VolumeReport};
pub use solver::{fit, Algorithm, FitReport, InitMethod, SolverConfig};
pub use synth::{generate, oracle_coordinates, ArchetypeSpec, SynthDataset, SynthSpec};
