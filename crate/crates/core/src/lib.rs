//! Two-sample testing for stochastic block models.
//!
//! Given two networks on a common node set, [`two_sample_test::run_two_sample_test`]
//! decides whether both were generated by the same stochastic block model. Each
//! network's community structure is estimated by spectral clustering (with the
//! number of communities picked by sequential one-sample tests), the two
//! estimated edge-probability matrices are combined by their geometric mean, and
//! the largest singular value of the resulting residual of `X + Y` is compared
//! with the Tracy-Widom law of index 1, optionally after a parametric bootstrap
//! recentering.
//!
//! [`sim`] reproduces the size and power studies at configurable scale.

pub mod community;
pub mod error;
pub mod graph_model;
pub mod kmeans;
pub mod linalg;
pub mod seed;
pub mod sim;
pub mod tracy_widom;

pub use error::{Error, Result};
pub use graph_model::{AdjacencyMatrix, BlockProbabilityMatrix, CommunityLabeling};
pub use two_sample_test::{run_two_sample_test, Decision, TestConfig, TestReport};
