//! Sparse linear ordinal regression toolkit.
//!
//! The centerpiece is a nonparallel-hyperplane ordinal regression model
//! trained by dual coordinate descent, with two interchangeable trainers,
//! two rank predictors, three linear baselines (one-vs-all SVC,
//! ε-insensitive SVR with ordinal rounding, threshold reduction to binary
//! SVC), a text-to-sparse-features pipeline, evaluation/cross-validation
//! machinery and a benchmark harness. Everything is deterministic given the
//! seeds carried in the configuration types.

pub mod baselines;
pub mod bench;
mod clock;
pub mod data;
pub mod dcd;
pub mod eval;
pub mod method;
pub mod model;
pub mod model_io;
pub mod rng;
pub mod text;
mod util;

#[cfg(feature = "test-util")]
pub mod testsupport;

pub use data::{DataError, RankDecomposition, SparseDataset, SparseVector};
pub use method::{AnyModel, Method};
pub use model::{Algorithm, OrdinalModel, Predictor, SolverConfig, SolverError};
pub use util::kahan_sum;
