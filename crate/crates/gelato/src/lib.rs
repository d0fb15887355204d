//! Sparse Gaussian graphical model and covariance estimation.
//!
//! The estimator works in two stages. First the conditional independence
//! graph is inferred by running an l1-penalized regression of every
//! variable on all others, thresholding the coefficients, and joining the
//! survivors with an OR rule. Second, the precision and covariance
//! matrices are refit by maximum likelihood constrained to the zero
//! pattern of the selected graph, so the estimate matches the sample
//! moments on the selected edges and the diagonal exactly.
//!
//! The crate also ships the simulation models, cross-validation tuning,
//! error metrics, and sparsity diagnostics used to evaluate the estimator,
//! plus a command-line interface (`estimate`, `simulate`, `diagnose`).

pub mod cli;
pub mod data;
pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod lasso;
pub mod matrix;
pub mod metrics;
pub mod mle;
pub mod output;
pub mod simulate;
pub mod tuning;

pub use data::{sample_correlation, sample_covariance, DataSet};
pub use error::{GelatoError, Result};
pub use graph::{select_graph, EdgeRule, EdgeSet};
pub use matrix::{MatrixRole, SymMatrix};
pub use mle::{fit_constrained_mle, gelato_estimate, MleResult, Scale};
