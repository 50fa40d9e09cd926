//! Attribution engine for weighted naive Bayes classifiers over discretized
//! tabular data.
//!
//! The pipeline: [`data`] loads and types CSV datasets, [`preprocess`] turns
//! each feature into a small set of parts, [`model`] fits the weighted naive
//! Bayes classifier, and [`explain`] computes exact per-instance Shapley and
//! Weight-of-Evidence attributions from the fitted tables in time linear in
//! the number of parts. [`oracle`] provides independent verification routes
//! (exhaustive coalition enumeration, posterior deprivation, and a seeded
//! sampling estimator) and [`metrics`] measures agreement between methods.

pub mod data;
pub mod error;
pub mod explain;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod preprocess;
pub mod synthetic;

pub use error::{Error, Result};
