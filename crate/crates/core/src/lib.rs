//! Next-day forecasting of stock index series with four learning paradigms
//! behind a common train/predict surface:
//!
//! - [`mlp`] + [`lm`]: a single-hidden-layer tanh network trained by
//!   Levenberg-Marquardt on the sum-of-squares error.
//! - [`svm`]: kernel machines solved in the dual by pairwise coordinate
//!   optimization (soft-margin classification and epsilon-insensitive
//!   regression).
//! - [`anfis`]: a first-order Takagi-Sugeno fuzzy system with hybrid
//!   least-squares / gradient learning and an online forgetting-factor mode.
//! - [`dbnn`]: a discretized naive-Bayes classifier whose likelihood weights
//!   are boosted on misclassified examples, with a regression adapter.
//!
//! [`dataio`] turns dated OHLC records into scaled supervised pairs,
//! [`metrics`] implements RMSE / MAP / MAPE / correlation, and [`harness`]
//! runs whole experiments and writes reports.
//!
//! Runnable walkthroughs live in `examples/`; `cargo run --example` lists them.

pub mod anfis;
pub mod dataio;
pub mod dbnn;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod lm;
pub mod metrics;
pub mod mlp;
pub mod svm;

pub use error::{Error, Result};
