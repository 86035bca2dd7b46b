//! Feature-selection and regression benchmarking on tabular data, built from
//! first principles: univariate scoring (F statistic, mutual information,
//! chi-squared), PCA, recursive feature elimination, selector ensembles,
//! four regressors (OLS, Ridge, Lasso, random forest), leakage-safe
//! cross-validation, and deterministic report rendering.
//!
//! Start with the runnable examples (`cargo run --release --example ...`) or
//! the `selreg` binary's `run` / `generate` / `score` subcommands. The
//! typical flow:
//!
//! 1. build a [`data::Dataset`] from CSV or a synthetic generator,
//! 2. describe a pipeline with [`eval::EnsembleSpec`] and
//!    [`eval::RegressorSpec`],
//! 3. run [`eval::cross_validate`] or a full grid via
//!    [`experiment::run_experiment`],
//! 4. render artifacts with [`report`].
//!
//! Every stochastic step draws from a seeded xoshiro256++ stream, so equal
//! seeds give byte-identical results.

#![allow(clippy::needless_range_loop)]

pub mod config;
pub mod data;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod linalg;
pub mod regress;
pub mod report;
mod rng;
pub mod selection;

pub use error::{Error, Result};
