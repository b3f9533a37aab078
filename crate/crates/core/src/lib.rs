//! Supervised enhanced soft subspace clustering (SESSC) and TSK fuzzy
//! classifiers built on top of it.
//!
//! The crate is organised around the experiment pipeline:
//!
//! - [`dataset`]: table loading, z-score normalisation, splits and the
//!   synthetic 2-D generators.
//! - [`clustering`]: the alternating-minimisation solver shared by FCM,
//!   EWFCM, ESSC and SESSC, plus the SESSC standalone classifier.
//! - [`tsk`]: Gaussian-antecedent TSK classifiers with ridge least-squares
//!   consequents.
//! - [`metrics`]: raw and balanced classification accuracy.
//! - [`harness`]: grid-searched cross validation, multi-split benchmarks,
//!   sweeps and decision-grid export.

pub mod clustering;
pub mod dataset;
mod error;
pub mod harness;
pub mod metrics;
pub mod tsk;

pub use error::{Error, Result};
