//! Experiment harness for the warped-product Ricci flow laboratory.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod config;
pub mod error;
pub mod experiment;
pub mod hypotheses;
pub mod plot;
pub mod suites;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::{LabError, Result};
