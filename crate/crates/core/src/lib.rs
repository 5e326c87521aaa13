//! StationPlot: successive-difference embeddings of time series, convex hull
//! geometry descriptors measured on them, and the statistical and kernel-SVM
//! machinery used to evaluate those descriptors as seizure biomarkers on EEG.
//!
//! The typical flow is
//! [`ingest`] → [`timeseries`] → [`embedding`] → [`geometry`] → [`stats`] /
//! [`svm`] + [`eval`], with [`plot`] rendering figures and [`pipeline`]
//! wiring everything behind a single configuration.

// `!(x > 0.0)` is used on purpose so that NaN takes the error path
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod embedding;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod ingest;
pub mod pipeline;
pub mod plot;
pub mod stats;
pub mod svm;
pub mod timeseries;

pub use error::{Error, ErrorKind, Result};
