//! Landscape analysis for constrained multi-objective optimisation problems.
//!
//! The crate samples problems, extracts global and random-walk landscape
//! features over the multi-objective, violation and multi-objective-violation
//! landscapes, ingests algorithm performance data and projects instances into
//! a two-dimensional instance space.

pub mod dominance;
pub mod error;
pub mod features;
pub mod indicators;
pub mod par;
pub mod pipeline;
pub mod problem;
pub mod sample_file;
pub mod sampling;
pub mod stats;

pub use error::{Error, Result};
