//! Detect words whose meaning diverges across domains.
//!
//! Each domain corpus gets its own skip-gram embedding space. The spaces are
//! rotated into one unified space by alternating orthogonal Procrustes
//! solves with target averaging, and frequent content words shared by the
//! domains are ranked by the frequency-weighted cosine distance between
//! their transformed vectors.
//!
//! The modules follow the pipeline: [`corpus`] → [`embedding`] →
//! [`alignment`] → [`selection`] → [`scoring`], with [`baselines`] holding
//! two local-context comparison methods and [`pipeline`] the staged,
//! on-disk orchestration used by the `crossdomain` binary.

pub mod alignment;
pub mod baselines;
pub mod corpus;
pub mod embedding;
mod error;
pub mod kv;
pub mod pipeline;
pub mod scoring;
pub mod selection;
pub mod synthetic;

pub use error::{Error, Result};
