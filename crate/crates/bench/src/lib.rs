//! Experiment harness for deterministic-sampling CEM-MPC: cached sample
//! sets, seeded sweeps, CSV outputs, aggregation and SVG plots.

pub mod aggregate;
pub mod cache;
pub mod error;
pub mod plan;
pub mod plot;
pub mod records;
pub mod rollout;
pub mod runner;
pub mod seeds;

pub use error::{BenchError, CacheError};
