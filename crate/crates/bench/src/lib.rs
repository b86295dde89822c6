//! Benchmark harness for the radar denoising autoencoders: configuration,
//! dataset generation, training sweeps, reports and the acceptance suite.

pub mod acceptance;
pub mod commands;
pub mod config;
pub mod error;
pub mod experiment;
pub mod report;
pub mod sweep;

pub use config::{Algorithm, ExperimentConfig, Kind, Wall};
pub use error::{BenchError, Result};
pub use experiment::ResultRow;
