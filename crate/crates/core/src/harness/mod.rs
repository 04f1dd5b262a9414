//! Experiment plumbing: configuration, data loading, instance generation,
//! sweeps that emit JSON-lines records, and performance profiles.

pub mod config;
pub mod data;
pub mod experiment;
pub mod generate;
pub mod profile;

pub use config::{ExperimentConfig, ExperimentKind};
pub use data::{load_features, normalize};
pub use experiment::{read_records, run_experiment, write_records, RunOptions, RunRecord, SCHEMA_VERSION};
pub use generate::{generate_instance, DataSource, GeneratedInstance};
pub use profile::{performance_profile, Metric, ProfileTable};
