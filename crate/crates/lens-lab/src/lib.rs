//! Experiment runner for `lens-core`: a fixed registry of experiments driven
//! by flat `key = value` configs, writing JSON reports and CSV series.

pub mod config;
pub mod error;
mod experiments;
pub mod registry;
pub mod report;

pub use config::{Backend, ExperimentConfig};
pub use error::{LabError, Result};
pub use experiments::{run as run_experiment, validate};
pub use registry::{list_experiments, ExperimentInfo};
pub use report::{write_report, ExperimentReport, Series, Verdict};
