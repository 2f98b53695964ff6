//! Experiment harness for `porolab-core`: configs, seeded sampling, the
//! experiment registry and deterministic CSV/JSON reports.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;
pub mod sampling;
pub mod treefile;

pub use config::{ExperimentConfig, ScaleSpec};
pub use error::{LabError, LabResult};
pub use experiments::{find, run_experiment, Experiment, REGISTRY};
pub use report::{emit_report, Cell, Report};
