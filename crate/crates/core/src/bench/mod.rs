//! Experiment harness: configuration, trial records, coverage and speed-up
//! metrics, CSV aggregates and SVG plots.

pub mod aggregate;
pub mod config;
pub mod metrics;
pub mod plot;
pub mod record;
pub mod runner;
pub mod speedup;

/// Version stamped on every persisted record, table and plot.
pub const SCHEMA_VERSION: u32 = 1;

pub use aggregate::{aggregate, AggregateRow};
pub use config::{Budget, ExperimentConfig, ParamOverrides, PartialConfig};
pub use metrics::{hypervolume_coverage, speedup};
pub use record::{RunRecord, TrialStatus};
pub use runner::{load_records, records_from_traces, run_experiment, run_trial, ExperimentSummary};
pub use speedup::{speedup_row, SpeedupRow, Statistic};
