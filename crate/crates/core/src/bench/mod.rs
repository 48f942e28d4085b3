//! Experiment matrix: configuration, execution, metrics, aggregation and plots.

pub mod config;
pub mod metrics;
pub mod plot;
pub mod report;
pub mod runner;

pub use config::ExperimentConfig;
pub use report::{aggregate, MetricRow, SummaryRow};
pub use runner::{run_matrix, RunOptions};
