//! Evaluation metrics and report export.

mod export;
mod mad;
mod rmse;

pub use export::{export_report, export_report_to, parse_report_csv, report_csv, CSV_HEADER};
pub use mad::{mad_report, mean_angular_difference, MadReport};
pub use rmse::region_rmse;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("meshes do not share connectivity: {0}")]
    ConnectivityMismatch(String),
    #[error("every face pair is degenerate")]
    AllDegenerate,
    #[error("vertex subset is empty")]
    EmptySubset,
    #[error("vertex index {index} out of range for {count} vertices")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("CSV: {0}")]
    Csv(String),
    #[error("report: {0}")]
    Report(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
