//! Flat-file ingestion and report persistence.

mod csv;
mod report;

pub use csv::{
    read_gromov_matrix, read_metric_input, write_distance_matrix, write_point_cloud,
};
pub use report::{report_sha256, save_report, Report, SCHEMA_VERSION};
