//! File formats: scenario JSON, results CSV, paired CSV and SVG scatter.

mod results;
mod scenario;
mod svg;

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::metrics::MetricsError;
use crate::task::TaskError;

pub use results::{
    aggregate, format_g6, pair_results, read_paired, read_results, write_paired, write_results, ResultsRow,
    RESULTS_HEADER,
};
pub use scenario::{ScenarioFile, WaypointSpec, DEFAULT_SUITE, SHIPPED};
pub use svg::emit_scatter;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {0}: {1}")]
    Read(String, #[source] std::io::Error),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}
