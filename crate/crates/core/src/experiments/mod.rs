//! Batch experiments behind the command-line tool: enumeration tables,
//! random-graph sweeps, single-graph analysis and plotting.

mod analyze;
mod enumerate;
mod er;
mod plot;
mod stats;

use thiserror::Error;

use crate::circuit::CircuitError;
use crate::edgespace::GraphError;
use crate::rpn::RpnError;

pub use analyze::{analyze, AnalyzeConfig, AnalyzeReport};
pub use enumerate::{run_enumerate, write_enumerate, ClassRecord, EnumerateConfig, EnumerateReport, JointTable};
pub use er::{audit_rows, read_rows, run_er, write_rows, ErConfig, ResultRow};
pub use plot::{plot_csv, render_scatter, Series};
pub use stats::{average_ranks, spearman};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Rpn(#[from] RpnError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("column `{0}` not found")]
    MissingColumn(String),
    #[error("invalid value in column `{column}` at row {row}: {value}")]
    BadValue { column: String, row: usize, value: String },
    #[error("{0}")]
    Config(String),
}
