//! Library side of the `sigpost` command line: table builders for each
//! figure, CSV and SVG output, and the Monte Carlo verification report.

pub mod error;
pub mod figures;
pub mod svg;
pub mod table;
pub mod verify;

pub use error::{CliError, CliResult};
pub use table::CurveTable;
