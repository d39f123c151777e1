//! Configuration-driven runs of every model, CSV/JSON output and series
//! comparison. The `chaosbath` binary is a thin shell over this module.

mod compare;
mod config;
mod output;
mod run;

pub use compare::{compare, CompareReport, Metric};
pub use config::{ExperimentConfig, FitWindow, Mode, SweepModel, DEFAULT_CHAOS};
pub use output::{header_lines, read_series, summary_path, write_csv, write_outputs};
pub use run::{onset_time, rate_scaling, run, simulate, sweep_points, Cell, RunOutput, SweepPoint, SERIES_COLUMNS};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
