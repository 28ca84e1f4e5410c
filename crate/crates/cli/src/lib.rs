//! Library side of the `relres` command: offer-book ingestion, run
//! configuration, clearing, validation, sweeps and report rendering.

pub mod config;
pub mod error;
pub mod ingest;
pub mod report;
pub mod run;
pub mod sweep;

pub use config::{load_problem, InputSource, OutputFormat, Overrides, Problem, RunConfig};
pub use error::CliError;
pub use ingest::ingest_offers;
pub use run::{export_lp_file, result_json, run_clearing, validate_result, RunOutcome, ValidationOutcome};
pub use sweep::{run_sweep, sweep_csv, SweepKind, SweepRow};
