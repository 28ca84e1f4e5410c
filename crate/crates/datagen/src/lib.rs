//! Offer books for experiments: price curves over reliability, uniform
//! reliability grids and the named scenarios.

mod curve;
mod io;
mod scenario;

pub use curve::{grid_offer_book, price, reliability_grid, CostCurve, CurveKind};
pub use io::{offers_to_csv, write_offers_csv, CSV_HEADER};
pub use scenario::{scenario, Scenario, ScenarioData};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatagenError {
    #[error(transparent)]
    Core(#[from] relres_core::CoreError),
    #[error("reliability {0} outside [0, 1)")]
    Reliability(f64),
    #[error("unknown cost curve `{0}` (expected constant, linear, exponential, quadratic, cubic or logarithmic)")]
    UnknownCurve(String),
    #[error("unknown scenario `{0}` (expected motivating, small-case, large-case, block-sweep(<MW>) or cost-sweep(<curve>))")]
    UnknownScenario(String),
    #[error("block size must be positive, got {0}")]
    BlockSize(f64),
}
