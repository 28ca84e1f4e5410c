//! Domain types and reliability stacking algebra for reliability-aware
//! reserve clearing.
//!
//! Offers are stacked *horizontally* into procurement blocks, where a block
//! fails only if every accepted member fails, and blocks are stacked
//! *vertically* to reach the requested volume, where the portfolio fails as
//! soon as any block fails. [`algebra`] holds both closed forms; the rest of
//! the crate defines the value types shared by the solver, validator and CLI.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // negated comparisons reject NaN

pub mod algebra;
pub mod distribution;
mod error;
pub mod offer;
pub mod portfolio;
pub mod requirement;

pub use algebra::{
    block_reliability, derive_block_count, ln_unavailability, stack_reliability, uniform_block_reliability,
};
pub use distribution::{AvailabilityDistribution, DependenceModel};
pub use error::CoreError;
pub use offer::{Offer, OfferBook, UNSPECIFIED_SOURCE};
pub use portfolio::{
    portfolio_metrics, BlockAssignment, BlockMember, ClearingResult, Formulation, PortfolioMetrics, SolveStatus,
    SolverStats,
};
pub use requirement::Requirement;

/// Relative tolerance used by invariant checks on currency and megawatt values.
pub const REL_TOL: f64 = 1e-9;

/// Relative equality with an absolute floor of `tol` near zero.
pub fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
