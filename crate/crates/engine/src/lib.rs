//! Clearing engine for reliability-aware reserve markets.
//!
//! [`build_instance`] validates an offer book and requirement for one
//! formulation. The exact formulations are solved by [`solve_rminlp`], the
//! linear ones by [`solve_branch_and_bound`], and any small instance by
//! [`solve_exact_enumeration`], which serves as the reference.

mod benchmark;
mod bnb;
mod config;
mod cover;
mod enumerate;
mod error;
mod instance;
mod lp_format;
pub mod model;
pub mod simplex;
mod subproblem;
mod verify;

pub use benchmark::solve_unaware_benchmark;
pub use bnb::{solve_branch_and_bound, solve_rminlp};
pub use config::SolverConfig;
pub use enumerate::solve_exact_enumeration;
pub use error::EngineError;
pub use instance::{
    build_correlation_adjusted, build_instance, build_source_restricted, min_offers_for, CorrelationMatrix,
    FormulationParams, ProblemInstance, LOG_SLACK,
};
pub use lp_format::{export_lp, model_to_lp, parse_lp, write_lp};
pub use model::{build_model, MilpModel};
pub use verify::{verify_solution, VerificationReport, Violation};

use relres_core::{ClearingResult, Formulation};

/// Solves `inst` with the solver suited to its formulation.
pub fn solve(inst: &ProblemInstance, cfg: &SolverConfig) -> Result<ClearingResult, EngineError> {
    match inst.formulation() {
        Formulation::Minlp | Formulation::Rminlp => solve_rminlp(inst, cfg),
        Formulation::UnawareBenchmark => solve_unaware_benchmark(inst),
        _ => solve_branch_and_bound(inst, cfg),
    }
}
