//! Merit-order clearing that ignores reliability beyond a threshold.

use std::time::Instant;

use relres_core::{BlockAssignment, BlockMember, ClearingResult, Formulation, SolveStatus, SolverStats};

use crate::error::EngineError;
use crate::instance::{ProblemInstance, LOG_SLACK};

/// Clears the cheapest offers with reliability at or above the benchmark
/// threshold until the volume target is covered.
///
/// Each cleared offer forms its own block, so the reported reliability is
/// the product of the cleared reliabilities. The result keeps its portfolio
/// but carries the infeasible status when that product misses the target.
pub fn solve_unaware_benchmark(inst: &ProblemInstance) -> Result<ClearingResult, EngineError> {
    if inst.formulation() != Formulation::UnawareBenchmark {
        return Err(EngineError::WrongFormulation {
            solver: "unaware-benchmark",
            formulation: inst.formulation().to_string(),
        });
    }
    let start = Instant::now();
    let book = inst.offers();
    let threshold = inst.benchmark_threshold().unwrap_or_else(|| book.max_reliability());
    let target = inst.requirement().target_volume;

    let mut order: Vec<usize> = (0..book.len()).filter(|&i| book[i].reliability >= threshold).collect();
    order.sort_by(|&a, &b| book[a].price.total_cmp(&book[b].price).then(a.cmp(&b)));
    let available: f64 = order.iter().map(|&i| book[i].volume).sum();
    if available < target * (1.0 - 1e-12) {
        return Err(EngineError::InsufficientVolume { available, requested: target });
    }

    let mut assignments = Vec::new();
    let mut remaining = target;
    for &i in &order {
        if remaining <= 0.0 {
            break;
        }
        let take = book[i].volume.min(remaining);
        remaining -= take;
        let member = BlockMember::accepted(book[i].id.clone(), take);
        assignments.push(BlockAssignment::new(book, assignments.len() + 1, take, vec![member])?);
    }

    let log_rel: f64 = assignments.iter().map(|a| a.block_reliability.ln()).sum();
    let feasible = log_rel >= inst.requirement().target_reliability.ln() - LOG_SLACK;
    let mut stats = SolverStats::new(if feasible { SolveStatus::ProvenOptimal } else { SolveStatus::Infeasible });
    stats.wall_time_secs = start.elapsed().as_secs_f64();
    Ok(ClearingResult::from_assignments(book, Formulation::UnawareBenchmark, assignments, stats)?)
}
