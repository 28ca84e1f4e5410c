//! Exhaustive search over all acceptance patterns: the reference solver.

use std::time::Instant;

use rayon::prelude::*;
use relres_core::{ClearingResult, Formulation, SolveStatus, SolverStats};

use crate::config::SolverConfig;
use crate::error::EngineError;
use crate::instance::ProblemInstance;
use crate::subproblem::{block_unit_cost, cost_floor, dispatch, joint_ok, Selection};

/// Best pattern of a slice of the search: cost, then position in
/// enumeration order.
type Best = Option<(f64, Vec<usize>, Selection)>;

/// Solves `inst` by enumerating every acceptance pattern, dispatching each
/// and keeping the cheapest. Ties go to the pattern enumerated first.
///
/// Handles every formulation except the unaware benchmark; the exact ones
/// are checked against the joint reliability target.
pub fn solve_exact_enumeration(inst: &ProblemInstance, cfg: &SolverConfig) -> Result<ClearingResult, EngineError> {
    if inst.formulation() == Formulation::UnawareBenchmark {
        return Err(EngineError::WrongFormulation {
            solver: "enumeration",
            formulation: inst.formulation().to_string(),
        });
    }
    let binaries = inst.binary_count();
    if binaries > cfg.enumeration_cap || inst.offer_count() >= 32 {
        return Err(EngineError::CapExceeded { binaries, cap: cfg.enumeration_cap });
    }
    let start = Instant::now();
    let mut stats = SolverStats::new(SolveStatus::ProvenOptimal);
    stats.workers = cfg.workers;
    if inst.requirement().target_volume == 0.0 {
        return Ok(Selection::empty().into_result(inst, stats)?);
    }

    let n = inst.offer_count();
    let k = inst.block_count();
    let rule = inst.block_rule();
    let candidates: Vec<(Vec<usize>, f64)> = (1u32..(1u32 << n))
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>())
        .filter(|set| rule.satisfied_by(set))
        .map(|set| {
            let c = block_unit_cost(inst, &set);
            (set, c)
        })
        .collect();
    stats.nodes = (candidates.len() as u64).saturating_pow(k as u32);

    let slice = |first: usize| -> Best {
        let mut best: Best = None;
        let mut idx = vec![0usize; k];
        idx[0] = first;
        let floor = inst.block_floor();
        let target = inst.requirement().target_volume;
        let mut units = vec![0.0; k];
        loop {
            for b in 0..k {
                units[b] = candidates[idx[b]].1;
            }
            let lb = cost_floor(&units, floor, target);
            let skip = best.as_ref().is_some_and(|(c, _, _)| lb > c + 1e-9 * c.abs().max(1.0));
            if !skip {
                let blocks: Vec<Vec<usize>> = idx.iter().map(|&j| candidates[j].0.clone()).collect();
                if joint_ok(inst, &blocks) {
                    if let Some(sel) = dispatch(inst, &blocks) {
                        if best.as_ref().is_none_or(|(c, _, _)| sel.cost < *c) {
                            best = Some((sel.cost, idx.clone(), sel));
                        }
                    }
                }
            }
            // advance the trailing blocks like an odometer
            let mut b = k;
            loop {
                if b == 1 {
                    return best;
                }
                b -= 1;
                idx[b] += 1;
                if idx[b] < candidates.len() {
                    break;
                }
                idx[b] = 0;
            }
        }
    };

    let firsts = 0..candidates.len();
    let results: Vec<Best> = match cfg.pool() {
        Some(pool) => pool.install(|| firsts.into_par_iter().map(slice).collect()),
        None => firsts.map(slice).collect(),
    };
    let best = results.into_iter().flatten().min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));

    stats.wall_time_secs = start.elapsed().as_secs_f64();
    match best {
        Some((_, _, sel)) => Ok(sel.into_result(inst, stats)?),
        None => Ok(ClearingResult::infeasible(inst.formulation(), stats)),
    }
}
