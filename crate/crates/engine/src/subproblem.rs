//! Volume dispatch for fixed block memberships.

use relres_core::{BlockAssignment, BlockMember, ClearingResult, CoreError, SolverStats};

use crate::instance::ProblemInstance;
use crate::simplex::{solve, LinearProgram, LpStatus, RowSense};

/// Accepted offers per block and the dispatched block volumes.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Selection {
    pub blocks: Vec<Vec<usize>>,
    pub volumes: Vec<f64>,
    pub cost: f64,
}

impl Selection {
    pub fn empty() -> Self {
        Self { blocks: Vec::new(), volumes: Vec::new(), cost: 0.0 }
    }

    pub fn into_result(self, inst: &ProblemInstance, stats: SolverStats) -> Result<ClearingResult, CoreError> {
        let book = inst.offers();
        let assignments = self
            .blocks
            .iter()
            .zip(&self.volumes)
            .enumerate()
            .map(|(b, (members, &v))| {
                let members = members.iter().map(|&i| BlockMember::accepted(book[i].id.clone(), v)).collect();
                BlockAssignment::new(book, b + 1, v, members)
            })
            .collect::<Result<Vec<_>, _>>()?;
        ClearingResult::from_assignments(book, inst.formulation(), assignments, stats)
    }
}

/// Unit cost of one MW in a block: every member procures the block volume.
pub(crate) fn block_unit_cost(inst: &ProblemInstance, members: &[usize]) -> f64 {
    members.iter().map(|&i| inst.offers()[i].price).sum()
}

/// Cheapest block volumes for the given memberships, or `None` when no
/// dispatch meets the volume target within the offer capacities.
///
/// Block volumes lie in `[floor, M]`, every member of a block procures the
/// block volume and an offer's quantities over all blocks stay within its
/// volume.
pub(crate) fn dispatch(inst: &ProblemInstance, blocks: &[Vec<usize>]) -> Option<Selection> {
    let offers = inst.offers();
    let floor = inst.block_floor();
    let k = blocks.len();
    if blocks.iter().any(|b| b.is_empty()) {
        return None;
    }
    let mut lp = LinearProgram::default();
    let mut uses = vec![Vec::new(); offers.len()];
    for (b, members) in blocks.iter().enumerate() {
        let cap = members.iter().map(|&i| offers[i].volume).fold(inst.big_m(), f64::min);
        if cap < floor - 1e-9 {
            return None;
        }
        lp.add_column(block_unit_cost(inst, members), floor, cap.max(floor));
        for &i in members {
            uses[i].push(b);
        }
    }
    lp.add_row((0..k).map(|b| (b, 1.0)).collect(), RowSense::Ge, inst.requirement().target_volume);
    for (i, used) in uses.iter().enumerate() {
        if used.len() > 1 {
            lp.add_row(used.iter().map(|&b| (b, 1.0)).collect(), RowSense::Le, offers[i].volume);
        }
    }
    let sol = solve(&lp);
    if sol.status != LpStatus::Optimal {
        return None;
    }
    let volumes: Vec<f64> = sol.x.iter().map(|&v| clean(v)).collect();
    let cost = blocks.iter().zip(&volumes).map(|(m, &v)| block_unit_cost(inst, m) * v).sum();
    Some(Selection { blocks: blocks.to_vec(), volumes, cost })
}

/// Exact joint reliability check `sum_b ln(phi_b) >= ln(Phi)` for the
/// nonlinear formulations; always true for the linear ones.
pub(crate) fn joint_ok(inst: &ProblemInstance, blocks: &[Vec<usize>]) -> bool {
    let Some(target) = inst.joint_log_target() else {
        return true;
    };
    joint_log_reliability(inst, blocks) >= target - crate::instance::LOG_SLACK
}

pub(crate) fn joint_log_reliability(inst: &ProblemInstance, blocks: &[Vec<usize>]) -> f64 {
    let offers = inst.offers();
    blocks
        .iter()
        .map(|m| {
            let lu: f64 = m.iter().map(|&i| relres_core::ln_unavailability(offers[i].reliability)).sum();
            (-lu.exp_m1()).ln()
        })
        .sum()
}

/// Snaps simplex noise such as `19.999999999999996` back to round values.
pub(crate) fn clean(v: f64) -> f64 {
    let r = (v * 1e6).round() / 1e6;
    if (v - r).abs() <= 1e-9 * v.abs().max(1.0) {
        r
    } else {
        v
    }
}

/// Lower bound on the dispatch cost from the block unit costs alone.
pub(crate) fn cost_floor(unit_costs: &[f64], floor: f64, target: f64) -> f64 {
    let base: f64 = unit_costs.iter().map(|c| c * floor).sum();
    let rest = (target - floor * unit_costs.len() as f64).max(0.0);
    let cheapest = unit_costs.iter().cloned().fold(f64::INFINITY, f64::min);
    base + if rest > 0.0 { rest * cheapest } else { 0.0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{build_instance, FormulationParams};
    use relres_core::{Formulation, Offer, OfferBook, Requirement};

    fn inst(q: f64, floor: f64, k: usize) -> ProblemInstance {
        let book = OfferBook::new(vec![
            Offer::new("a", 30.0, 10.0, 0.99).unwrap(),
            Offer::new("b", 50.0, 20.0, 0.99).unwrap(),
            Offer::new("c", 50.0, 1.0, 0.99).unwrap(),
        ])
        .unwrap();
        let req = Requirement::new(q, 0.9, floor, k).unwrap();
        build_instance(book, req, Formulation::Milp, FormulationParams::default()).unwrap()
    }

    #[test]
    fn shared_offer_capacity_binds() {
        // a is in both blocks with 30 MW; cheap block {a} fills first
        let i = inst(30.0, 10.0, 2);
        let s = dispatch(&i, &[vec![0], vec![0, 1]]).unwrap();
        assert_eq!(s.volumes, vec![20.0, 10.0]);
        assert!((s.cost - (10.0 * 20.0 + 30.0 * 10.0)).abs() < 1e-9);
    }

    #[test]
    fn infeasible_dispatch() {
        let i = inst(70.0, 10.0, 2);
        assert!(dispatch(&i, &[vec![0], vec![0]]).is_none());
        assert!(dispatch(&i, &[vec![0], vec![]]).is_none());
        // the floor exceeds a block's capacity
        let i = inst(70.0, 40.0, 2);
        assert!(dispatch(&i, &[vec![0], vec![1]]).is_none());
    }

    #[test]
    fn floor_is_respected() {
        let i = inst(10.0, 8.0, 2);
        let s = dispatch(&i, &[vec![2], vec![1]]).unwrap();
        assert_eq!(s.volumes, vec![8.0, 8.0]);
        assert!((cost_floor(&[1.0, 20.0], 8.0, 10.0) - (8.0 + 160.0)).abs() < 1e-12);
    }
}
