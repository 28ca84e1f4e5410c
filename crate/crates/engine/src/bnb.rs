//! Depth-first branch-and-bound over the acceptance binaries.
//!
//! Each node is bounded by the cheapest per-block covers of the reliability
//! rule and, when that does not settle the node, by the LP relaxation of the
//! model. Branching takes the most fractional binary, lowest offer then
//! lowest block on ties, and explores the accepting child first. The tree
//! is walked in a fixed order; worker threads only evaluate the per-block
//! covers of a node, so results do not depend on the worker count.

use std::collections::HashMap;
use std::time::Instant;

use rayon::prelude::*;
use relres_core::{
    ln_unavailability, uniform_block_reliability, ClearingResult, Formulation, SolveStatus, SolverStats,
};

use crate::config::SolverConfig;
use crate::cover::{Cover, CoverSearch};
use crate::error::EngineError;
use crate::instance::{BlockRule, ProblemInstance, LOG_SLACK};
use crate::model::{base_model, node_lp, Layout, MilpModel};
use crate::simplex::{solve, LpStatus};
use crate::subproblem::{cost_floor, dispatch, joint_ok, Selection};

const FREE: i8 = -1;
const INT_TOL: f64 = 1e-6;

/// Solves a formulation with linear block constraints (milp, uniform,
/// correlated, source-restricted) to proven optimality, or to the node or
/// time limit with a gap-limited status.
pub fn solve_branch_and_bound(inst: &ProblemInstance, cfg: &SolverConfig) -> Result<ClearingResult, EngineError> {
    match inst.formulation() {
        Formulation::Milp | Formulation::Uniform | Formulation::Correlated | Formulation::SourceRestricted => {
            Search::new(inst, cfg, false).run()
        }
        f => Err(EngineError::WrongFormulation { solver: "branch-and-bound", formulation: f.to_string() }),
    }
}

/// Solves the exact formulation in its log form. Nodes use the necessary
/// per-block rule `phi_b >= Phi`; integral leaves are checked against the
/// joint target `sum_b ln(phi_b) >= ln(Phi)`.
pub fn solve_rminlp(inst: &ProblemInstance, cfg: &SolverConfig) -> Result<ClearingResult, EngineError> {
    match inst.formulation() {
        Formulation::Rminlp | Formulation::Minlp => Search::new(inst, cfg, true).run(),
        f => Err(EngineError::WrongFormulation { solver: "rminlp", formulation: f.to_string() }),
    }
}

struct Node {
    fix: Vec<i8>,
    bound: f64,
}

struct Search<'a> {
    inst: &'a ProblemInstance,
    cfg: &'a SolverConfig,
    exact: bool,
    lay: Layout,
    model: MilpModel,
    rule: BlockRule,
    /// Rule of the uniform split `Phi^(1/K)`, for exact-mode heuristics.
    split_rule: Option<BlockRule>,
    prices: Vec<f64>,
    log_unavail: Vec<f64>,
    covers: HashMap<Vec<i8>, Cover>,
    split_covers: HashMap<Vec<i8>, Cover>,
    pool: Option<rayon::ThreadPool>,
    incumbent: Option<Selection>,
    nodes: u64,
}

enum Outcome {
    Pruned,
    Closed,
    Branch(usize, f64),
}

impl<'a> Search<'a> {
    fn new(inst: &'a ProblemInstance, cfg: &'a SolverConfig, exact: bool) -> Self {
        let rule = inst.block_rule();
        let split_rule = exact
            .then(|| {
                let k = inst.block_count();
                let psi = uniform_block_reliability(inst.requirement().target_reliability, k).ok()?;
                let mut r = rule.clone();
                r.need = -ln_unavailability(psi) - LOG_SLACK;
                Some(r)
            })
            .flatten();
        Self {
            inst,
            cfg,
            exact,
            lay: Layout::of(inst),
            model: base_model(inst, true),
            rule,
            split_rule,
            prices: inst.offers().iter().map(|o| o.price).collect(),
            log_unavail: inst.offers().iter().map(|o| ln_unavailability(o.reliability)).collect(),
            covers: HashMap::new(),
            split_covers: HashMap::new(),
            pool: cfg.pool(),
            incumbent: None,
            nodes: 0,
        }
    }

    fn run(mut self) -> Result<ClearingResult, EngineError> {
        let start = Instant::now();
        let mut stats = SolverStats::new(SolveStatus::ProvenOptimal);
        stats.workers = self.cfg.workers;
        if self.inst.requirement().target_volume == 0.0 {
            return Ok(Selection::empty().into_result(self.inst, stats)?);
        }

        let (n, k) = (self.lay.n, self.lay.k);
        let mut root = vec![FREE; n * k];
        for b in 0..k {
            for i in 0..n {
                if !self.rule.eligible[i] {
                    root[self.lay.z(i, b)] = 0;
                }
            }
        }
        let mut stack = vec![Node { fix: root, bound: f64::NEG_INFINITY }];
        let mut limit_hit = false;
        while let Some(node) = stack.pop() {
            let timed_out = self.cfg.time_limit.is_some_and(|t| start.elapsed() >= t);
            if self.nodes >= self.cfg.node_limit || timed_out {
                stack.push(node);
                limit_hit = true;
                break;
            }
            self.nodes += 1;
            if let Outcome::Branch(var, bound) = self.evaluate(&node) {
                let mut zero = node.fix.clone();
                zero[var] = 0;
                let mut one = node.fix;
                one[var] = 1;
                stack.push(Node { fix: zero, bound });
                stack.push(Node { fix: one, bound });
            }
        }

        stats.nodes = self.nodes;
        stats.wall_time_secs = start.elapsed().as_secs_f64();
        let open_bound = stack.iter().map(|s| s.bound).fold(f64::INFINITY, f64::min);
        match (self.incumbent.take(), limit_hit) {
            (Some(sel), false) => Ok(sel.into_result(self.inst, stats)?),
            (Some(sel), true) => {
                let tol = self.cfg.prune_tol(sel.cost);
                if open_bound >= sel.cost - tol {
                    // every open node is already dominated
                    return Ok(sel.into_result(self.inst, stats)?);
                }
                stats.status = SolveStatus::GapLimited;
                stats.lower_bound = Some(open_bound.min(sel.cost).max(0.0));
                Ok(sel.into_result(self.inst, stats)?)
            }
            (None, false) => Ok(ClearingResult::infeasible(self.inst.formulation(), stats)),
            (None, true) => Err(EngineError::LimitReached { lower_bound: open_bound.max(0.0) }),
        }
    }

    fn prune_by(&self, bound: f64) -> bool {
        match &self.incumbent {
            Some(inc) => bound >= inc.cost - self.cfg.prune_tol(inc.cost),
            None => false,
        }
    }

    fn offer(&mut self, sel: Selection) {
        if self.incumbent.as_ref().is_none_or(|inc| sel.cost < inc.cost) {
            self.incumbent = Some(sel);
        }
    }

    fn evaluate(&mut self, node: &Node) -> Outcome {
        let (n, k) = (self.lay.n, self.lay.k);
        if self.breaks_block_order(&node.fix) {
            return Outcome::Pruned;
        }
        let fixes: Vec<&[i8]> = (0..k).map(|b| &node.fix[b * n..(b + 1) * n]).collect();
        let covers = Self::covers_for(&mut self.covers, &self.rule, &self.prices, self.cfg, &self.pool, &fixes);
        let Some(covers) = covers else {
            return Outcome::Pruned;
        };
        if self.exact && !self.joint_reachable(&node.fix) {
            return Outcome::Pruned;
        }
        let units: Vec<f64> = covers.iter().map(|c| c.bound().unwrap_or(0.0)).collect();
        let target = self.inst.requirement().target_volume;
        let floor = self.inst.block_floor();
        let mut bound = cost_floor(&units, floor, target).max(node.bound);
        if self.prune_by(bound) {
            return Outcome::Pruned;
        }

        // incumbent from the cover sets
        let sets: Option<Vec<Vec<usize>>> = covers
            .iter()
            .map(|c| match c {
                Cover::Found { members: Some(m), .. } => Some(m.clone()),
                _ => None,
            })
            .collect();
        if let Some(sets) = &sets {
            let all_exact = covers.iter().all(|c| matches!(c, Cover::Found { exact: true, .. }));
            let all_forced = sets.iter().enumerate().all(|(b, m)| m.iter().all(|&i| node.fix[self.lay.z(i, b)] == 1));
            if joint_ok(self.inst, sets) {
                let sel = dispatch(self.inst, sets);
                let settled = match &sel {
                    // supersets of the forced sets cost at least as much
                    _ if all_forced => true,
                    Some(s) => all_exact && s.cost <= bound + self.cfg.prune_tol(s.cost),
                    None => false,
                };
                if let Some(s) = sel {
                    self.offer(s);
                }
                if settled {
                    return Outcome::Closed;
                }
            }
        }
        if self.exact {
            if let Some(split) = &self.split_rule {
                let sc = Self::covers_for(&mut self.split_covers, split, &self.prices, self.cfg, &self.pool, &fixes);
                let sets: Option<Vec<Vec<usize>>> = sc.and_then(|cs| {
                    cs.into_iter()
                        .map(|c| match c {
                            Cover::Found { members, .. } => members,
                            Cover::Infeasible => None,
                        })
                        .collect()
                });
                if let Some(s) = sets.and_then(|sets| dispatch(self.inst, &sets)) {
                    self.offer(s);
                }
            }
        }
        if self.prune_by(bound) {
            return Outcome::Pruned;
        }

        let lp = node_lp(&self.model, &self.lay, floor, &node.fix);
        let sol = solve(&lp);
        match sol.status {
            LpStatus::Infeasible => return Outcome::Pruned,
            LpStatus::Optimal => {
                bound = bound.max(sol.objective);
                if self.prune_by(bound) {
                    return Outcome::Pruned;
                }
                let mut pick: Option<(usize, f64)> = None;
                for i in 0..n {
                    for b in 0..k {
                        let v = self.lay.z(i, b);
                        if node.fix[v] != FREE {
                            continue;
                        }
                        let x = sol.x[v];
                        if x > INT_TOL && x < 1.0 - INT_TOL {
                            let dist = (x - 0.5).abs();
                            if pick.is_none_or(|(_, d)| dist < d) {
                                pick = Some((v, dist));
                            }
                        }
                    }
                }
                if let Some((v, _)) = pick {
                    return Outcome::Branch(v, bound);
                }
                let sets: Vec<Vec<usize>> =
                    (0..k).map(|b| (0..n).filter(|&i| sol.x[self.lay.z(i, b)] > 0.5).collect()).collect();
                if joint_ok(self.inst, &sets) {
                    if let Some(s) = dispatch(self.inst, &sets) {
                        self.offer(s);
                    }
                    return Outcome::Closed;
                }
            }
            LpStatus::Unbounded | LpStatus::IterationLimit => {}
        }
        match self.first_free(&node.fix) {
            Some(v) => Outcome::Branch(v, bound),
            None => Outcome::Pruned,
        }
    }

    fn first_free(&self, fix: &[i8]) -> Option<usize> {
        (0..self.lay.n)
            .flat_map(|i| (0..self.lay.k).map(move |b| (i, b)))
            .map(|(i, b)| self.lay.z(i, b))
            .find(|&v| fix[v] == FREE)
    }

    /// Blocks are interchangeable, so only patterns with block acceptance
    /// vectors in nonincreasing lexicographic order are searched.
    fn breaks_block_order(&self, fix: &[i8]) -> bool {
        let n = self.lay.n;
        for b in 0..self.lay.k.saturating_sub(1) {
            for i in 0..n {
                let (x, y) = (fix[b * n + i], fix[(b + 1) * n + i]);
                if x == FREE || y == FREE {
                    break;
                }
                if x != y {
                    if x < y {
                        return true;
                    }
                    break;
                }
            }
        }
        false
    }

    /// Whether the joint target is still reachable with every allowed offer
    /// accepted in every block.
    fn joint_reachable(&self, fix: &[i8]) -> bool {
        let Some(target) = self.inst.joint_log_target() else {
            return true;
        };
        let n = self.lay.n;
        let total: f64 = (0..self.lay.k)
            .map(|b| {
                let lu: f64 =
                    (0..n).filter(|&i| fix[b * n + i] != 0 && self.rule.eligible[i]).map(|i| self.log_unavail[i]).sum();
                (-lu.exp_m1()).ln()
            })
            .sum();
        total >= target - LOG_SLACK
    }

    /// Covers of every block, `None` if some block cannot meet the rule.
    fn covers_for(
        cache: &mut HashMap<Vec<i8>, Cover>,
        rule: &BlockRule,
        prices: &[f64],
        cfg: &SolverConfig,
        pool: &Option<rayon::ThreadPool>,
        fixes: &[&[i8]],
    ) -> Option<Vec<Cover>> {
        let mut missing: Vec<&[i8]> = Vec::new();
        for f in fixes {
            if !cache.contains_key(*f) && !missing.contains(f) {
                missing.push(f);
            }
        }
        let search = CoverSearch::new(rule, prices, cfg.cover_budget);
        let fresh: Vec<Cover> = match pool {
            Some(p) if missing.len() > 1 => p.install(|| missing.par_iter().map(|f| search.solve(f)).collect()),
            _ => missing.iter().map(|f| search.solve(f)).collect(),
        };
        for (f, c) in missing.into_iter().zip(fresh) {
            cache.insert(f.to_vec(), c);
        }
        fixes
            .iter()
            .map(|f| {
                let c = &cache[*f];
                (!matches!(c, Cover::Infeasible)).then(|| c.clone())
            })
            .collect()
    }
}
