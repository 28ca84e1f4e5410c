//! Independent re-check of a cleared portfolio against its instance.

use std::collections::{HashMap, HashSet};

use relres_core::{approx_eq, block_reliability, ln_unavailability, ClearingResult, Formulation, SolveStatus};
use serde::{Deserialize, Serialize};

use crate::instance::{ProblemInstance, LOG_SLACK};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// Short constraint name, e.g. `volume-link` or `joint-reliability`.
    pub constraint: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub violations: Vec<Violation>,
    pub recomputed_cost: f64,
    pub recomputed_volume: f64,
    /// Exact product of the recomputed block reliabilities.
    pub joint_reliability: f64,
    pub target_reliability: f64,
    /// `Psi^K`, the joint reliability the linear block floor guarantees.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linearized_joint: Option<f64>,
    /// `exp(sum_b (sum_i prod_j rho_ij z_ib) ln(phi_b))` under a correlation
    /// matrix. Reported only; not enforced.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weighted_joint: Option<f64>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// True joint reliability minus the linearized guarantee.
    pub fn linearization_margin(&self) -> Option<f64> {
        self.linearized_joint.map(|l| self.joint_reliability - l)
    }

    pub fn has(&self, constraint: &str) -> bool {
        self.violations.iter().any(|v| v.constraint == constraint)
    }
}

struct Checker {
    violations: Vec<Violation>,
}

impl Checker {
    fn flag(&mut self, constraint: &str, detail: String) {
        self.violations.push(Violation { constraint: constraint.into(), detail });
    }
}

/// Rechecks every constraint of the instance's formulation, plus the exact
/// joint reliability target, from the raw block assignments. A result with
/// the infeasible status and no blocks yields no violations.
pub fn verify_solution(inst: &ProblemInstance, result: &ClearingResult) -> VerificationReport {
    let book = inst.offers();
    let req = inst.requirement();
    let mut c = Checker { violations: Vec::new() };
    let benchmark = result.formulation == Formulation::UnawareBenchmark;

    if result.formulation != inst.formulation() {
        c.flag("formulation", format!("result is for `{}`, instance is `{}`", result.formulation, inst.formulation()));
    }

    let empty_infeasible = result.status() == SolveStatus::Infeasible && result.assignments.is_empty();
    let mut cost = 0.0;
    let mut volume = 0.0;
    let mut block_volume_sum = 0.0;
    let mut log_joint = 0.0;
    let mut weighted_log = 0.0;
    let mut used: HashMap<usize, f64> = HashMap::new();
    let floor = inst.block_floor();

    if !benchmark && !empty_infeasible && result.assignments.len() != inst.block_count() {
        c.flag("block-count", format!("{} blocks, the instance has {}", result.assignments.len(), inst.block_count()));
    }

    for a in &result.assignments {
        let b = a.block_id;
        block_volume_sum += a.block_volume;
        let mut accepted = Vec::new();
        let mut seen = HashSet::new();
        for m in &a.members {
            let Some(i) = book.position(&m.offer_id) else {
                c.flag("unknown-offer", format!("block {b}: offer `{}` is not in the book", m.offer_id));
                continue;
            };
            if !seen.insert(i) {
                c.flag("duplicate-member", format!("block {b}: offer `{}` listed twice", m.offer_id));
            }
            if m.quantity < 0.0 {
                c.flag("nonnegative-quantity", format!("block {b}: offer `{}` has {}", m.offer_id, m.quantity));
            }
            if m.accepted {
                accepted.push(i);
                cost += book[i].price * m.quantity;
                volume += m.quantity;
                *used.entry(i).or_default() += m.quantity;
                if m.quantity < a.block_volume * (1.0 - 1e-9) - 1e-9 {
                    c.flag(
                        "volume-link",
                        format!(
                            "block {b}: offer `{}` procures {} MW below the block volume {}",
                            m.offer_id, m.quantity, a.block_volume
                        ),
                    );
                }
            } else if m.quantity != 0.0 {
                c.flag(
                    "rejected-quantity",
                    format!("block {b}: rejected offer `{}` has {} MW", m.offer_id, m.quantity),
                );
            }
        }
        if accepted.is_empty() {
            c.flag("empty-block", format!("block {b} has no accepted offer"));
        }
        if !benchmark && a.block_volume < floor * (1.0 - 1e-9) - 1e-9 {
            c.flag("min-block-volume", format!("block {b}: volume {} below {floor}", a.block_volume));
        }
        if a.block_volume > inst.big_m() * (1.0 + 1e-9) + 1e-9 && !benchmark {
            c.flag("big-m", format!("block {b}: volume {} above M = {}", a.block_volume, inst.big_m()));
        }

        let lu: f64 = accepted.iter().map(|&i| ln_unavailability(book[i].reliability)).sum();
        let phi = -lu.exp_m1();
        log_joint += phi.ln();
        let rels: Vec<f64> = accepted.iter().map(|&i| book[i].reliability).collect();
        let phi_direct = block_reliability(&rels).unwrap_or(f64::NAN);
        if !approx_eq(a.block_reliability, phi_direct, 1e-12) {
            c.flag(
                "reported-block-reliability",
                format!("block {b}: reported {}, recomputed {phi_direct}", a.block_reliability),
            );
        }

        if !benchmark {
            check_block_rule(inst, &mut c, b, &accepted, a, lu);
        }
        if let Some(w) = inst.correlation_weights() {
            let weight: f64 = accepted.iter().map(|&i| w[i]).sum();
            weighted_log += weight * phi.ln();
        }
    }

    for (&i, &q) in &used {
        if q > book[i].volume * (1.0 + 1e-9) + 1e-9 {
            c.flag("offer-capacity", format!("offer `{}` procures {q} MW of {} MW", book[i].id, book[i].volume));
        }
    }
    if !empty_infeasible && block_volume_sum < req.target_volume * (1.0 - 1e-9) - 1e-9 {
        c.flag("demand", format!("blocks cover {block_volume_sum} MW of {} MW", req.target_volume));
    }
    let joint = log_joint.exp();
    if !empty_infeasible && log_joint < req.target_reliability.ln() - LOG_SLACK {
        c.flag("joint-reliability", format!("block product {joint} below the target {}", req.target_reliability));
    }
    if !empty_infeasible {
        for (name, reported, recomputed) in [
            ("reported-cost", result.total_cost, cost),
            ("reported-volume", result.total_volume, volume),
            ("reported-reliability", result.achieved_reliability, joint),
        ] {
            if !approx_eq(reported, recomputed, 1e-9) {
                c.flag(name, format!("reported {reported}, recomputed {recomputed}"));
            }
        }
    }

    VerificationReport {
        violations: c.violations,
        recomputed_cost: cost,
        recomputed_volume: volume,
        joint_reliability: joint,
        target_reliability: req.target_reliability,
        linearized_joint: inst.psi().map(|p| p.powi(inst.block_count() as i32)),
        weighted_joint: inst.correlation_weights().map(|_| weighted_log.exp()),
    }
}

fn check_block_rule(
    inst: &ProblemInstance,
    c: &mut Checker,
    b: usize,
    accepted: &[usize],
    a: &relres_core::BlockAssignment,
    log_unavail: f64,
) {
    let book = inst.offers();
    match inst.formulation() {
        Formulation::Milp | Formulation::Correlated | Formulation::SourceRestricted => {
            let psi = inst.psi().unwrap_or(0.0);
            let lhs: f64 = accepted.iter().map(|&i| inst.log_coefficient(i)).sum();
            if lhs > ln_unavailability(psi) + LOG_SLACK {
                c.flag(
                    "block-reliability",
                    format!("block {b}: weighted log unavailability {lhs} above ln(1 - {psi})"),
                );
            }
            if let Some(groups) = inst.source_groups() {
                let mut seen = HashSet::new();
                for &i in accepted {
                    if !seen.insert(groups[i]) {
                        c.flag(
                            "source-limit",
                            format!("block {b}: second offer from source `{}`", inst.source_names()[groups[i]]),
                        );
                    }
                }
            }
        }
        Formulation::Uniform => {
            let r = inst.uniform_reliability().unwrap_or(0.0);
            let psi = inst.psi().unwrap_or(0.0);
            let need = inst.min_offers_per_block().unwrap_or(0);
            if accepted.len() < need {
                c.flag("offer-count", format!("block {b}: {} offers, at least {need} required", accepted.len()));
            }
            for &i in accepted {
                if book[i].reliability < r {
                    c.flag(
                        "uniform-eligibility",
                        format!("block {b}: offer `{}` below the uniform reliability {r}", book[i].id),
                    );
                }
                let q = a.members.iter().find(|m| m.offer_id == book[i].id).map_or(0.0, |m| m.quantity);
                if r * q - 1.0 < psi - 1.0 - 1e-9 {
                    c.flag("volume-floor", format!("block {b}: offer `{}` procures {q} MW", book[i].id));
                }
            }
        }
        Formulation::Minlp | Formulation::Rminlp => {
            let phi = -log_unavail.exp_m1();
            if phi <= 0.0 {
                c.flag("block-reliability", format!("block {b} has zero reliability"));
            }
        }
        Formulation::UnawareBenchmark => {}
    }
}
