//! Cleared portfolios and their recomputed metrics.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{block_reliability, stack_reliability};
use crate::error::CoreError;
use crate::offer::OfferBook;
use crate::{approx_eq, REL_TOL};

/// One offer's participation in a block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockMember {
    pub offer_id: String,
    pub accepted: bool,
    /// Procured quantity in MW; zero when not accepted.
    pub quantity: f64,
}

impl BlockMember {
    pub fn accepted(offer_id: impl Into<String>, quantity: f64) -> Self {
        Self { offer_id: offer_id.into(), accepted: true, quantity }
    }
}

/// One procurement block of horizontally stacked offers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockAssignment {
    /// 1-based block index.
    pub block_id: usize,
    pub members: Vec<BlockMember>,
    /// Block volume in MW.
    pub block_volume: f64,
    pub block_reliability: f64,
}

impl BlockAssignment {
    /// Builds a block and computes its reliability from the accepted members.
    pub fn new(
        book: &OfferBook,
        block_id: usize,
        block_volume: f64,
        members: Vec<BlockMember>,
    ) -> Result<Self, CoreError> {
        let rel = accepted_reliabilities(book, &members)?;
        Ok(Self { block_id, members, block_volume, block_reliability: block_reliability(&rel)? })
    }

    pub fn accepted(&self) -> impl Iterator<Item = &BlockMember> {
        self.members.iter().filter(|m| m.accepted)
    }
}

fn accepted_reliabilities(book: &OfferBook, members: &[BlockMember]) -> Result<Vec<f64>, CoreError> {
    members
        .iter()
        .filter(|m| m.accepted)
        .map(|m| {
            book.get(&m.offer_id).map(|o| o.reliability).ok_or_else(|| CoreError::UnknownOffer(m.offer_id.clone()))
        })
        .collect()
}

/// Which clearing problem produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formulation {
    /// Exact bilinear MINLP.
    Minlp,
    /// Log-reformulated MINLP with the same feasible set.
    Rminlp,
    /// MILP with a per-block reliability floor.
    Milp,
    /// Uniform offer reliability per block with a minimum offer count.
    Uniform,
    /// MILP with correlation-weighted reliability contributions.
    Correlated,
    /// MILP allowing at most one offer per source in each block.
    SourceRestricted,
    /// Conventional merit-order clearing of the most reliable offers.
    UnawareBenchmark,
}

impl Formulation {
    pub const ALL: [Formulation; 7] = [
        Formulation::Minlp,
        Formulation::Rminlp,
        Formulation::Milp,
        Formulation::Uniform,
        Formulation::Correlated,
        Formulation::SourceRestricted,
        Formulation::UnawareBenchmark,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Formulation::Minlp => "minlp",
            Formulation::Rminlp => "rminlp",
            Formulation::Milp => "milp",
            Formulation::Uniform => "uniform",
            Formulation::Correlated => "correlated",
            Formulation::SourceRestricted => "source-restricted",
            Formulation::UnawareBenchmark => "unaware-benchmark",
        }
    }

    /// Formulations whose reliability constraints are linear in the
    /// acceptance binaries once their parameters are fixed.
    pub fn is_linear(self) -> bool {
        matches!(
            self,
            Formulation::Milp | Formulation::Uniform | Formulation::Correlated | Formulation::SourceRestricted
        )
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Formulation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        let f = match key.as_str() {
            "minlp" | "exact" => Formulation::Minlp,
            "rminlp" | "log" => Formulation::Rminlp,
            "milp" => Formulation::Milp,
            "uniform" => Formulation::Uniform,
            "correlated" | "correlation" => Formulation::Correlated,
            "source-restricted" | "source" => Formulation::SourceRestricted,
            "unaware-benchmark" | "unaware" | "benchmark" => Formulation::UnawareBenchmark,
            _ => {
                let names: Vec<_> = Formulation::ALL.iter().map(|f| f.as_str()).collect();
                return Err(format!("unknown formulation `{s}`; expected one of {}", names.join(", ")));
            }
        };
        Ok(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    ProvenOptimal,
    GapLimited,
    Infeasible,
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolveStatus::ProvenOptimal => "proven-optimal",
            SolveStatus::GapLimited => "gap-limited",
            SolveStatus::Infeasible => "infeasible",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub status: SolveStatus,
    pub nodes: u64,
    /// Proven lower bound on the optimal cost, when one is known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<f64>,
    /// Worker threads used. Not serialized: results are identical for any
    /// worker count.
    #[serde(skip, default = "one")]
    pub workers: usize,
    /// Wall time of the solve phase. Not serialized so that result files are
    /// byte-stable across runs.
    #[serde(skip)]
    pub wall_time_secs: f64,
}

fn one() -> usize {
    1
}

impl SolverStats {
    pub fn new(status: SolveStatus) -> Self {
        Self { status, nodes: 0, lower_bound: None, workers: 1, wall_time_secs: 0.0 }
    }
}

/// A cleared portfolio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClearingResult {
    pub formulation: Formulation,
    pub assignments: Vec<BlockAssignment>,
    pub total_cost: f64,
    /// Sum of all procured offer quantities in MW.
    pub total_volume: f64,
    /// Product of block reliabilities.
    pub achieved_reliability: f64,
    pub solver_stats: SolverStats,
}

impl ClearingResult {
    pub fn from_assignments(
        book: &OfferBook,
        formulation: Formulation,
        assignments: Vec<BlockAssignment>,
        solver_stats: SolverStats,
    ) -> Result<Self, CoreError> {
        let m = portfolio_metrics(book, &assignments)?;
        Ok(Self {
            formulation,
            assignments,
            total_cost: m.total_cost,
            total_volume: m.total_volume,
            achieved_reliability: m.achieved_reliability,
            solver_stats,
        })
    }

    /// A result with no portfolio at all.
    pub fn infeasible(formulation: Formulation, mut solver_stats: SolverStats) -> Self {
        solver_stats.status = SolveStatus::Infeasible;
        Self {
            formulation,
            assignments: Vec::new(),
            total_cost: 0.0,
            total_volume: 0.0,
            achieved_reliability: 0.0,
            solver_stats,
        }
    }

    pub fn status(&self) -> SolveStatus {
        self.solver_stats.status
    }

    /// Sum of block volumes in MW.
    pub fn block_volume(&self) -> f64 {
        self.assignments.iter().map(|a| a.block_volume).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PortfolioMetrics {
    pub total_cost: f64,
    pub total_volume: f64,
    pub achieved_reliability: f64,
}

/// Recomputes cost, volume and joint reliability from raw assignments.
///
/// Fails instead of computing when an assignment breaks its invariants:
/// an accepted member below the block volume, a rejected member with a
/// nonzero quantity, an unknown offer, or a stored block reliability that
/// disagrees with its members.
pub fn portfolio_metrics(book: &OfferBook, assignments: &[BlockAssignment]) -> Result<PortfolioMetrics, CoreError> {
    let mut cost = 0.0;
    let mut volume = 0.0;
    let mut phis = Vec::with_capacity(assignments.len());
    for a in assignments {
        let fail = |detail: String| CoreError::BlockInvariant { block: a.block_id, detail };
        for m in &a.members {
            let offer = book.get(&m.offer_id).ok_or_else(|| CoreError::UnknownOffer(m.offer_id.clone()))?;
            if m.accepted {
                if m.quantity < a.block_volume && !approx_eq(m.quantity, a.block_volume, REL_TOL) {
                    return Err(fail(format!(
                        "offer `{}` quantity {} below block volume {}",
                        m.offer_id, m.quantity, a.block_volume
                    )));
                }
                cost += m.quantity * offer.price;
                volume += m.quantity;
            } else if m.quantity != 0.0 {
                return Err(fail(format!("rejected offer `{}` carries quantity {}", m.offer_id, m.quantity)));
            }
        }
        let rel = accepted_reliabilities(book, &a.members)?;
        let phi = block_reliability(&rel)?;
        if !approx_eq(phi, a.block_reliability, 1e-12) {
            return Err(fail(format!("stored reliability {} differs from recomputed {}", a.block_reliability, phi)));
        }
        phis.push(phi);
    }
    Ok(PortfolioMetrics { total_cost: cost, total_volume: volume, achieved_reliability: stack_reliability(&phis)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Offer;

    fn small_book() -> OfferBook {
        let rows = [
            ("1", 40.0, 0.80, 80.0),
            ("2", 30.0, 0.90, 90.0),
            ("3", 30.0, 0.95, 95.0),
            ("4", 30.0, 0.98, 98.0),
            ("5a", 20.0, 0.99, 99.0),
            ("5b", 20.0, 0.99, 99.0),
        ];
        OfferBook::new(rows.iter().map(|&(id, v, r, p)| Offer::new(id, v, p, r).unwrap()).collect()).unwrap()
    }

    fn block(book: &OfferBook, id: usize, ids: &[&str]) -> BlockAssignment {
        let members = ids.iter().map(|i| BlockMember::accepted(*i, 20.0)).collect();
        BlockAssignment::new(book, id, 20.0, members).unwrap()
    }

    #[test]
    fn exact_portfolio_metrics() {
        let book = small_book();
        let a = [block(&book, 1, &["1", "2", "4"]), block(&book, 2, &["5a", "5b"])];
        let m = portfolio_metrics(&book, &a).unwrap();
        assert!((m.total_cost - 9320.0).abs() < 1e-9);
        assert!((m.total_volume - 100.0).abs() < 1e-12);
        assert!((m.achieved_reliability - 0.999_500_04).abs() < 1e-12);
    }

    #[test]
    fn conservative_portfolio_metrics() {
        let book = small_book();
        let a = [block(&book, 1, &["1", "3", "4"]), block(&book, 2, &["5a", "5b"])];
        let m = portfolio_metrics(&book, &a).unwrap();
        assert!((m.total_cost - 9420.0).abs() < 1e-9);
        assert!((m.total_volume - 100.0).abs() < 1e-12);
        let expected = (1.0 - 2e-4) * (1.0 - 1e-4);
        assert!((m.achieved_reliability - expected).abs() < 1e-12);
    }

    #[test]
    fn empty_portfolio() {
        let m = portfolio_metrics(&small_book(), &[]).unwrap();
        assert_eq!((m.total_cost, m.total_volume, m.achieved_reliability), (0.0, 0.0, 1.0));
    }

    #[test]
    fn flags_invariant_violations() {
        let book = small_book();
        let mut a = block(&book, 1, &["1", "2"]);
        a.members[0].quantity = 10.0;
        assert!(matches!(portfolio_metrics(&book, &[a]), Err(CoreError::BlockInvariant { .. })));

        let mut b = block(&book, 1, &["1", "2"]);
        b.members.push(BlockMember { offer_id: "3".into(), accepted: false, quantity: 5.0 });
        assert!(portfolio_metrics(&book, &[b]).is_err());

        let mut c = block(&book, 1, &["1", "2"]);
        c.block_reliability = 0.5;
        assert!(portfolio_metrics(&book, &[c]).is_err());

        let d = BlockAssignment {
            block_id: 1,
            members: vec![BlockMember::accepted("zz", 20.0)],
            block_volume: 20.0,
            block_reliability: 0.5,
        };
        assert!(matches!(portfolio_metrics(&book, &[d]), Err(CoreError::UnknownOffer(_))));
    }

    #[test]
    fn formulation_names_round_trip() {
        for f in Formulation::ALL {
            assert_eq!(f.as_str().parse::<Formulation>().unwrap(), f);
            let json = serde_json::to_string(&f).unwrap();
            assert_eq!(json, format!("\"{}\"", f.as_str()));
        }
        assert!("simplex".parse::<Formulation>().is_err());
    }
}
