//! Parameter sweeps over block size and price curve.

use std::str::FromStr;

use relres_core::{uniform_block_reliability, Offer, OfferBook, SolveStatus};
use relres_datagen::{price, CostCurve, CurveKind};
use relres_engine::solve;
use serde::Serialize;

use crate::config::{load_problem, Overrides, Problem, RunConfig};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepKind {
    /// Minimum block size in MW; the block count follows as `ceil(Q / size)`.
    BlockSize,
    /// Offer prices recomputed from each curve.
    CostCurve,
}

impl SweepKind {
    pub fn default_points(self) -> Vec<String> {
        let p: &[&str] = match self {
            SweepKind::BlockSize => &["500", "250", "100", "50"],
            SweepKind::CostCurve => &["linear", "exponential", "quadratic", "cubic", "logarithmic"],
        };
        p.iter().map(|s| s.to_string()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub parameter: String,
    pub status: Option<SolveStatus>,
    pub cost: Option<f64>,
    pub volume: Option<f64>,
    pub reliability: Option<f64>,
    /// Per-block reliability floor of the point.
    pub psi: Option<f64>,
    pub blocks: Option<usize>,
    pub nodes: Option<u64>,
    pub wall_time_s: Option<f64>,
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(parameter: &str, err: impl ToString) -> Self {
        Self {
            parameter: parameter.to_string(),
            status: None,
            cost: None,
            volume: None,
            reliability: None,
            psi: None,
            blocks: None,
            nodes: None,
            wall_time_s: None,
            error: Some(err.to_string()),
        }
    }
}

fn reprice(book: &OfferBook, curve: &CostCurve) -> Result<OfferBook, CliError> {
    let offers = book
        .iter()
        .map(|o| Ok(Offer { price: price(curve, o.reliability)?, ..o.clone() }))
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(OfferBook::new(offers)?)
}

fn point_problem(
    kind: SweepKind,
    point: &str,
    cfg: &RunConfig,
    base: &Problem,
    alpha: f64,
) -> Result<Problem, CliError> {
    match kind {
        SweepKind::BlockSize => {
            let size: f64 =
                point.parse().map_err(|_| CliError::Usage(format!("block size `{point}` is not a number")))?;
            let ov = Overrides { bmin: Some(size), min_bid: Some(size), blocks: None, ..cfg.overrides.clone() };
            load_problem(&cfg.input, &ov)
        }
        SweepKind::CostCurve => {
            let curve = CostCurve::new(CurveKind::from_str(point)?, alpha);
            Ok(Problem { offers: reprice(&base.offers, &curve)?, ..base.clone() })
        }
    }
}

fn run_point(kind: SweepKind, point: &str, cfg: &RunConfig, base: &Problem, alpha: f64) -> Result<SweepRow, CliError> {
    let problem = point_problem(kind, point, cfg, base, alpha)?;
    let inst = problem.instance(cfg.formulation, &cfg.params)?;
    let req = inst.requirement();
    let psi = match inst.psi() {
        Some(p) => p,
        None => uniform_block_reliability(req.target_reliability, req.block_count)?,
    };
    let result = solve(&inst, &cfg.solver)?;
    let stats = &result.solver_stats;
    Ok(SweepRow {
        parameter: point.to_string(),
        status: Some(stats.status),
        cost: Some(result.total_cost),
        volume: Some(result.total_volume),
        reliability: Some(result.achieved_reliability),
        psi: Some(psi),
        blocks: Some(req.block_count),
        nodes: Some(stats.nodes),
        wall_time_s: Some(stats.wall_time_secs),
        error: None,
    })
}

/// Solves one instance per sweep point. A point that fails is recorded with
/// its error and the sweep moves on; only an unreadable base input aborts.
pub fn run_sweep(kind: SweepKind, points: &[String], cfg: &RunConfig, alpha: f64) -> Result<Vec<SweepRow>, CliError> {
    let base = load_problem(&cfg.input, &cfg.overrides)?;
    Ok(points
        .iter()
        .map(|p| run_point(kind, p, cfg, &base, alpha).unwrap_or_else(|e| SweepRow::failed(p, e)))
        .collect())
}

/// Combined CSV, one line per point, keyed by the sweep parameter.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
    let _ = w.write_record([
        "parameter",
        "status",
        "cost",
        "volume_mw",
        "reliability",
        "psi",
        "blocks",
        "nodes",
        "wall_time_s",
        "error",
    ]);
    for r in rows {
        let _ = w.write_record([
            r.parameter.clone(),
            r.status.map_or(String::new(), |s| s.to_string()),
            opt(r.cost),
            opt(r.volume),
            opt(r.reliability),
            opt(r.psi),
            r.blocks.map_or(String::new(), |b| b.to_string()),
            r.nodes.map_or(String::new(), |n| n.to_string()),
            opt(r.wall_time_s),
            r.error.clone().unwrap_or_default(),
        ]);
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}
