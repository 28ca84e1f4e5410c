mod common;

use std::time::{Duration, Instant};

use common::{grid_book, large};
use relres_core::{Formulation, Requirement, SolveStatus};
use relres_engine::{
    build_instance, solve_branch_and_bound, solve_unaware_benchmark, verify_solution, FormulationParams, SolverConfig,
};

#[test]
fn five_blocks_within_cost_ceiling() {
    let inst = large(5);
    let start = Instant::now();
    let r = solve_branch_and_bound(&inst, &SolverConfig::default()).unwrap();
    assert!(start.elapsed() < Duration::from_secs(60));
    assert_eq!(r.status(), SolveStatus::ProvenOptimal);
    assert!(r.total_cost <= 147_000.0);
    // {0.5, 0.98, 0.99} in every block at 100 MW
    assert!((r.total_cost - 123_500.0).abs() < 1e-6);
    let report = verify_solution(&inst, &r);
    assert!(report.passed(), "{:?}", report.violations);
    assert!(report.joint_reliability >= 0.9995);
}

#[test]
fn finer_blocks_cost_more() {
    let mut last = 0.0;
    for (blocks, expected) in [(1, 97_000.0), (2, 98_500.0), (5, 123_500.0), (10, 136_000.0)] {
        let inst = large(blocks);
        let psi = inst.psi().unwrap();
        assert!((psi - 0.9995f64.powf(1.0 / blocks as f64)).abs() < 1e-12);
        let r = solve_branch_and_bound(&inst, &SolverConfig::default()).unwrap();
        assert_eq!(r.status(), SolveStatus::ProvenOptimal);
        assert!((r.total_cost - expected).abs() < 1e-6, "{blocks}: {}", r.total_cost);
        assert!(r.total_cost >= last);
        last = r.total_cost;
    }
}

#[test]
fn benchmark_uses_the_most_reliable_offer() {
    let req = Requirement::new(500.0, 0.9995, 100.0, 5).unwrap();
    let inst = build_instance(grid_book(), req, Formulation::UnawareBenchmark, FormulationParams::default()).unwrap();
    let r = solve_unaware_benchmark(&inst).unwrap();
    assert_eq!(r.status(), SolveStatus::Infeasible);
    assert!((r.total_cost - 49_500.0).abs() < 1e-6);
    assert!((r.total_volume - 500.0).abs() < 1e-9);
    assert!((r.achieved_reliability - 0.99).abs() < 1e-12);
}

#[test]
fn node_limit_reports_gap() {
    // prices proportional to log-unavailability leave equal cost ratios
    let book = relres_core::OfferBook::new(
        (1..=99)
            .map(|k| {
                let r = k as f64 / 100.0;
                relres_core::Offer::new(format!("r{k:02}"), 500.0, -(100.0 / 9.0) * (-r).ln_1p(), r).unwrap()
            })
            .collect(),
    )
    .unwrap();
    let req = Requirement::new(500.0, 0.9995, 100.0, 5).unwrap();
    let inst = build_instance(book, req, Formulation::Milp, FormulationParams::default()).unwrap();
    let cfg = SolverConfig { cover_budget: 2_000, ..SolverConfig::default() }.with_node_limit(3);
    let r = solve_branch_and_bound(&inst, &cfg).unwrap();
    assert_eq!(r.status(), SolveStatus::GapLimited);
    let lb = r.solver_stats.lower_bound.unwrap();
    assert!(lb <= r.total_cost);
    assert!(lb > 0.99 * r.total_cost);
    assert!(verify_solution(&inst, &r).passed());
}
