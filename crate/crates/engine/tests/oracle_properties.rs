//! Randomised agreement between the search solvers and exhaustive
//! enumeration.

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use relres_core::{ClearingResult, Formulation, Offer, OfferBook, Requirement, SolveStatus};
use relres_engine::{
    build_instance, solve_branch_and_bound, solve_exact_enumeration, solve_rminlp, solve_unaware_benchmark,
    verify_solution, EngineError, FormulationParams, ProblemInstance, SolverConfig,
};

#[derive(Debug, Clone)]
struct Case {
    offers: Vec<(f64, f64, f64)>,
    target_volume: f64,
    target_reliability: f64,
    floor_share: f64,
    blocks: usize,
}

fn price(curve: u8, r: f64, alpha: f64) -> f64 {
    match curve {
        0 => alpha * r,
        1 => alpha * (r.exp() - 1.0) / (std::f64::consts::E - 1.0),
        2 => alpha * r * r,
        3 => alpha * r * r * r,
        _ => -(alpha / 9.0) * (-r).ln_1p(),
    }
}

fn case() -> impl Strategy<Value = Case> {
    (1usize..=3, 0u8..5, prop::collection::vec((5.0f64..60.0, 0.3f64..0.99, 0.8f64..1.25), 2..=6))
        .prop_flat_map(|(blocks, curve, raw)| {
            let offers: Vec<(f64, f64, f64)> = raw
                .into_iter()
                .map(|(v, r, noise)| {
                    ((v * 2.0).round() / 2.0, (r * 100.0).round() / 100.0, price(curve, r, 100.0) * noise)
                })
                .collect();
            (Just(offers), 5.0f64..80.0, 0.8f64..0.999, prop_oneof![Just(0.0), 0.2f64..1.0], Just(blocks))
        })
        .prop_map(|(offers, q, phi, floor_share, blocks)| Case {
            offers,
            target_volume: q.round(),
            target_reliability: phi,
            floor_share,
            blocks,
        })
}

fn book(case: &Case) -> OfferBook {
    OfferBook::new(
        case.offers.iter().enumerate().map(|(k, &(v, r, p))| Offer::new(format!("o{k}"), v, p, r).unwrap()).collect(),
    )
    .unwrap()
}

fn instance(case: &Case, formulation: Formulation, phi: f64) -> Option<ProblemInstance> {
    let floor = case.floor_share * case.target_volume / case.blocks as f64;
    let req = Requirement::new(case.target_volume, phi, floor, case.blocks).unwrap();
    match build_instance(book(case), req, formulation, FormulationParams::default()) {
        Ok(i) => Some(i),
        Err(EngineError::PsiUnachievable { .. }) => None,
        Err(e) => panic!("{e}"),
    }
}

fn cost(r: &ClearingResult) -> Option<f64> {
    (r.status() != SolveStatus::Infeasible).then_some(r.total_cost)
}

fn same_cost(a: Option<f64>, b: Option<f64>) -> Result<(), TestCaseError> {
    match (a, b) {
        (Some(x), Some(y)) => {
            prop_assert!((x - y).abs() <= 1e-6 * x.abs().max(1.0), "{x} vs {y}");
        }
        (None, None) => {}
        other => prop_assert!(false, "feasibility differs: {other:?}"),
    }
    Ok(())
}

fn exact_cost(case: &Case, phi: f64, cfg: &SolverConfig) -> Option<f64> {
    let inst = instance(case, Formulation::Minlp, phi)?;
    cost(&solve_exact_enumeration(&inst, cfg).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn branch_and_bound_matches_enumeration(case in case()) {
        let cfg = SolverConfig::default();
        let Some(inst) = instance(&case, Formulation::Milp, case.target_reliability) else {
            return Ok(());
        };
        let b = solve_branch_and_bound(&inst, &cfg).unwrap();
        prop_assert_ne!(b.status(), SolveStatus::GapLimited);
        let e = solve_exact_enumeration(&inst, &cfg).unwrap();
        same_cost(cost(&b), cost(&e))?;
        if cost(&b).is_some() {
            let report = verify_solution(&inst, &b);
            prop_assert!(report.passed(), "{:?}", report.violations);
            prop_assert!(report.joint_reliability.ln() >= case.target_reliability.ln() - 1e-9);
        }
    }

    #[test]
    fn log_form_matches_exact_enumeration(case in case()) {
        let cfg = SolverConfig::default();
        let inst = instance(&case, Formulation::Rminlp, case.target_reliability).unwrap();
        let c = solve_rminlp(&inst, &cfg).unwrap();
        prop_assert_ne!(c.status(), SolveStatus::GapLimited);
        same_cost(cost(&c), exact_cost(&case, case.target_reliability, &cfg))?;
        if cost(&c).is_some() {
            prop_assert!(verify_solution(&inst, &c).passed());
        }
    }

    #[test]
    fn linear_floor_is_conservative(case in case()) {
        let cfg = SolverConfig::default();
        let Some(inst) = instance(&case, Formulation::Milp, case.target_reliability) else {
            return Ok(());
        };
        if let Some(d) = cost(&solve_branch_and_bound(&inst, &cfg).unwrap()) {
            let a = exact_cost(&case, case.target_reliability, &cfg);
            prop_assert!(a.is_some());
            prop_assert!(d >= a.unwrap() - 1e-6 * d.max(1.0));
        }
    }

    #[test]
    fn feasible_benchmark_is_never_cheaper(case in case()) {
        let cfg = SolverConfig::default();
        let Some(inst) = instance(&case, Formulation::UnawareBenchmark, case.target_reliability) else {
            return Ok(());
        };
        let Ok(bench) = solve_unaware_benchmark(&inst) else {
            return Ok(());
        };
        if bench.status() == SolveStatus::ProvenOptimal {
            // the benchmark portfolio fits the exact problem only with matching block count
            if bench.assignments.len() == case.blocks {
                if let Some(a) = exact_cost(&case, case.target_reliability, &cfg) {
                    prop_assert!(bench.total_cost >= a - 1e-6 * a.max(1.0));
                }
            }
        }
    }

    #[test]
    fn raising_the_target_never_lowers_cost(case in case(), bump in 0.0f64..0.5) {
        let cfg = SolverConfig::default();
        let hi = case.target_reliability + bump * (1.0 - case.target_reliability);
        let lo = exact_cost(&case, case.target_reliability, &cfg);
        let up = exact_cost(&case, hi, &cfg);
        match (lo, up) {
            (Some(l), Some(h)) => prop_assert!(h >= l - 1e-9 * l.max(1.0)),
            (None, Some(_)) => prop_assert!(false, "tighter target became feasible"),
            _ => {}
        }
    }

    #[test]
    fn adding_an_offer_never_raises_cost(case in case(), extra in (5.0f64..60.0, 0.3f64..0.99, 1.0f64..100.0)) {
        let cfg = SolverConfig::default();
        let before = exact_cost(&case, case.target_reliability, &cfg);
        let mut more = case.clone();
        if more.offers.len() * more.blocks + more.blocks > cfg.enumeration_cap {
            return Ok(());
        }
        more.offers.push(extra);
        let after = exact_cost(&more, more.target_reliability, &cfg);
        match (before, after) {
            (Some(b), Some(a)) => prop_assert!(a <= b + 1e-9 * b.max(1.0)),
            (Some(_), None) => prop_assert!(false, "extra offer made the problem infeasible"),
            _ => {}
        }
    }
}
