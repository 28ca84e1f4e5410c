use proptest::prelude::*;
use relres_core::{Formulation, Offer, OfferBook, Requirement, SolveStatus};
use relres_engine::{build_instance, solve, FormulationParams, SolverConfig};
use relres_validate::{
    delivery_probability, exact_distribution, monte_carlo, portfolio_slices, AvailabilityModel, DeliveryOptions, Slice,
};

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

#[test]
fn exact_portfolio_beats_its_block_product() {
    let book = small_book();
    let req = Requirement::new(40.0, 0.9995, 20.0, 2).unwrap();
    let inst = build_instance(book.clone(), req, Formulation::Minlp, FormulationParams::default()).unwrap();
    let r = solve(&inst, &SolverConfig::default()).unwrap();
    let slices = portfolio_slices(&book, &r).unwrap();
    assert_eq!(slices.len(), 5);
    assert!(slices.iter().all(|s| s.volume == 20.0));

    let opts = DeliveryOptions::default();
    let p = delivery_probability(&book, &r, 40.0, &AvailabilityModel::Independence, &opts).unwrap();
    assert!(p >= 0.9995);
    assert!(p >= r.achieved_reliability - 1e-9);
    // at least two of the five 20 MW slices: 1 - P(0) - P(exactly 1)
    let q: Vec<f64> = slices.iter().map(|s| 1.0 - s.reliability).collect();
    let none: f64 = q.iter().product();
    let one: f64 = (0..5).map(|k| (1.0 - q[k]) * none / q[k]).sum();
    assert!((p - (1.0 - none - one)).abs() < 1e-12);

    assert_eq!(delivery_probability(&book, &r, 0.0, &AvailabilityModel::Independence, &opts).unwrap(), 1.0);
}

#[test]
fn sampled_three_offer_example() {
    let s = vec![Slice::new(100.0, 0.90), Slice::new(100.0, 0.70), Slice::new(100.0, 0.70)];
    let e = monte_carlo(&s, &AvailabilityModel::Independence, 100.0, 1_000_000, 42, 4).unwrap();
    let sigma = (0.991f64 * 0.009 / 1e6).sqrt();
    assert!((e.estimate - 0.991).abs() <= 4.0 * sigma, "{e:?}");
    assert!(e.halfwidth > 0.0 && e.halfwidth < 3e-4);
}

#[test]
fn certain_shock_matches_independence() {
    let s = vec![
        Slice::new(100.0, 0.90).with_source("wind"),
        Slice::new(100.0, 0.70).with_source("wind"),
        Slice::new(100.0, 0.70).with_source("solar"),
    ];
    let shocks = AvailabilityModel::common_source([("wind", 1.0), ("solar", 1.0)]);
    let a = monte_carlo(&s, &shocks, 100.0, 200_000, 3, 2).unwrap();
    let b = monte_carlo(&s, &AvailabilityModel::Independence, 100.0, 200_000, 3, 2).unwrap();
    assert!((a.estimate - b.estimate).abs() <= a.halfwidth + b.halfwidth);
    assert!((a.estimate - 0.991).abs() <= 4.0 * a.std_error().max(1e-4));
}

#[test]
fn large_portfolios_are_sampled() {
    let offers: Vec<Offer> = (0..40).map(|k| Offer::new(format!("o{k}"), 10.0, 1.0, 0.5).unwrap()).collect();
    let book = OfferBook::new(offers).unwrap();
    let assignments = vec![relres_core::BlockAssignment::new(
        &book,
        1,
        10.0,
        (0..40).map(|k| relres_core::BlockMember::accepted(format!("o{k}"), 10.0)).collect(),
    )
    .unwrap()];
    let r = relres_core::ClearingResult::from_assignments(
        &book,
        Formulation::Milp,
        assignments,
        relres_core::SolverStats::new(SolveStatus::ProvenOptimal),
    )
    .unwrap();
    let opts = DeliveryOptions { samples: 100_000, seed: 1, workers: 2 };
    // at least 20 of 40 fair coins
    let p = delivery_probability(&book, &r, 200.0, &AvailabilityModel::Independence, &opts).unwrap();
    let exact = 0.5 + 0.5 * 0.125_370_687_619_083_6;
    assert!((p - exact).abs() < 0.01, "{p}");
}

#[test]
fn shared_shock_can_raise_multi_offer_delivery() {
    // the target needs two of three weak offers; a common shock makes joint
    // success more likely than under independence
    let s: Vec<Slice> = [10.0, 20.0, 10.0].iter().map(|&v| Slice::new(v, 0.049).with_source("a")).collect();
    let p = |shock: f64| {
        exact_distribution(&s, &AvailabilityModel::common_source([("a", shock)])).unwrap().prob_at_least(20.0)
    };
    assert!(p(0.5) > p(1.0));
}

fn slices() -> impl Strategy<Value = Vec<Slice>> {
    prop::collection::vec(((1u32..6).prop_map(|v| v as f64 * 10.0), 0.05f64..0.99), 1..6)
        .prop_map(|v| v.into_iter().map(|(vol, r)| Slice::new(vol, r)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampling_agrees_with_convolution(s in slices(), frac in 0.0f64..1.0, seed in any::<u64>()) {
        let total: f64 = s.iter().map(|x| x.volume).sum();
        let target = (frac * total).round();
        let exact = exact_distribution(&s, &AvailabilityModel::Independence).unwrap().prob_at_least(target);
        let e = monte_carlo(&s, &AvailabilityModel::Independence, target, 100_000, seed, 2).unwrap();
        let sigma = (exact * (1.0 - exact) / 1e5).sqrt().max(1e-6);
        prop_assert!((e.estimate - exact).abs() <= 4.0 * sigma, "{} vs {}", e.estimate, exact);
    }

    #[test]
    fn weaker_shocks_never_help_single_offer_targets(s in slices(), lo in 0.99f64..1.0, hi_gap in 0.0f64..0.01) {
        let s: Vec<Slice> = s.into_iter().enumerate()
            .map(|(k, x)| Slice::new(x.volume, x.reliability * 0.98).with_source(if k % 2 == 0 { "a" } else { "b" }))
            .collect();
        let hi = (lo + hi_gap).min(1.0);
        // any one surviving offer covers the target
        let target = s.iter().map(|x| x.volume).fold(f64::INFINITY, f64::min);
        let p = |shock: f64| {
            let m = AvailabilityModel::common_source([("a", shock), ("b", shock)]);
            exact_distribution(&s, &m).unwrap().prob_at_least(target)
        };
        prop_assert!(p(lo) <= p(hi) + 1e-12);
    }

    #[test]
    fn block_product_is_a_lower_bound(
        raw in prop::collection::vec((10.0f64..60.0, 0.5f64..0.99, 1.0f64..100.0), 2..6),
        blocks in 1usize..3,
        q in 10.0f64..60.0,
        phi in 0.9f64..0.999,
    ) {
        let book = OfferBook::new(
            raw.iter().enumerate().map(|(k, &(v, r, p))| Offer::new(format!("o{k}"), v, p, r).unwrap()).collect(),
        ).unwrap();
        let req = Requirement::new(q, phi, 0.0, blocks).unwrap();
        let inst = build_instance(book.clone(), req, Formulation::Minlp, FormulationParams::default()).unwrap();
        let r = solve(&inst, &SolverConfig::default()).unwrap();
        if r.status() != SolveStatus::Infeasible {
            let p = delivery_probability(&book, &r, q, &AvailabilityModel::Independence, &DeliveryOptions::default())
                .unwrap();
            prop_assert!(p >= r.achieved_reliability - 1e-9, "{} < {}", p, r.achieved_reliability);
        }
    }
}
