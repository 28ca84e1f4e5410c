use proptest::prelude::*;
use relres_datagen::{offers_to_csv, price, scenario, CostCurve, CurveKind};
use sha2::{Digest, Sha256};

fn fingerprint(name: &str) -> String {
    let s = scenario(name).unwrap();
    let mut h = Sha256::new();
    h.update(offers_to_csv(&s.offers).as_bytes());
    h.update(serde_json::to_vec(&s.requirement).unwrap());
    format!("{:x}", h.finalize())
}

// Offer CSV followed by the requirement JSON. Regenerate only when a
// scenario is meant to change.
const GOLDEN: &[(&str, &str)] = &[
    ("motivating", "a01247addb9e5b7e004366dbf41ddd495364dda7d76b274144dda064a127c21d"),
    ("small-case", "ef78fc1b537a92a2f45501c6717ff756680368c1aa7328f8bc896434a9248a53"),
    ("large-case", "ee218a43aaacc3897a0835ab9f274721c14c68973b9fb16489d7aea692fa74b3"),
    ("block-sweep(250)", "45a6a16981702e15bb32b0e8da2d2622538d8c66ded6ef39986313b9b3cc8b3f"),
    ("cost-sweep(logarithmic)", "4bece0240b357f04e08d9528c1d57fd066db7680ef40892c52f4f42ea1d17032"),
];

#[test]
fn frozen_outputs() {
    for &(name, hash) in GOLDEN {
        assert_eq!(fingerprint(name), hash, "{name}");
    }
}

#[test]
fn small_case_csv() {
    let csv = offers_to_csv(&scenario("small-case").unwrap().offers);
    let expected = "\
id,volume_mw,reliability,price_per_mw,source
1,40.0,0.8,80.0,unspecified
2,30.0,0.9,90.0,unspecified
3,30.0,0.95,95.0,unspecified
4,30.0,0.98,98.0,unspecified
5a,20.0,0.99,99.0,unspecified
5b,20.0,0.99,99.0,unspecified
";
    assert_eq!(csv, expected);
}

#[test]
fn scenario_instances() {
    let m = scenario("motivating").unwrap();
    assert_eq!(m.offers.len(), 6);
    assert_eq!(m.requirement.target_volume, 100.0);
    assert_eq!(m.requirement.target_reliability, 0.99);
    assert_eq!(m.requirement.block_count, 1);
    let pair: f64 = ["2", "3"].iter().map(|id| m.offers.get(id).unwrap().price).sum();
    let triple: f64 = ["4", "5", "6"].iter().map(|id| m.offers.get(id).unwrap().price).sum();
    assert_eq!((pair, triple), (95.0, 46.0));

    let s = scenario("small-case").unwrap();
    assert_eq!(s.offers.len(), 6);
    let twins: Vec<_> =
        s.offers.iter().filter(|o| o.volume == 20.0 && o.reliability == 0.99 && o.price == 99.0).collect();
    assert_eq!(twins.len(), 2);
    assert_eq!(s.requirement.target_volume, 40.0);
    assert_eq!(s.requirement.target_reliability, 0.9995);
    assert_eq!(s.requirement.min_block_volume, 20.0);
    assert_eq!(s.requirement.block_count, 2);

    let l = scenario("large-case").unwrap();
    assert_eq!(l.offers.len(), 99);
    assert_eq!(l.requirement.target_volume, 500.0);
    assert_eq!(l.requirement.target_reliability, 0.9995);
    assert_eq!(l.requirement.block_count, 5);
    assert_eq!(l.requirement.min_block_volume, 100.0);
    for (k, o) in l.offers.iter().enumerate() {
        assert!((o.price - (k + 1) as f64).abs() < 1e-12);
        assert!((o.reliability - (k + 1) as f64 / 100.0).abs() < 1e-15);
        assert_eq!(o.volume, 500.0);
    }
}

#[test]
fn block_sweep_counts() {
    for (size, k) in
        [(500.0, 1), (250.0, 2), (100.0, 5), (50.0, 10), (25.0, 20), (10.0, 50), (5.0, 100), (2.0, 250), (1.0, 500)]
    {
        let s = scenario(&format!("block-sweep({size})")).unwrap();
        assert_eq!(s.requirement.block_count, k, "{size}");
        assert_eq!(s.requirement.min_block_volume, size);
    }
}

#[test]
fn cost_sweep_keeps_everything_but_prices() {
    let base = scenario("large-case").unwrap();
    for kind in CurveKind::ALL {
        let s = scenario(&format!("cost-sweep({kind})")).unwrap();
        assert_eq!(s.requirement, base.requirement);
        for (a, b) in s.offers.iter().zip(base.offers.iter()) {
            assert_eq!((&a.id, a.volume, a.reliability), (&b.id, b.volume, b.reliability));
            assert_eq!(a.price, price(&CostCurve::new(kind, 100.0), a.reliability).unwrap());
        }
    }
    assert_eq!(scenario("cost-sweep(linear)").unwrap().offers, base.offers);
}

#[test]
fn unknown_names() {
    for bad in ["table-ii", "large", "cost-sweep()", "block-sweep(-5)"] {
        assert!(scenario(bad).is_err(), "{bad}");
    }
}

proptest! {
    #[test]
    fn curves_are_ordered(r in 1e-9f64..0.999_999, alpha in 0.1f64..1e4) {
        let p = |k| price(&CostCurve::new(k, alpha), r).unwrap();
        prop_assert!(p(CurveKind::Cubic) <= p(CurveKind::Quadratic));
        prop_assert!(p(CurveKind::Quadratic) <= p(CurveKind::Linear));
        prop_assert!(p(CurveKind::Linear) <= p(CurveKind::Constant));
        prop_assert!(p(CurveKind::Exponential) <= p(CurveKind::Linear));
        for k in CurveKind::ALL {
            prop_assert!(p(k) >= 0.0);
        }
    }

    #[test]
    fn curves_are_monotone(a in 0.0f64..0.999, b in 0.0f64..0.999) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        for k in CurveKind::ALL {
            let c = CostCurve::new(k, 100.0);
            prop_assert!(price(&c, lo).unwrap() <= price(&c, hi).unwrap());
        }
    }
}
