use proptest::prelude::*;
use relres_core::{block_reliability, stack_reliability, uniform_block_reliability};

fn offer_rel() -> impl Strategy<Value = f64> {
    0.0f64..0.999_999
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn horizontal_stacking_dominates_members(rs in prop::collection::vec(offer_rel(), 1..12)) {
        let phi = block_reliability(&rs).unwrap();
        let best = rs.iter().cloned().fold(0.0, f64::max);
        prop_assert!(phi >= best - 1e-15);
        prop_assert!(phi < 1.0 || rs.iter().any(|r| *r > 0.99));
    }

    #[test]
    fn adding_a_positive_offer_increases_reliability(
        rs in prop::collection::vec(0.0f64..0.9, 0..8),
        extra in 0.01f64..0.9,
    ) {
        let before = block_reliability(&rs).unwrap();
        let mut more = rs.clone();
        more.push(extra);
        let after = block_reliability(&more).unwrap();
        prop_assert!(after > before);
    }

    #[test]
    fn horizontal_stacking_is_monotone_per_argument(
        rs in prop::collection::vec(offer_rel(), 1..8),
        k in 0usize..8,
        bump in 0.0f64..0.5,
    ) {
        let k = k % rs.len();
        let mut up = rs.clone();
        up[k] = (up[k] + bump).min(0.999_999);
        prop_assert!(block_reliability(&up).unwrap() >= block_reliability(&rs).unwrap() - 1e-15);
    }

    #[test]
    fn vertical_stacking_is_bounded_by_weakest_block(phis in prop::collection::vec(0.0f64..=1.0, 1..10)) {
        let joint = stack_reliability(&phis).unwrap();
        let worst = phis.iter().cloned().fold(1.0, f64::min);
        prop_assert!(joint <= worst * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn uniform_floor_round_trips(target in 0.5f64..0.999_999_9, k in 1usize..600) {
        let psi = uniform_block_reliability(target, k).unwrap();
        let back = psi.powi(k as i32);
        prop_assert!(((back - target) / target).abs() <= 1e-12);
        prop_assert!(psi >= target);
    }
}
