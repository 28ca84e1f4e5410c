//! Closed-form reliability stacking.
//!
//! All products of unavailabilities are accumulated as sums of `ln(1 - R)`
//! and exponentiated once at the end, so long stacks of very reliable offers
//! do not underflow.

use crate::error::CoreError;

/// `ln(1 - r)` for an offer reliability `r` in `[0, 1)`.
#[inline]
pub fn ln_unavailability(r: f64) -> f64 {
    (-r).ln_1p()
}

fn check_offer_reliability(r: f64) -> Result<(), CoreError> {
    if (0.0..1.0).contains(&r) {
        Ok(())
    } else {
        Err(CoreError::Probability(r, "[0, 1)"))
    }
}

/// Reliability of a horizontally stacked block: `1 - prod(1 - R_i)`.
///
/// The empty block has reliability 0.
pub fn block_reliability(reliabilities: &[f64]) -> Result<f64, CoreError> {
    let mut log_unavail = 0.0;
    for &r in reliabilities {
        check_offer_reliability(r)?;
        log_unavail += ln_unavailability(r);
    }
    Ok(-log_unavail.exp_m1())
}

/// Reliability of vertically stacked blocks: `prod(phi_b)`, 1 for no blocks.
pub fn stack_reliability(block_reliabilities: &[f64]) -> Result<f64, CoreError> {
    let mut log_rel = 0.0;
    for &phi in block_reliabilities {
        if !(0.0..=1.0).contains(&phi) {
            return Err(CoreError::Probability(phi, "[0, 1]"));
        }
        log_rel += phi.ln();
    }
    Ok(log_rel.exp())
}

/// Per-block reliability floor that splits `target` evenly over
/// `block_count` blocks: `target^(1 / block_count)`.
pub fn uniform_block_reliability(target: f64, block_count: usize) -> Result<f64, CoreError> {
    if !(target > 0.0 && target < 1.0) {
        return Err(CoreError::Probability(target, "(0, 1)"));
    }
    if block_count == 0 {
        return Err(CoreError::Requirement("block count must be at least 1".into()));
    }
    if block_count == 1 {
        return Ok(target);
    }
    Ok((target.ln() / block_count as f64).exp())
}

/// Number of blocks from the minimum bid size: `ceil(Q / S_min)`, at least 1.
pub fn derive_block_count(target_volume: f64, min_bid_size: f64) -> Result<usize, CoreError> {
    if !(min_bid_size > 0.0) || !min_bid_size.is_finite() {
        return Err(CoreError::Requirement(format!("minimum bid size must be positive, got {min_bid_size}")));
    }
    if !(target_volume >= 0.0) || !target_volume.is_finite() {
        return Err(CoreError::Requirement(format!("target volume must be nonnegative, got {target_volume}")));
    }
    let ratio = target_volume / min_bid_size;
    // 40 / 20 must not become 3 through rounding noise
    let count = (ratio - 1e-9 * ratio.max(1.0)).ceil();
    Ok((count as usize).max(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_block(rs: &[f64]) -> f64 {
        1.0 - rs.iter().map(|r| 1.0 - r).product::<f64>()
    }

    #[test]
    fn horizontal_stacking_examples() {
        assert!((block_reliability(&[0.90, 0.80]).unwrap() - 0.98).abs() < 1e-12);
        assert!((block_reliability(&[0.98, 0.95]).unwrap() - 0.999).abs() < 1e-12);
        assert_eq!(block_reliability(&[]).unwrap(), 0.0);
        for r in [0.0, 0.1, 0.5, 0.999_999] {
            assert!((block_reliability(&[r]).unwrap() - r).abs() <= 1e-15);
        }
    }

    #[test]
    fn block_reliability_rejects_certain_offers() {
        assert!(block_reliability(&[0.5, 1.0]).is_err());
        assert!(block_reliability(&[-0.1]).is_err());
        assert!(block_reliability(&[f64::NAN]).is_err());
    }

    #[test]
    fn vertical_stacking_examples() {
        assert!((stack_reliability(&[0.95, 0.95]).unwrap() - 0.9025).abs() < 1e-12);
        let phi = stack_reliability(&[0.9996, 0.9999]).unwrap();
        assert!((phi - 0.999_500_04).abs() < 1e-12);
        assert_eq!(stack_reliability(&[]).unwrap(), 1.0);
        assert!((stack_reliability(&[0.7]).unwrap() - 0.7).abs() < 1e-15);
        assert_eq!(stack_reliability(&[0.9, 0.0]).unwrap(), 0.0);
        assert!(stack_reliability(&[1.2]).is_err());
    }

    #[test]
    fn uniform_floor_examples() {
        let psi = uniform_block_reliability(0.9995, 2).unwrap();
        assert!((psi - 0.999_749_968_742_182).abs() < 1e-12);
        assert!((psi * psi - 0.9995).abs() < 1e-12);
        assert_eq!(uniform_block_reliability(0.9995, 1).unwrap(), 0.9995);
        let psi5 = uniform_block_reliability(0.9995, 5).unwrap();
        assert!((psi5.powi(5) - 0.9995).abs() < 1e-12);
        // high-precision reference value
        assert!((psi5 - 0.999_899_979_993_998).abs() < 1e-14);
        assert!(uniform_block_reliability(1.0, 2).is_err());
        assert!(uniform_block_reliability(0.5, 0).is_err());
    }

    #[test]
    fn block_count_from_min_bid() {
        assert_eq!(derive_block_count(500.0, 100.0).unwrap(), 5);
        assert_eq!(derive_block_count(40.0, 20.0).unwrap(), 2);
        assert_eq!(derive_block_count(500.0, 500.0).unwrap(), 1);
        assert_eq!(derive_block_count(501.0, 100.0).unwrap(), 6);
        assert_eq!(derive_block_count(0.0, 100.0).unwrap(), 1);
        assert!(derive_block_count(500.0, 0.0).is_err());
        assert!(derive_block_count(500.0, -3.0).is_err());
    }

    #[test]
    fn log_space_matches_direct_product() {
        let rs = [0.8, 0.9, 0.98, 0.999, 0.3];
        let a = block_reliability(&rs).unwrap();
        let b = direct_block(&rs);
        assert!((a - b).abs() <= 1e-12 * b);
    }
}
