use relres_core::{AvailabilityDistribution, ClearingResult, DependenceModel, OfferBook};
use serde::{Deserialize, Serialize};

use crate::model::{groups, portfolio_slices, AvailabilityModel, Slice, ValidateError};
use crate::sampling::monte_carlo;

/// Largest portfolio handled by exact convolution.
pub const MAX_EXACT_OFFERS: usize = 30;
/// Largest number of shared source shocks conditioned on exactly.
const MAX_SHOCKS: usize = 16;

fn merge(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for (v, p) in pts {
        match out.last_mut() {
            Some(last) if (v - last.0).abs() <= 1e-9 * v.abs().max(1.0) => last.1 += p,
            _ => out.push((v, p)),
        }
    }
    out
}

/// Convolves two-point distributions `(0 w.p. 1 - p, v w.p. p)` into `base`.
fn convolve(base: Vec<(f64, f64)>, items: impl Iterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    let mut dist = base;
    for (v, p) in items {
        let mut next = Vec::with_capacity(dist.len() * 2);
        for &(x, m) in &dist {
            if p < 1.0 {
                next.push((x, m * (1.0 - p)));
            }
            if p > 0.0 {
                next.push((x + v, m * p));
            }
        }
        dist = merge(next);
    }
    dist
}

/// Exact distribution of the total deliverable volume of `slices`.
///
/// Under a common-source model the distribution is conditioned on every
/// combination of shared source shocks.
pub fn exact_distribution(
    slices: &[Slice],
    model: &AvailabilityModel,
) -> Result<AvailabilityDistribution, ValidateError> {
    if slices.len() > MAX_EXACT_OFFERS {
        return Err(ValidateError::TooManyOffers { count: slices.len(), cap: MAX_EXACT_OFFERS });
    }
    let g = groups(slices, model)?;
    let shared: Vec<usize> = (0..g.shocks.len()).filter(|&k| g.shocks[k] < 1.0).collect();
    if shared.len() > MAX_SHOCKS {
        return Err(ValidateError::TooManyOffers { count: shared.len(), cap: MAX_SHOCKS });
    }
    let always: Vec<usize> =
        (0..g.shocks.len()).filter(|&k| g.shocks[k] >= 1.0).flat_map(|k| g.members[k].iter().copied()).collect();
    let base = convolve(vec![(0.0, 1.0)], always.iter().map(|&i| (slices[i].volume, g.idio[i])));

    let mut all = Vec::new();
    for mask in 0u32..(1u32 << shared.len()) {
        let mut weight = 1.0;
        let mut alive = Vec::new();
        for (bit, &k) in shared.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                weight *= g.shocks[k];
                alive.extend(g.members[k].iter().copied());
            } else {
                weight *= 1.0 - g.shocks[k];
            }
        }
        if weight == 0.0 {
            continue;
        }
        let cond = convolve(base.clone(), alive.iter().map(|&i| (slices[i].volume, g.idio[i])));
        all.extend(cond.into_iter().map(|(v, p)| (v, p * weight)));
    }
    let kind = match model {
        AvailabilityModel::Independence => DependenceModel::Independence,
        _ => DependenceModel::CommonSource,
    };
    Ok(AvailabilityDistribution::new(merge(all), kind)?)
}

/// Sampling settings used when a portfolio is too large for convolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeliveryOptions {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for DeliveryOptions {
    fn default() -> Self {
        Self { samples: 1_000_000, seed: 0, workers: 1 }
    }
}

/// `P(total deliverable volume >= target)` of the accepted offers of
/// `result`, exact up to [`MAX_EXACT_OFFERS`] offers and sampled beyond.
pub fn delivery_probability(
    book: &OfferBook,
    result: &ClearingResult,
    target: f64,
    model: &AvailabilityModel,
    opts: &DeliveryOptions,
) -> Result<f64, ValidateError> {
    if target <= 0.0 {
        return Ok(1.0);
    }
    let slices = portfolio_slices(book, result)?;
    if slices.len() <= MAX_EXACT_OFFERS {
        if let Ok(d) = exact_distribution(&slices, model) {
            return Ok(d.prob_at_least(target));
        }
    }
    Ok(monte_carlo(&slices, model, target, opts.samples, opts.seed, opts.workers)?.estimate)
}
