use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{groups, AvailabilityModel, Slice, ValidateError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    /// Half-width of the normal-approximation 95 % confidence interval.
    pub halfwidth: f64,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl McEstimate {
    /// Binomial standard error of the estimate.
    pub fn std_error(&self) -> f64 {
        (self.estimate * (1.0 - self.estimate) / self.samples as f64).sqrt()
    }
}

/// Estimates `P(total deliverable volume >= target)` from `samples` draws.
///
/// Worker `w` draws its share of the samples from ChaCha8 seeded with
/// `seed` on stream `w`, so the estimate depends only on the seed and the
/// worker count.
pub fn monte_carlo(
    slices: &[Slice],
    model: &AvailabilityModel,
    target: f64,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<McEstimate, ValidateError> {
    if samples == 0 {
        return Err(ValidateError::NoSamples);
    }
    let g = groups(slices, model)?;
    let workers = workers.max(1);
    let cut = target - 1e-9 * target.abs().max(1.0);
    let mut owner = vec![0usize; slices.len()];
    for (k, m) in g.members.iter().enumerate() {
        for &i in m {
            owner[i] = k;
        }
    }

    let run = |w: usize| -> u64 {
        let share = samples / workers as u64 + u64::from((w as u64) < samples % workers as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(w as u64);
        let mut alive = vec![true; g.shocks.len()];
        let mut hits = 0;
        for _ in 0..share {
            for (a, &p) in alive.iter_mut().zip(&g.shocks) {
                *a = p >= 1.0 || rng.gen_bool(p);
            }
            let mut total = 0.0;
            for (i, s) in slices.iter().enumerate() {
                if alive[owner[i]] && rng.gen_bool(g.idio[i]) {
                    total += s.volume;
                }
            }
            hits += u64::from(total >= cut);
        }
        hits
    };

    let hits: u64 = if workers == 1 {
        run(0)
    } else {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().ok();
        match pool {
            Some(p) => p.install(|| (0..workers).into_par_iter().map(run).sum()),
            None => (0..workers).map(run).sum(),
        }
    };
    let estimate = hits as f64 / samples as f64;
    let halfwidth = 1.96 * (estimate * (1.0 - estimate) / samples as f64).sqrt();
    Ok(McEstimate { estimate, halfwidth, samples, seed, workers })
}
