use serde::{Deserialize, Serialize};

use crate::error::CoreError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DependenceModel {
    Independence,
    CommonSource,
    CorrelationMatrix,
}

/// Probability mass over the total deliverable volume of a portfolio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvailabilityDistribution {
    /// `(volume_mw, mass)` pairs sorted by strictly increasing volume.
    pub support: Vec<(f64, f64)>,
    pub model: DependenceModel,
}

impl AvailabilityDistribution {
    pub fn new(support: Vec<(f64, f64)>, model: DependenceModel) -> Result<Self, CoreError> {
        let d = Self { support, model };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        let mut total = 0.0;
        let mut prev = f64::NEG_INFINITY;
        for &(v, p) in &self.support {
            if !(v >= 0.0) || v <= prev {
                return Err(CoreError::Requirement(format!(
                    "support volumes must be distinct, sorted and nonnegative (got {v} after {prev})"
                )));
            }
            if !(0.0..=1.0 + 1e-12).contains(&p) {
                return Err(CoreError::Probability(p, "[0, 1]"));
            }
            prev = v;
            total += p;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(CoreError::Requirement(format!("masses sum to {total}, not 1")));
        }
        Ok(())
    }

    /// `P(volume >= target)`, with a small relative tolerance on the volume
    /// comparison so sums like 20 + 20 meet a target of 40.
    pub fn prob_at_least(&self, target: f64) -> f64 {
        let cut = target - 1e-9 * target.abs().max(1.0);
        self.support.iter().filter(|(v, _)| *v >= cut).map(|(_, p)| p).sum::<f64>().min(1.0)
    }

    pub fn mass_at(&self, volume: f64) -> f64 {
        self.support.iter().filter(|(v, _)| (v - volume).abs() <= 1e-9 * volume.abs().max(1.0)).map(|(_, p)| p).sum()
    }

    pub fn mean(&self) -> f64 {
        self.support.iter().map(|(v, p)| v * p).sum()
    }
}
