use serde::{Deserialize, Serialize};

use crate::algebra::derive_block_count;
use crate::error::CoreError;
use crate::offer::OfferBook;

/// The system operator's procurement target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Requirement {
    /// Requested volume in MW. Zero means nothing has to be procured.
    pub target_volume: f64,
    /// Required joint reliability, in `(0, 1)`.
    pub target_reliability: f64,
    /// Minimum volume of each block in MW; 0 disables the floor.
    #[serde(default)]
    pub min_block_volume: f64,
    /// Number of vertically stacked blocks.
    pub block_count: usize,
    /// Big-M constant of the block/offer volume link. `None` means the
    /// largest offered volume.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub big_m: Option<f64>,
}

impl Requirement {
    pub fn new(
        target_volume: f64,
        target_reliability: f64,
        min_block_volume: f64,
        block_count: usize,
    ) -> Result<Self, CoreError> {
        let req = Self { target_volume, target_reliability, min_block_volume, block_count, big_m: None };
        req.validate()?;
        Ok(req)
    }

    /// Requirement whose block count is `ceil(Q / min_bid_size)`.
    pub fn with_min_bid_size(
        target_volume: f64,
        target_reliability: f64,
        min_block_volume: f64,
        min_bid_size: f64,
    ) -> Result<Self, CoreError> {
        let blocks = derive_block_count(target_volume, min_bid_size)?;
        Self::new(target_volume, target_reliability, min_block_volume, blocks)
    }

    pub fn with_big_m(mut self, big_m: f64) -> Result<Self, CoreError> {
        self.big_m = Some(big_m);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        if !(self.target_volume >= 0.0) || !self.target_volume.is_finite() {
            return Err(CoreError::Requirement(format!(
                "target volume must be nonnegative, got {}",
                self.target_volume
            )));
        }
        if !(self.target_reliability > 0.0 && self.target_reliability < 1.0) {
            return Err(CoreError::Requirement(format!(
                "target reliability must lie in (0, 1), got {}",
                self.target_reliability
            )));
        }
        if !(self.min_block_volume >= 0.0) || !self.min_block_volume.is_finite() {
            return Err(CoreError::Requirement(format!(
                "minimum block volume must be nonnegative, got {}",
                self.min_block_volume
            )));
        }
        if self.block_count == 0 {
            return Err(CoreError::Requirement("block count must be at least 1".into()));
        }
        if let Some(m) = self.big_m {
            if !(m > 0.0) || !m.is_finite() {
                return Err(CoreError::Requirement(format!("big-M must be positive, got {m}")));
            }
        }
        Ok(())
    }

    /// Big-M resolved against a book; rejects an explicit value below the
    /// largest offered volume.
    pub fn resolve_big_m(&self, book: &OfferBook) -> Result<f64, CoreError> {
        let max_v = book.max_volume();
        match self.big_m {
            None => Ok(max_v),
            Some(m) if m + 1e-9 * max_v >= max_v => Ok(m),
            Some(m) => Err(CoreError::Requirement(format!("big-M {m} is below the largest offered volume {max_v}"))),
        }
    }
}
