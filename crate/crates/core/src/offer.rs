use std::collections::HashMap;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// Source tag of offers that did not declare one.
pub const UNSPECIFIED_SOURCE: &str = "unspecified";

fn default_source() -> String {
    UNSPECIFIED_SOURCE.to_string()
}

/// One probabilistic reserve offer.
///
/// Field names follow the offer-book column names so the same type reads
/// both the CSV and the JSON mirror format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Offer {
    pub id: String,
    /// Offered volume in MW.
    #[serde(rename = "volume_mw")]
    pub volume: f64,
    /// Probability the volume is deliverable, in `[0, 1)`.
    pub reliability: f64,
    /// Price per MW.
    #[serde(rename = "price_per_mw")]
    pub price: f64,
    #[serde(default = "default_source")]
    pub source: String,
}

impl Offer {
    pub fn new(id: impl Into<String>, volume: f64, price: f64, reliability: f64) -> Result<Self, CoreError> {
        let offer = Self { id: id.into(), volume, reliability, price, source: default_source() };
        offer.validate()?;
        Ok(offer)
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        let source = source.into();
        self.source = if source.trim().is_empty() { default_source() } else { source };
        self
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        if self.id.trim().is_empty() {
            return Err(CoreError::EmptyId);
        }
        // reliability 1 would make ln(1 - R) undefined
        if !(0.0..1.0).contains(&self.reliability) {
            return Err(CoreError::Reliability { id: self.id.clone(), value: self.reliability });
        }
        if !(self.volume > 0.0) || !self.volume.is_finite() {
            return Err(CoreError::Volume { id: self.id.clone(), value: self.volume });
        }
        if !(self.price >= 0.0) || !self.price.is_finite() {
            return Err(CoreError::Price { id: self.id.clone(), value: self.price });
        }
        Ok(())
    }

    pub fn has_source(&self) -> bool {
        self.source != UNSPECIFIED_SOURCE
    }
}

/// A validated, ordered collection of offers with unique ids.
///
/// Offer order is significant: solvers break ties by position in the book.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct OfferBook {
    offers: Vec<Offer>,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl OfferBook {
    pub fn new(offers: Vec<Offer>) -> Result<Self, CoreError> {
        let mut index = HashMap::with_capacity(offers.len());
        for (k, offer) in offers.iter().enumerate() {
            offer.validate()?;
            if index.insert(offer.id.clone(), k).is_some() {
                return Err(CoreError::DuplicateId(offer.id.clone()));
            }
        }
        Ok(Self { offers, index })
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn get(&self, id: &str) -> Option<&Offer> {
        self.position(id).map(|k| &self.offers[k])
    }

    pub fn max_volume(&self) -> f64 {
        self.offers.iter().map(|o| o.volume).fold(0.0, f64::max)
    }

    pub fn max_reliability(&self) -> f64 {
        self.offers.iter().map(|o| o.reliability).fold(0.0, f64::max)
    }

    pub fn into_inner(self) -> Vec<Offer> {
        self.offers
    }
}

impl Deref for OfferBook {
    type Target = [Offer];

    fn deref(&self) -> &[Offer] {
        &self.offers
    }
}

impl<'de> Deserialize<'de> for OfferBook {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let offers = Vec::<Offer>::deserialize(deserializer)?;
        OfferBook::new(offers).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_domain_values() {
        assert!(matches!(Offer::new("a", 10.0, 5.0, 1.0), Err(CoreError::Reliability { .. })));
        assert!(matches!(Offer::new("a", 0.0, 5.0, 0.5), Err(CoreError::Volume { .. })));
        assert!(matches!(Offer::new("a", 10.0, -1.0, 0.5), Err(CoreError::Price { .. })));
        assert!(matches!(Offer::new(" ", 10.0, 1.0, 0.5), Err(CoreError::EmptyId)));
        assert!(Offer::new("a", 10.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn book_rejects_duplicates() {
        let a = Offer::new("x", 10.0, 1.0, 0.5).unwrap();
        let err = OfferBook::new(vec![a.clone(), a]).unwrap_err();
        assert_eq!(err, CoreError::DuplicateId("x".into()));
    }

    #[test]
    fn json_uses_column_names_and_default_source() {
        let book: OfferBook =
            serde_json::from_str(r#"[{"id":"1","volume_mw":40,"reliability":0.8,"price_per_mw":80}]"#).unwrap();
        assert_eq!(book[0].source, UNSPECIFIED_SOURCE);
        assert_eq!(book.position("1"), Some(0));
        let bad =
            serde_json::from_str::<OfferBook>(r#"[{"id":"1","volume_mw":40,"reliability":1.0,"price_per_mw":80}]"#);
        assert!(bad.is_err());
    }
}
