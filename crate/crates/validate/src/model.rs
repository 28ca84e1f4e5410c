use std::collections::BTreeMap;

use relres_core::{ClearingResult, CoreError, OfferBook};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ValidateError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{count} offers exceed the exact enumeration limit of {cap}")]
    TooManyOffers { count: usize, cap: usize },
    #[error("offer reliability {reliability} exceeds the shock probability {shock} of source `{source_name}`")]
    ShockBelowReliability { source_name: String, shock: f64, reliability: f64 },
    #[error("invalid shock probability {0} (must lie in (0, 1])")]
    ShockProbability(f64),
    #[error("pairwise correlation has no generative model and cannot be sampled or convolved")]
    PairwiseUnsupported,
    #[error("sample count must be at least 1")]
    NoSamples,
}

/// Joint availability model of the offers in a portfolio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum AvailabilityModel {
    /// Independent Bernoulli availability per offer.
    Independence,
    /// Offer `i` is available iff the shared shock of its source and an
    /// idiosyncratic draw with probability `R_i / p_s` both succeed.
    /// Sources without an entry never fail jointly.
    CommonSource { shocks: BTreeMap<String, f64> },
    /// Correlation weights as used in clearing; not supported here.
    Pairwise { values: Vec<Vec<f64>> },
}

impl AvailabilityModel {
    pub fn common_source<I, S>(shocks: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        Self::CommonSource { shocks: shocks.into_iter().map(|(s, p)| (s.into(), p)).collect() }
    }
}

/// One offer's deliverable quantity in a portfolio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slice {
    pub volume: f64,
    pub reliability: f64,
    #[serde(default)]
    pub source: String,
}

impl Slice {
    pub fn new(volume: f64, reliability: f64) -> Self {
        Self { volume, reliability, source: String::new() }
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = source.into();
        self
    }
}

/// Accepted offers of `result` with their quantities summed over blocks,
/// in first-appearance order.
pub fn portfolio_slices(book: &OfferBook, result: &ClearingResult) -> Result<Vec<Slice>, CoreError> {
    let mut order: Vec<usize> = Vec::new();
    let mut volume: BTreeMap<usize, f64> = BTreeMap::new();
    for a in &result.assignments {
        for m in a.accepted() {
            let i = book.position(&m.offer_id).ok_or_else(|| CoreError::UnknownOffer(m.offer_id.clone()))?;
            if !volume.contains_key(&i) {
                order.push(i);
            }
            *volume.entry(i).or_default() += m.quantity;
        }
    }
    Ok(order
        .into_iter()
        .map(|i| Slice { volume: volume[&i], reliability: book[i].reliability, source: book[i].source.clone() })
        .collect())
}

/// Source groups under a common-source model: `(shock probability, slice
/// indices, idiosyncratic probabilities)`; slices of unlisted sources come
/// back as singleton groups with shock 1.
pub(crate) struct Groups {
    pub shocks: Vec<f64>,
    pub members: Vec<Vec<usize>>,
    pub idio: Vec<f64>,
}

pub(crate) fn groups(slices: &[Slice], model: &AvailabilityModel) -> Result<Groups, ValidateError> {
    let mut out = Groups { shocks: Vec::new(), members: Vec::new(), idio: Vec::new() };
    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    for (k, s) in slices.iter().enumerate() {
        if !(0.0..1.0).contains(&s.reliability) {
            return Err(CoreError::Probability(s.reliability, "[0, 1)").into());
        }
        let shock = match model {
            AvailabilityModel::Independence => None,
            AvailabilityModel::CommonSource { shocks } => shocks.get(&s.source).copied(),
            AvailabilityModel::Pairwise { .. } => return Err(ValidateError::PairwiseUnsupported),
        };
        match shock {
            None => {
                out.shocks.push(1.0);
                out.members.push(vec![k]);
                out.idio.push(s.reliability);
            }
            Some(p) => {
                if !(p > 0.0 && p <= 1.0) {
                    return Err(ValidateError::ShockProbability(p));
                }
                if s.reliability > p {
                    return Err(ValidateError::ShockBelowReliability {
                        source_name: s.source.clone(),
                        shock: p,
                        reliability: s.reliability,
                    });
                }
                let g = *index.entry(s.source.as_str()).or_insert_with(|| {
                    out.shocks.push(p);
                    out.members.push(Vec::new());
                    out.shocks.len() - 1
                });
                out.members[g].push(k);
                out.idio.push((s.reliability / p).min(1.0));
            }
        }
    }
    Ok(out)
}
