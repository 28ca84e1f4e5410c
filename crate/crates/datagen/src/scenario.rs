use std::fmt;
use std::str::FromStr;

use relres_core::{Offer, OfferBook, Requirement};
use serde::Serialize;

use crate::curve::{grid_offer_book, reliability_grid, CostCurve, CurveKind};
use crate::DatagenError;

/// Requested volume and joint reliability of the 99-offer grid case.
const LARGE_Q: f64 = 500.0;
const LARGE_PHI: f64 = 0.9995;
const LARGE_BLOCK: f64 = 100.0;
const GRID_VOLUME: f64 = 500.0;
const ALPHA: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    /// Six 100 MW offers, one block of 100 MW at 0.99.
    Motivating,
    /// Six offers, two blocks of at least 20 MW, 40 MW at 0.9995.
    SmallCase,
    /// 99 grid offers at linear prices, five 100 MW blocks.
    LargeCase,
    /// Large case with the given minimum block size.
    BlockSweep(f64),
    /// Large case priced by another curve.
    CostSweep(CurveKind),
}

impl Scenario {
    pub fn build(&self) -> Result<ScenarioData, DatagenError> {
        let (offers, requirement) = match *self {
            Scenario::Motivating => (motivating_book()?, Requirement::new(100.0, 0.99, 0.0, 1)?),
            Scenario::SmallCase => (small_book()?, Requirement::new(40.0, 0.9995, 20.0, 2)?),
            Scenario::LargeCase => (large_book(CurveKind::Linear)?, large_requirement(LARGE_BLOCK)?),
            Scenario::BlockSweep(size) => {
                if !(size > 0.0 && size.is_finite()) {
                    return Err(DatagenError::BlockSize(size));
                }
                (large_book(CurveKind::Linear)?, large_requirement(size)?)
            }
            Scenario::CostSweep(kind) => (large_book(kind)?, large_requirement(LARGE_BLOCK)?),
        };
        Ok(ScenarioData { name: self.to_string(), offers, requirement })
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scenario::Motivating => f.write_str("motivating"),
            Scenario::SmallCase => f.write_str("small-case"),
            Scenario::LargeCase => f.write_str("large-case"),
            Scenario::BlockSweep(s) => write!(f, "block-sweep({s})"),
            Scenario::CostSweep(k) => write!(f, "cost-sweep({k})"),
        }
    }
}

impl FromStr for Scenario {
    type Err = DatagenError;

    /// Accepts `block-sweep(250)` as well as `block-sweep:250`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || DatagenError::UnknownScenario(s.to_string());
        let t = s.trim().to_ascii_lowercase();
        let (head, arg) = match t.split_once(['(', ':']) {
            Some((h, rest)) => (h.trim().to_string(), Some(rest.trim_end_matches(')').trim().to_string())),
            None => (t.clone(), None),
        };
        match (head.as_str(), arg) {
            ("motivating", None) => Ok(Scenario::Motivating),
            ("small-case", None) => Ok(Scenario::SmallCase),
            ("large-case", None) => Ok(Scenario::LargeCase),
            ("block-sweep", Some(a)) => a.parse::<f64>().map(Scenario::BlockSweep).map_err(|_| unknown()),
            ("cost-sweep", Some(a)) => a.parse::<CurveKind>().map(Scenario::CostSweep),
            _ => Err(unknown()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioData {
    pub name: String,
    pub offers: OfferBook,
    pub requirement: Requirement,
}

/// Builds the named scenario.
pub fn scenario(name: &str) -> Result<ScenarioData, DatagenError> {
    name.parse::<Scenario>()?.build()
}

fn book(rows: &[(&str, f64, f64, f64)]) -> Result<OfferBook, DatagenError> {
    let offers = rows.iter().map(|&(id, v, r, p)| Offer::new(id, v, p, r)).collect::<Result<Vec<_>, _>>()?;
    Ok(OfferBook::new(offers)?)
}

// (id, MW, reliability, price per MW)
fn motivating_book() -> Result<OfferBook, DatagenError> {
    book(&[
        ("1", 100.0, 0.99, 100.0),
        ("2", 100.0, 0.98, 55.0),
        ("3", 100.0, 0.95, 40.0),
        ("4", 100.0, 0.90, 25.0),
        ("5", 100.0, 0.70, 11.0),
        ("6", 100.0, 0.70, 10.0),
    ])
}

// two identical 0.99 offers
fn small_book() -> Result<OfferBook, DatagenError> {
    book(&[
        ("1", 40.0, 0.80, 80.0),
        ("2", 30.0, 0.90, 90.0),
        ("3", 30.0, 0.95, 95.0),
        ("4", 30.0, 0.98, 98.0),
        ("5a", 20.0, 0.99, 99.0),
        ("5b", 20.0, 0.99, 99.0),
    ])
}

fn large_book(kind: CurveKind) -> Result<OfferBook, DatagenError> {
    grid_offer_book(&reliability_grid(100), GRID_VOLUME, &CostCurve::new(kind, ALPHA))
}

fn large_requirement(block: f64) -> Result<Requirement, DatagenError> {
    Ok(Requirement::with_min_bid_size(LARGE_Q, LARGE_PHI, block, block)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in [
            Scenario::Motivating,
            Scenario::SmallCase,
            Scenario::LargeCase,
            Scenario::BlockSweep(250.0),
            Scenario::BlockSweep(2.5),
            Scenario::CostSweep(CurveKind::Cubic),
        ] {
            assert_eq!(s.to_string().parse::<Scenario>().unwrap(), s);
        }
        assert_eq!("block-sweep:50".parse::<Scenario>().unwrap(), Scenario::BlockSweep(50.0));
        for bad in ["", "huge-case", "block-sweep", "block-sweep(x)", "cost-sweep(sigmoid)", "motivating(1)"] {
            assert!(bad.parse::<Scenario>().is_err(), "{bad}");
        }
        assert!(scenario("block-sweep(0)").is_err());
    }
}
