use std::fmt;
use std::str::FromStr;

use relres_core::{Offer, OfferBook};
use serde::{Deserialize, Serialize};

use crate::DatagenError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    Constant,
    Linear,
    Exponential,
    Quadratic,
    Cubic,
    Logarithmic,
}

impl CurveKind {
    pub const ALL: [CurveKind; 6] = [
        CurveKind::Constant,
        CurveKind::Linear,
        CurveKind::Exponential,
        CurveKind::Quadratic,
        CurveKind::Cubic,
        CurveKind::Logarithmic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::Constant => "constant",
            CurveKind::Linear => "linear",
            CurveKind::Exponential => "exponential",
            CurveKind::Quadratic => "quadratic",
            CurveKind::Cubic => "cubic",
            CurveKind::Logarithmic => "logarithmic",
        }
    }
}

impl fmt::Display for CurveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CurveKind {
    type Err = DatagenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase();
        let kind = match key.as_str() {
            "constant" | "con" => CurveKind::Constant,
            "linear" | "lin" => CurveKind::Linear,
            "exponential" | "exp" => CurveKind::Exponential,
            "quadratic" | "qua" => CurveKind::Quadratic,
            "cubic" | "cub" => CurveKind::Cubic,
            "logarithmic" | "log" => CurveKind::Logarithmic,
            _ => return Err(DatagenError::UnknownCurve(s.to_string())),
        };
        Ok(kind)
    }
}

/// Price per MW as a function of offer reliability, scaled by `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostCurve {
    pub kind: CurveKind,
    pub alpha: f64,
}

impl CostCurve {
    pub fn new(kind: CurveKind, alpha: f64) -> Self {
        Self { kind, alpha }
    }

    pub fn linear(alpha: f64) -> Self {
        Self::new(CurveKind::Linear, alpha)
    }

    pub fn price(&self, reliability: f64) -> Result<f64, DatagenError> {
        price(self, reliability)
    }
}

/// Evaluates `curve` at `reliability`.
///
/// The logarithmic curve is `-(alpha / 9) ln(1 - R)`, which reaches `alpha`
/// near `R = 0.9999` and grows without bound as `R` approaches 1.
pub fn price(curve: &CostCurve, reliability: f64) -> Result<f64, DatagenError> {
    let r = reliability;
    if !(0.0..1.0).contains(&r) {
        return Err(DatagenError::Reliability(r));
    }
    let a = curve.alpha;
    Ok(match curve.kind {
        CurveKind::Constant => a,
        CurveKind::Linear => a * r,
        CurveKind::Exponential => a * r.exp_m1() / (std::f64::consts::E - 1.0),
        CurveKind::Quadratic => a * r * r,
        CurveKind::Cubic => a * r * r * r,
        CurveKind::Logarithmic => -(a / 9.0) * (-r).ln_1p(),
    })
}

/// `{step, 2 step, ...}` strictly below 1, e.g. 0.01 to 0.99 for 100 steps.
pub fn reliability_grid(steps: u32) -> Vec<f64> {
    (1..steps).map(|k| k as f64 / steps as f64).collect()
}

/// One offer per grid point with the given volume and curve price. Ids are `r01`, `r02`, ... by
/// grid position.
pub fn grid_offer_book(grid: &[f64], volume: f64, curve: &CostCurve) -> Result<OfferBook, DatagenError> {
    let offers = grid
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let p = price(curve, r)?;
            Ok(Offer::new(format!("r{:02}", k + 1), volume, p, r)?)
        })
        .collect::<Result<Vec<_>, DatagenError>>()?;
    Ok(OfferBook::new(offers)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_values() {
        assert_eq!(price(&CostCurve::linear(100.0), 0.99).unwrap(), 99.0);
        assert_eq!(price(&CostCurve::new(CurveKind::Cubic, 100.0), 0.5).unwrap(), 12.5);
        assert_eq!(price(&CostCurve::new(CurveKind::Quadratic, 100.0), 0.9).unwrap(), 81.0);
        let near_one = price(&CostCurve::new(CurveKind::Exponential, 100.0), 1.0 - 1e-12).unwrap();
        assert!((near_one - 100.0).abs() < 1e-9);
        let log = price(&CostCurve::new(CurveKind::Logarithmic, 100.0), 0.9999).unwrap();
        assert!((log - 100.0 * 4.0 / 9.0 * 10f64.ln()).abs() < 1e-9);
        assert_eq!(price(&CostCurve::new(CurveKind::Constant, 7.0), 0.0).unwrap(), 7.0);
        assert!(price(&CostCurve::linear(100.0), 1.0).is_err());
        assert!(price(&CostCurve::linear(100.0), -0.1).is_err());
    }

    #[test]
    fn curve_names() {
        for k in CurveKind::ALL {
            assert_eq!(k.as_str().parse::<CurveKind>().unwrap(), k);
        }
        assert_eq!("LOG".parse::<CurveKind>().unwrap(), CurveKind::Logarithmic);
        assert!("sigmoid".parse::<CurveKind>().is_err());
    }

    #[test]
    fn grid_books() {
        let grid = reliability_grid(100);
        assert_eq!(grid.len(), 99);
        assert_eq!(grid[0], 0.01);
        assert_eq!(grid[98], 0.99);
        let book = grid_offer_book(&grid, 500.0, &CostCurve::linear(100.0)).unwrap();
        assert_eq!(book.len(), 99);
        for (k, o) in book.iter().enumerate() {
            assert!((o.price - (k + 1) as f64).abs() < 1e-12);
            assert_eq!(o.volume, 500.0);
        }
        let one = grid_offer_book(&[0.9], 10.0, &CostCurve::new(CurveKind::Quadratic, 100.0)).unwrap();
        assert_eq!(one[0].price, 81.0);
        assert!(grid_offer_book(&[], 10.0, &CostCurve::linear(1.0)).unwrap().is_empty());
    }
}
