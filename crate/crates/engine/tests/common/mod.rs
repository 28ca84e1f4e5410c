#![allow(dead_code)]

use relres_core::{Formulation, Offer, OfferBook, Requirement};
use relres_engine::{build_instance, FormulationParams, ProblemInstance};

pub fn book(rows: &[(&str, f64, f64, f64)]) -> OfferBook {
    OfferBook::new(rows.iter().map(|&(id, v, r, p)| Offer::new(id, v, p, r).unwrap()).collect()).unwrap()
}

/// Offers of the two-block example: (id, MW, reliability, price).
pub fn small_book() -> OfferBook {
    book(&[
        ("1", 40.0, 0.80, 80.0),
        ("2", 30.0, 0.90, 90.0),
        ("3", 30.0, 0.95, 95.0),
        ("4", 30.0, 0.98, 98.0),
        ("5a", 20.0, 0.99, 99.0),
        ("5b", 20.0, 0.99, 99.0),
    ])
}

pub fn small(formulation: Formulation) -> ProblemInstance {
    let req = Requirement::new(40.0, 0.9995, 20.0, 2).unwrap();
    build_instance(small_book(), req, formulation, FormulationParams::default()).unwrap()
}

/// 99 offers with reliability 0.01..0.99, 500 MW each, price 100 R.
pub fn grid_book() -> OfferBook {
    OfferBook::new(
        (1..=99)
            .map(|k| {
                let r = k as f64 / 100.0;
                Offer::new(format!("r{k:02}"), 500.0, 100.0 * r, r).unwrap()
            })
            .collect(),
    )
    .unwrap()
}

pub fn large(blocks: usize) -> ProblemInstance {
    let req = Requirement::new(500.0, 0.9995, 500.0 / blocks as f64, blocks).unwrap();
    build_instance(grid_book(), req, Formulation::Milp, FormulationParams::default()).unwrap()
}
