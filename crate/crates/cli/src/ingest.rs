//! Offer books from CSV or the JSON mirror format.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use relres_core::{Offer, OfferBook};
use serde::Deserialize;

use crate::error::CliError;

/// Reads an offer book. Files ending in `.json` hold either an array of
/// offers or an object with an `offers` array; anything else is CSV with
/// the header `id,volume_mw,reliability,price_per_mw,source`, where the
/// `source` column may be omitted.
pub fn ingest_offers(path: &Path) -> Result<OfferBook, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let offers = if is_json { parse_json(path, &text)? } else { parse_csv(path, &text)? };
    if offers.is_empty() {
        return Err(CliError::NoOffers(path.to_path_buf()));
    }
    let mut seen = HashMap::new();
    for (line, o) in &offers {
        if let Some(first) = seen.insert(o.id.as_str(), *line) {
            return Err(CliError::Parse {
                path: path.to_path_buf(),
                line: *line,
                message: format!("duplicate offer id `{}` (first seen on line {first})", o.id),
            });
        }
    }
    Ok(OfferBook::new(offers.into_iter().map(|(_, o)| o).collect())?)
}

fn tidy(mut offer: Offer) -> Offer {
    let source = std::mem::take(&mut offer.source);
    offer.with_source(source)
}

fn check(path: &Path, line: u64, offer: Offer) -> Result<(u64, Offer), CliError> {
    let offer = tidy(offer);
    offer.validate().map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("offer `{}`: {e}", offer.id),
    })?;
    Ok((line, offer))
}

fn parse_csv(path: &Path, text: &str) -> Result<Vec<(u64, Offer)>, CliError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| CliError::Parse { path: path.to_path_buf(), line: 1, message: e.to_string() })?
        .clone();
    for required in ["id", "volume_mw", "reliability", "price_per_mw"] {
        if !headers.iter().any(|h| h == required) && !headers.is_empty() {
            return Err(CliError::Parse {
                path: path.to_path_buf(),
                line: 1,
                message: format!("missing column `{required}`"),
            });
        }
    }
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let offer: Offer = record.deserialize(Some(&headers)).map_err(|e| CliError::Parse {
            path: path.to_path_buf(),
            line,
            message: e.to_string(),
        })?;
        out.push(check(path, line, offer)?);
    }
    Ok(out)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonBook {
    List(Vec<Offer>),
    Wrapped { offers: Vec<Offer> },
}

fn parse_json(path: &Path, text: &str) -> Result<Vec<(u64, Offer)>, CliError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let book: JsonBook = serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line() as u64,
        message: e.to_string(),
    })?;
    let offers = match book {
        JsonBook::List(o) | JsonBook::Wrapped { offers: o } => o,
    };
    // JSON entries are numbered by position
    offers.into_iter().enumerate().map(|(k, o)| check(path, k as u64 + 1, o)).collect()
}
