//! Run configuration and problem assembly.

use std::path::{Path, PathBuf};

use relres_core::{derive_block_count, Formulation, OfferBook, Requirement};
use relres_engine::{build_instance, CorrelationMatrix, FormulationParams, ProblemInstance, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::ingest::ingest_offers;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputSource {
    File(PathBuf),
    Scenario(String),
}

/// Requirement fields replacing those of a scenario. With a file input,
/// `q` and `phi` are mandatory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    pub q: Option<f64>,
    pub phi: Option<f64>,
    pub bmin: Option<f64>,
    pub blocks: Option<usize>,
    pub min_bid: Option<f64>,
    pub big_m: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
    Lp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: InputSource,
    pub formulation: Formulation,
    pub overrides: Overrides,
    pub params: FormulationParams,
    pub solver: SolverConfig,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub formats: Vec<OutputFormat>,
}

impl RunConfig {
    pub fn new(input: InputSource, formulation: Formulation) -> Self {
        Self {
            input,
            formulation,
            overrides: Overrides::default(),
            params: FormulationParams::default(),
            solver: SolverConfig::default(),
            seed: 0,
            out: None,
            formats: vec![OutputFormat::Table, OutputFormat::Json],
        }
    }

    pub fn scenario(name: &str, formulation: Formulation) -> Self {
        Self::new(InputSource::Scenario(name.to_string()), formulation)
    }

    pub fn wants(&self, format: OutputFormat) -> bool {
        self.formats.contains(&format)
    }
}

/// Offers and requirement before a formulation is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    /// File stem or scenario name, safe for file names.
    pub name: String,
    pub offers: OfferBook,
    pub requirement: Requirement,
}

impl Problem {
    pub fn instance(&self, formulation: Formulation, params: &FormulationParams) -> Result<ProblemInstance, CliError> {
        Ok(build_instance(self.offers.clone(), self.requirement.clone(), formulation, params.clone())?)
    }

    /// `<name>-<formulation>`, the stem of every artifact of one run.
    pub fn artifact_stem(&self, formulation: Formulation) -> String {
        format!("{}-{}", self.name, formulation)
    }
}

fn file_safe(name: &str) -> String {
    let mut s: String =
        name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '_' { c } else { '-' }).collect();
    while s.ends_with('-') {
        s.pop();
    }
    s
}

/// Loads the offers and applies the requirement overrides.
pub fn load_problem(input: &InputSource, ov: &Overrides) -> Result<Problem, CliError> {
    let (name, offers, base) = match input {
        InputSource::Scenario(s) => {
            let data = relres_datagen::scenario(s)?;
            (file_safe(&data.name), data.offers, Some(data.requirement))
        }
        InputSource::File(path) => {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("offers");
            (file_safe(stem), ingest_offers(path)?, None)
        }
    };
    let requirement = resolve_requirement(base, ov)?;
    Ok(Problem { name, offers, requirement })
}

fn resolve_requirement(base: Option<Requirement>, ov: &Overrides) -> Result<Requirement, CliError> {
    if ov.blocks.is_some() && ov.min_bid.is_some() {
        return Err(CliError::Usage("give either --blocks or --min-bid, not both".into()));
    }
    let q = match (ov.q, &base) {
        (Some(q), _) => q,
        (None, Some(b)) => b.target_volume,
        (None, None) => return Err(CliError::Usage("--q is required with --input".into())),
    };
    let phi = match (ov.phi, &base) {
        (Some(p), _) => p,
        (None, Some(b)) => b.target_reliability,
        (None, None) => return Err(CliError::Usage("--phi is required with --input".into())),
    };
    let bmin = ov.bmin.or(base.as_ref().map(|b| b.min_block_volume)).unwrap_or(0.0);
    let blocks = match (ov.blocks, ov.min_bid) {
        (Some(k), _) => k,
        (None, Some(s)) => derive_block_count(q, s)?,
        (None, None) => base.as_ref().map_or(1, |b| b.block_count),
    };
    let mut req = Requirement::new(q, phi, bmin, blocks)?;
    if let Some(m) = ov.big_m.or(base.and_then(|b| b.big_m)) {
        req = req.with_big_m(m)?;
    }
    Ok(req)
}

/// Reads a correlation matrix stored as `{"ids": [...], "values": [[...]]}`.
pub fn read_correlation(path: &Path) -> Result<CorrelationMatrix, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let raw: CorrelationMatrix =
        serde_json::from_str(&text).map_err(|e| CliError::Json { path: path.to_path_buf(), source: e })?;
    Ok(CorrelationMatrix::new(raw.ids().to_vec(), raw.values().to_vec())?)
}
