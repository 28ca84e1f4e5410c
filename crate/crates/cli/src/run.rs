//! The `clear`, `validate` and `export-lp` actions.

use std::fs;
use std::path::{Path, PathBuf};

use relres_core::{ClearingResult, SolveStatus};
use relres_engine::{solve, verify_solution, write_lp, VerificationReport};
use relres_validate::{delivery_probability, AvailabilityModel, DeliveryOptions};
use serde::Serialize;

use crate::config::{load_problem, OutputFormat, Problem, RunConfig};
use crate::error::{CliError, EXIT_GAP_LIMITED, EXIT_INFEASIBLE, EXIT_OK};
use crate::report::{assignments_csv, result_table};

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub problem: Problem,
    pub result: ClearingResult,
    pub report: VerificationReport,
    pub table: String,
    pub artifacts: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        status_exit_code(self.result.status())
    }
}

pub fn status_exit_code(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::ProvenOptimal => EXIT_OK,
        SolveStatus::Infeasible => EXIT_INFEASIBLE,
        SolveStatus::GapLimited => EXIT_GAP_LIMITED,
    }
}

/// Pretty JSON with a trailing newline; stable for equal results.
pub fn result_json(result: &ClearingResult) -> String {
    let mut s = serde_json::to_string_pretty(result).expect("results serialize");
    s.push('\n');
    s
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf, CliError> {
    fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

fn out_dir(cfg: &RunConfig) -> Result<Option<&Path>, CliError> {
    match &cfg.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            Ok(Some(dir.as_path()))
        }
        None => Ok(None),
    }
}

/// Solves the configured problem and writes the requested artifacts to the
/// output directory as `<name>-<formulation>.{json,csv,txt,lp}`.
pub fn run_clearing(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let problem = load_problem(&cfg.input, &cfg.overrides)?;
    let inst = problem.instance(cfg.formulation, &cfg.params)?;
    let result = solve(&inst, &cfg.solver)?;
    let report = verify_solution(&inst, &result);
    let table = result_table(&result);

    let mut artifacts = Vec::new();
    if let Some(dir) = out_dir(cfg)? {
        let stem = problem.artifact_stem(cfg.formulation);
        for format in &cfg.formats {
            let path = match format {
                OutputFormat::Json => write(dir.join(format!("{stem}.json")), &result_json(&result))?,
                OutputFormat::Csv => write(dir.join(format!("{stem}.csv")), &assignments_csv(&result))?,
                OutputFormat::Table => write(dir.join(format!("{stem}.txt")), &table)?,
                OutputFormat::Lp => write_lp(&inst, dir, &stem).map_err(|e| CliError::io(dir, e))?,
            };
            artifacts.push(path);
        }
    }
    Ok(RunOutcome { problem, result, report, table, artifacts })
}

/// Writes the LP model of the configured problem to `<out>/<name>-<formulation>.lp`.
pub fn export_lp_file(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let problem = load_problem(&cfg.input, &cfg.overrides)?;
    let inst = problem.instance(cfg.formulation, &cfg.params)?;
    // refuse nonlinear formulations before touching the file system
    relres_engine::build_model(&inst)?;
    let dir = out_dir(cfg)?.unwrap_or(Path::new("."));
    write_lp(&inst, dir, &problem.artifact_stem(cfg.formulation)).map_err(|e| CliError::io(dir, e))
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationOutcome {
    pub report: VerificationReport,
    /// `P(deliverable volume >= Q)` of the accepted offers.
    pub delivery_probability: f64,
    pub model: AvailabilityModel,
}

impl ValidationOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.passed() {
            EXIT_OK
        } else {
            EXIT_INFEASIBLE
        }
    }
}

pub fn read_result(path: &Path) -> Result<ClearingResult, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Json { path: path.to_path_buf(), source: e })
}

pub fn read_model(path: &Path) -> Result<AvailabilityModel, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Json { path: path.to_path_buf(), source: e })
}

/// Rechecks a stored result against the configured problem under the
/// result's own formulation and computes its delivery probability.
pub fn validate_result(
    cfg: &RunConfig,
    result: &ClearingResult,
    model: &AvailabilityModel,
    samples: u64,
) -> Result<ValidationOutcome, CliError> {
    let problem = load_problem(&cfg.input, &cfg.overrides)?;
    let inst = problem.instance(result.formulation, &cfg.params)?;
    let report = verify_solution(&inst, result);
    let opts = DeliveryOptions { samples, seed: cfg.seed, workers: cfg.solver.workers };
    let p = delivery_probability(&problem.offers, result, problem.requirement.target_volume, model, &opts)?;
    Ok(ValidationOutcome { report, delivery_probability: p, model: model.clone() })
}
