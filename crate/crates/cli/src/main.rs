use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use relres_cli::error::{CliError, EXIT_INPUT, EXIT_OK};
use relres_cli::report::{format_amount, format_reliability};
use relres_cli::run::{read_model, read_result};
use relres_cli::{
    config::read_correlation, export_lp_file, result_json, run_clearing, run_sweep, sweep_csv, validate_result,
    InputSource, OutputFormat, Overrides, RunConfig, SweepKind,
};
use relres_core::Formulation;
use relres_datagen::offers_to_csv;
use relres_validate::AvailabilityModel;

/// Reliability-aware reserve procurement.
#[derive(Parser)]
#[command(name = "relres", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clear a market and report the procured portfolio.
    Clear(Common),
    /// Recheck a stored result and compute its delivery probability.
    Validate {
        #[command(flatten)]
        common: Common,
        /// Result JSON written by `clear`.
        #[arg(long)]
        result: PathBuf,
        /// Monte Carlo samples for portfolios too large to convolve.
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// Availability model as JSON, e.g. `{"kind": "common-source", "shocks": {"wind": 0.99}}`.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Solve one instance per sweep point and write a combined CSV.
    Sweep {
        #[arg(value_enum)]
        kind: SweepKind,
        #[command(flatten)]
        common: Common,
        /// Block sizes in MW or curve names.
        #[arg(long, value_delimiter = ',')]
        points: Vec<String>,
        /// Price scale of the cost curves.
        #[arg(long, default_value_t = 100.0)]
        alpha: f64,
    },
    /// Write the linear model in LP text format.
    ExportLp(Common),
    /// Print or write a built-in scenario's offer book.
    Scenario {
        name: String,
        /// Directory for `<name>.csv` and `<name>.requirement.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// Offer book (CSV, or JSON by extension).
    #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
    input: Option<PathBuf>,
    /// Built-in scenario, e.g. small-case or block-sweep(250).
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long, short = 'f', default_value = "milp", value_parser = parse_formulation)]
    formulation: Formulation,
    /// Requested volume in MW.
    #[arg(long)]
    q: Option<f64>,
    /// Required joint reliability.
    #[arg(long)]
    phi: Option<f64>,
    /// Minimum block volume in MW.
    #[arg(long)]
    bmin: Option<f64>,
    #[arg(long, conflicts_with = "min_bid")]
    blocks: Option<usize>,
    /// Minimum bid size in MW; sets the block count to ceil(Q / size).
    #[arg(long)]
    min_bid: Option<f64>,
    #[arg(long)]
    big_m: Option<f64>,
    /// Per-block reliability floor of the linear formulations.
    #[arg(long)]
    psi: Option<f64>,
    /// Uniform offer reliability (uniform formulation).
    #[arg(long)]
    uniform: Option<f64>,
    /// Correlation matrix JSON (correlated formulation).
    #[arg(long)]
    correlation: Option<PathBuf>,
    /// Reliability threshold of the unaware benchmark.
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    node_limit: Option<u64>,
    /// Search time limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Relative optimality gap.
    #[arg(long)]
    gap: Option<f64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "table,json")]
    format: Vec<OutputFormat>,
}

fn parse_formulation(s: &str) -> Result<Formulation, String> {
    s.parse()
}

impl Common {
    fn config(&self) -> Result<RunConfig, CliError> {
        let input = match (&self.input, &self.scenario) {
            (Some(p), None) => InputSource::File(p.clone()),
            (None, Some(s)) => InputSource::Scenario(s.clone()),
            _ => return Err(CliError::Usage("give exactly one of --input and --scenario".into())),
        };
        let mut cfg = RunConfig::new(input, self.formulation);
        cfg.overrides = Overrides {
            q: self.q,
            phi: self.phi,
            bmin: self.bmin,
            blocks: self.blocks,
            min_bid: self.min_bid,
            big_m: self.big_m,
        };
        cfg.params.psi = self.psi;
        cfg.params.uniform_reliability = self.uniform;
        cfg.params.benchmark_threshold = self.threshold;
        if let Some(path) = &self.correlation {
            cfg.params.correlation = Some(read_correlation(path)?);
        }
        cfg.solver = cfg.solver.with_workers(self.workers);
        if let Some(n) = self.node_limit {
            cfg.solver = cfg.solver.with_node_limit(n);
        }
        if let Some(t) = self.time_limit {
            let t = Duration::try_from_secs_f64(t).map_err(|e| CliError::Usage(format!("--time-limit: {e}")))?;
            cfg.solver = cfg.solver.with_time_limit(t);
        }
        if let Some(g) = self.gap {
            cfg.solver.rel_gap = g;
        }
        cfg.seed = self.seed;
        cfg.out = self.out.clone();
        cfg.formats = self.format.clone();
        Ok(cfg)
    }
}

fn clear(common: &Common) -> Result<i32, CliError> {
    let cfg = common.config()?;
    let outcome = run_clearing(&cfg)?;
    let mut stdout = std::io::stdout().lock();
    if cfg.wants(OutputFormat::Table) {
        let _ = write!(stdout, "{}", outcome.table);
    }
    if cfg.out.is_none() && cfg.wants(OutputFormat::Json) {
        let _ = write!(stdout, "{}", result_json(&outcome.result));
    }
    let flagged = outcome.result.status() == relres_core::SolveStatus::Infeasible;
    for v in outcome.report.violations.iter().filter(|_| !flagged) {
        eprintln!("warning: {}: {}", v.constraint, v.detail);
    }
    for p in &outcome.artifacts {
        eprintln!("wrote {}", p.display());
    }
    Ok(outcome.exit_code())
}

fn validate(common: &Common, result: &Path, samples: u64, model: &Option<PathBuf>) -> Result<i32, CliError> {
    let cfg = common.config()?;
    let stored = read_result(result)?;
    let model = match model {
        Some(p) => read_model(p)?,
        None => AvailabilityModel::Independence,
    };
    let outcome = validate_result(&cfg, &stored, &model, samples)?;
    let r = &outcome.report;
    println!("cost: {}", format_amount(r.recomputed_cost));
    println!("volume: {} MW", format_amount(r.recomputed_volume));
    println!("block-product reliability: {}", format_reliability(r.joint_reliability));
    println!("target reliability: {}", format_reliability(r.target_reliability));
    if let Some(l) = r.linearized_joint {
        println!("linearized guarantee: {}", format_reliability(l));
    }
    println!("delivery probability: {}", format_reliability(outcome.delivery_probability));
    if r.passed() {
        println!("no violations");
    }
    for v in &r.violations {
        println!("violation: {}: {}", v.constraint, v.detail);
    }
    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let stem = result.file_stem().and_then(|s| s.to_str()).unwrap_or("result");
        let path = dir.join(format!("{stem}.validation.json"));
        let text = serde_json::to_string_pretty(&outcome).expect("report serializes") + "\n";
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(outcome.exit_code())
}

fn sweep(kind: SweepKind, common: &Common, points: &[String], alpha: f64) -> Result<i32, CliError> {
    let cfg = common.config()?;
    let points = if points.is_empty() { kind.default_points() } else { points.to_vec() };
    let rows = run_sweep(kind, &points, &cfg, alpha)?;
    let csv = sweep_csv(&rows);
    print!("{csv}");
    for r in rows.iter().filter(|r| r.error.is_some()) {
        eprintln!("point {}: {}", r.parameter, r.error.as_deref().unwrap_or_default());
    }
    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let name = relres_cli::load_problem(&cfg.input, &cfg.overrides)?.name;
        let tag = match kind {
            SweepKind::BlockSize => "block-size",
            SweepKind::CostCurve => "cost-curve",
        };
        let path = dir.join(format!("{name}-{tag}-sweep.csv"));
        std::fs::write(&path, &csv).map_err(|e| CliError::io(&path, e))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(EXIT_OK)
}

fn scenario(name: &str, out: &Option<PathBuf>) -> Result<i32, CliError> {
    let data = relres_datagen::scenario(name)?;
    let csv = offers_to_csv(&data.offers);
    let req = serde_json::to_string_pretty(&data.requirement).expect("requirement serializes") + "\n";
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
            let stem = relres_cli::load_problem(&InputSource::Scenario(name.into()), &Overrides::default())?.name;
            for (ext, text) in [("csv", &csv), ("requirement.json", &req)] {
                let path = dir.join(format!("{stem}.{ext}"));
                std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
                eprintln!("wrote {}", path.display());
            }
        }
        None => {
            print!("{csv}");
            let r = &data.requirement;
            eprintln!(
                "Q = {} MW, phi = {}, minimum block = {} MW, {} blocks",
                r.target_volume, r.target_reliability, r.min_block_volume, r.block_count
            );
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Clear(c) => clear(c),
        Command::Validate { common, result, samples, model } => validate(common, result, *samples, model),
        Command::Sweep { kind, common, points, alpha } => sweep(*kind, common, points, *alpha),
        Command::ExportLp(c) => c.config().and_then(|cfg| export_lp_file(&cfg)).map(|p| {
            eprintln!("wrote {}", p.display());
            EXIT_OK
        }),
        Command::Scenario { name, out } => scenario(name, out),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.exit_code();
            ExitCode::from(if code == EXIT_OK { EXIT_INPUT as u8 } else { code as u8 })
        }
    }
}
