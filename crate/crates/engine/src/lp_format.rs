//! LP text files for external MILP solvers.
//!
//! Numbers are written in shortest round-trip form, so `parse_lp` restores
//! the exported model exactly. Every column is listed in the `Bounds`
//! section in model order.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::EngineError;
use crate::instance::ProblemInstance;
use crate::model::{build_model, Column, MilpModel, ModelRow, RowKind};
use crate::simplex::RowSense;

const TERMS_PER_LINE: usize = 6;

/// Model of a linear formulation in LP text.
pub fn export_lp(inst: &ProblemInstance) -> Result<String, EngineError> {
    Ok(model_to_lp(&build_model(inst)?))
}

/// Writes `<dir>/<name>.lp` and returns its path.
pub fn write_lp(inst: &ProblemInstance, dir: &Path, name: &str) -> std::io::Result<std::path::PathBuf> {
    let text = export_lp(inst).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidInput, e.to_string()))?;
    let path = dir.join(format!("{name}.lp"));
    std::fs::write(&path, text)?;
    Ok(path)
}

fn push_terms(out: &mut String, terms: &[(usize, f64)], cols: &[Column]) {
    for (k, &(j, c)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if c.is_sign_negative() { '-' } else { '+' };
        let _ = write!(out, " {sign} {} {}", c.abs(), cols[j].name);
    }
}

pub fn model_to_lp(model: &MilpModel) -> String {
    let cols = &model.columns;
    let mut out = String::new();
    let _ = writeln!(out, "\\ Problem: {}", model.name);
    out.push_str("Minimize\n obj:");
    push_terms(&mut out, &model.objective, cols);
    out.push_str("\nSubject To\n");
    for row in &model.rows {
        let _ = write!(out, " {}:", row.name);
        push_terms(&mut out, &row.coeffs, cols);
        let op = match row.sense {
            RowSense::Le => "<=",
            RowSense::Ge => ">=",
            RowSense::Eq => "=",
        };
        let _ = writeln!(out, " {op} {}", row.rhs);
    }
    out.push_str("Bounds\n");
    for c in cols {
        let _ = writeln!(out, " {} <= {} <= {}", c.lower, c.name, c.upper);
    }
    out.push_str("Binaries\n");
    let bins: Vec<&str> = cols.iter().filter(|c| c.binary).map(|c| c.name.as_str()).collect();
    for chunk in bins.chunks(10) {
        let _ = writeln!(out, " {}", chunk.join(" "));
    }
    out.push_str("End\n");
    out
}

#[derive(PartialEq)]
enum Section {
    Start,
    Objective,
    Rows,
    Bounds,
    Binaries,
    End,
}

fn err(line: usize, message: impl Into<String>) -> EngineError {
    EngineError::LpParse { line, message: message.into() }
}

fn parse_num(tok: &str, line: usize) -> Result<f64, EngineError> {
    tok.parse::<f64>().map_err(|_| err(line, format!("expected a number, found `{tok}`")))
}

fn row_kind(name: &str) -> RowKind {
    let prefix = name.split('_').next().unwrap_or("");
    match prefix {
        "link" => RowKind::VolumeLink,
        "demand" => RowKind::Demand,
        "cap" => RowKind::Capacity,
        "rel" => RowKind::Reliability,
        "src" => RowKind::SourceLimit,
        "count" => RowKind::Cardinality,
        _ => RowKind::VolumeFloor,
    }
}

/// Parses LP text written by [`export_lp`].
pub fn parse_lp(text: &str) -> Result<MilpModel, EngineError> {
    // (line, name, body) per objective or constraint, continuation lines joined
    let mut entries: Vec<(usize, String, String)> = Vec::new();
    let mut bounds: Vec<(usize, String)> = Vec::new();
    let mut binaries: Vec<(usize, String)> = Vec::new();
    let mut name = String::new();
    let mut section = Section::Start;

    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('\\') {
            if let Some(n) = rest.trim().strip_prefix("Problem:") {
                name = n.trim().to_string();
            }
            continue;
        }
        let next = match line.to_ascii_lowercase().as_str() {
            "minimize" | "minimise" | "min" => Some(Section::Objective),
            "subject to" | "st" | "s.t." => Some(Section::Rows),
            "bounds" => Some(Section::Bounds),
            "binaries" | "binary" | "bin" => Some(Section::Binaries),
            "end" => Some(Section::End),
            _ => None,
        };
        if let Some(s) = next {
            section = s;
            continue;
        }
        match section {
            Section::Start => return Err(err(line_no, "expected `Minimize`")),
            Section::End => return Err(err(line_no, "text after `End`")),
            Section::Objective | Section::Rows => {
                let starts_new = line.split_whitespace().next().is_some_and(|t| t.ends_with(':'));
                if starts_new {
                    let (label, body) = line.split_once(':').unwrap_or_default();
                    entries.push((line_no, label.trim().to_string(), body.to_string()));
                } else if let Some(last) = entries.last_mut() {
                    last.2.push(' ');
                    last.2.push_str(line);
                } else {
                    return Err(err(line_no, "continuation line without a row"));
                }
            }
            Section::Bounds => bounds.push((line_no, line.to_string())),
            Section::Binaries => {
                binaries.extend(line.split_whitespace().map(|t| (line_no, t.to_string())));
            }
        }
    }
    if section != Section::End {
        return Err(err(text.lines().count(), "missing `End`"));
    }

    let mut columns: Vec<Column> = Vec::new();
    let mut index = std::collections::HashMap::new();
    for (line_no, b) in &bounds {
        let toks: Vec<&str> = b.split_whitespace().collect();
        if toks.len() != 5 || toks[1] != "<=" || toks[3] != "<=" {
            return Err(err(*line_no, "expected `lower <= name <= upper`"));
        }
        let lower = parse_num(toks[0], *line_no)?;
        let upper = parse_num(toks[4], *line_no)?;
        if index.insert(toks[2].to_string(), columns.len()).is_some() {
            return Err(err(*line_no, format!("column `{}` bounded twice", toks[2])));
        }
        columns.push(Column { name: toks[2].to_string(), lower, upper, binary: false });
    }
    for (line_no, b) in &binaries {
        let j = *index.get(b).ok_or_else(|| err(*line_no, format!("unknown binary `{b}`")))?;
        columns[j].binary = true;
    }

    let terms = |line_no: usize, toks: &[&str]| -> Result<Vec<(usize, f64)>, EngineError> {
        if !toks.len().is_multiple_of(3) {
            return Err(err(line_no, "expected `sign coefficient name` terms"));
        }
        toks.chunks(3)
            .map(|t| {
                let c = parse_num(t[1], line_no)?;
                let c = match t[0] {
                    "+" => c,
                    "-" => -c,
                    s => return Err(err(line_no, format!("expected a sign, found `{s}`"))),
                };
                let j = *index.get(t[2]).ok_or_else(|| err(line_no, format!("unknown column `{}`", t[2])))?;
                Ok((j, c))
            })
            .collect()
    };

    let mut objective = Vec::new();
    let mut rows = Vec::new();
    for (pos, (line_no, label, body)) in entries.iter().enumerate() {
        let toks: Vec<&str> = body.split_whitespace().collect();
        if pos == 0 {
            if label != "obj" {
                return Err(err(*line_no, "objective must be labelled `obj`"));
            }
            objective = terms(*line_no, &toks)?;
            continue;
        }
        if toks.len() < 2 {
            return Err(err(*line_no, "row without a right-hand side"));
        }
        let (lhs, tail) = toks.split_at(toks.len() - 2);
        let sense = match tail[0] {
            "<=" => RowSense::Le,
            ">=" => RowSense::Ge,
            "=" => RowSense::Eq,
            s => return Err(err(*line_no, format!("expected a comparison, found `{s}`"))),
        };
        rows.push(ModelRow {
            name: label.clone(),
            kind: row_kind(label),
            coeffs: terms(*line_no, lhs)?,
            sense,
            rhs: parse_num(tail[1], *line_no)?,
        });
    }
    if entries.is_empty() {
        return Err(err(1, "no objective"));
    }
    Ok(MilpModel { name, columns, objective, rows })
}
