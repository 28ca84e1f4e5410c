//! Human-readable tables and flat CSV views of clearing results.

use relres_core::ClearingResult;

/// `9420` as `9,420`; two decimals unless the value is integral.
pub fn format_amount(x: f64) -> String {
    let rounded = (x * 100.0).round() / 100.0;
    let integral = (rounded - rounded.round()).abs() < 1e-9;
    let text = if integral { format!("{:.0}", rounded.abs()) } else { format!("{:.2}", rounded.abs()) };
    let (int, frac) = text.split_once('.').map_or((text.as_str(), None), |(a, b)| (a, Some(b)));
    let mut grouped = String::new();
    for (k, ch) in int.chars().enumerate() {
        if k > 0 && (int.len() - k) % 3 == 0 {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    let sign = if rounded < 0.0 { "-" } else { "" };
    match frac {
        Some(f) => format!("{sign}{grouped}.{f}"),
        None => format!("{sign}{grouped}"),
    }
}

/// Probability as a percentage with five decimals, e.g. `99.95000 %`.
pub fn format_reliability(p: f64) -> String {
    format!("{:.5} %", 100.0 * p)
}

pub fn format_seconds(t: f64) -> String {
    format!("{t:.3} s")
}

/// Left-aligned columns separated by two spaces.
pub fn render_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (k, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if k + 1 == cells.len() {
                s.push_str(cell);
            } else {
                s.push_str(&format!("{cell:<w$}  "));
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

/// Summary row in the Cost / Volume / Reliability / Time layout, followed
/// by one row per block.
pub fn result_table(result: &ClearingResult) -> String {
    let stats = &result.solver_stats;
    let summary = vec![vec![
        result.formulation.to_string(),
        stats.status.to_string(),
        format_amount(result.total_cost),
        format!("{} MW", format_amount(result.total_volume)),
        format_reliability(result.achieved_reliability),
        format_seconds(stats.wall_time_secs),
    ]];
    let mut out = render_table(&["Formulation", "Status", "Cost", "Volume", "Reliability", "Time"], &summary);
    if let Some(lb) = stats.lower_bound {
        out.push_str(&format!("lower bound: {}\n", format_amount(lb)));
    }
    out.push_str(&format!("nodes: {}, workers: {}\n", stats.nodes, stats.workers));
    if !result.assignments.is_empty() {
        let rows: Vec<Vec<String>> = result
            .assignments
            .iter()
            .map(|a| {
                let members: Vec<&str> = a.accepted().map(|m| m.offer_id.as_str()).collect();
                vec![
                    a.block_id.to_string(),
                    format!("{} MW", format_amount(a.block_volume)),
                    format_reliability(a.block_reliability),
                    members.join(" "),
                ]
            })
            .collect();
        out.push('\n');
        out.push_str(&render_table(&["Block", "Volume", "Reliability", "Offers"], &rows));
    }
    out
}

/// One row per accepted block member.
pub fn assignments_csv(result: &ClearingResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let _ = w.write_record(["block", "block_volume_mw", "block_reliability", "offer_id", "quantity_mw"]);
    for a in &result.assignments {
        for m in a.accepted() {
            let _ = w.write_record([
                a.block_id.to_string(),
                a.block_volume.to_string(),
                a.block_reliability.to_string(),
                m.offer_id.clone(),
                m.quantity.to_string(),
            ]);
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amounts() {
        assert_eq!(format_amount(9420.0), "9,420");
        assert_eq!(format_amount(100.0), "100");
        assert_eq!(format_amount(116523.7), "116,523.70");
        assert_eq!(format_amount(1234567.891), "1,234,567.89");
        assert_eq!(format_amount(-3960.0), "-3,960");
        assert_eq!(format_amount(0.0), "0");
        assert_eq!(format_amount(999.999), "1,000");
    }

    #[test]
    fn reliabilities() {
        assert_eq!(format_reliability(0.9995), "99.95000 %");
        assert_eq!(format_reliability(0.9801), "98.01000 %");
    }

    #[test]
    fn tables() {
        let t = render_table(&["A", "Long"], &[vec!["xyz".into(), "1".into()]]);
        assert_eq!(t, "A    Long\nxyz  1\n");
    }
}
