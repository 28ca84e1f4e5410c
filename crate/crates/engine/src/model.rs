//! Algebraic model of the linear clearing formulations.
//!
//! Column layout for `n` offers and `k` blocks: acceptance binaries
//! `z[i][b]` at `b * n + i`, offer quantities `q[i][b]` at `n*k + b * n + i`,
//! block volumes `q[b]` at `2*n*k + b`.

use relres_core::{ln_unavailability, Formulation};

use crate::error::EngineError;
use crate::instance::{ProblemInstance, LOG_SLACK};
use crate::simplex::{LinearProgram, RowSense};

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub binary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// `q_b - q_ib + M z_ib <= M`
    VolumeLink,
    Demand,
    Capacity,
    /// Per-block reliability row in `ln(1 - R)` form.
    Reliability,
    SourceLimit,
    /// Minimum accepted offers per block.
    Cardinality,
    /// Nonzero-volume link of the uniform formulation.
    VolumeFloor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelRow {
    pub name: String,
    pub kind: RowKind,
    pub coeffs: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

/// A mixed-integer linear model with a minimisation objective.
#[derive(Debug, Clone, PartialEq)]
pub struct MilpModel {
    pub name: String,
    pub columns: Vec<Column>,
    pub objective: Vec<(usize, f64)>,
    pub rows: Vec<ModelRow>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Layout {
    pub n: usize,
    pub k: usize,
}

impl Layout {
    pub fn of(inst: &ProblemInstance) -> Self {
        Self { n: inst.offer_count(), k: inst.block_count() }
    }

    #[inline]
    pub fn z(&self, i: usize, b: usize) -> usize {
        b * self.n + i
    }

    #[inline]
    pub fn q(&self, i: usize, b: usize) -> usize {
        self.n * self.k + b * self.n + i
    }

    #[inline]
    pub fn qb(&self, b: usize) -> usize {
        2 * self.n * self.k + b
    }
}

/// Model of a linear formulation, as exported to LP text.
pub fn build_model(inst: &ProblemInstance) -> Result<MilpModel, EngineError> {
    if !inst.formulation().is_linear() {
        return Err(EngineError::NonlinearExport(inst.formulation().to_string()));
    }
    Ok(base_model(inst, true))
}

/// Volume link, demand and capacity rows shared by every formulation, plus
/// the formulation's block rows when `with_block_rows` is set.
pub(crate) fn base_model(inst: &ProblemInstance, with_block_rows: bool) -> MilpModel {
    let lay = Layout::of(inst);
    let (n, k) = (lay.n, lay.k);
    let offers = inst.offers();
    let req = inst.requirement();
    let m = inst.big_m();
    let floor = inst.block_floor();

    let mut columns = Vec::with_capacity(2 * n * k + k);
    for b in 0..k {
        for i in 0..n {
            columns.push(Column { name: format!("z_{}_{}", i + 1, b + 1), lower: 0.0, upper: 1.0, binary: true });
        }
    }
    for b in 0..k {
        for i in 0..n {
            columns.push(Column {
                name: format!("q_{}_{}", i + 1, b + 1),
                lower: 0.0,
                upper: offers[i].volume,
                binary: false,
            });
        }
    }
    for b in 0..k {
        columns.push(Column { name: format!("v_{}", b + 1), lower: floor, upper: m, binary: false });
    }
    if inst.formulation() == Formulation::Uniform {
        let r = inst.uniform_reliability().unwrap_or(0.0);
        for b in 0..k {
            for (i, o) in offers.iter().enumerate() {
                if o.reliability < r {
                    columns[lay.z(i, b)].upper = 0.0;
                }
            }
        }
    }

    let objective = (0..k)
        .flat_map(|b| (0..n).map(move |i| (b, i)))
        .filter(|&(_, i)| offers[i].price != 0.0)
        .map(|(b, i)| (lay.q(i, b), offers[i].price))
        .collect();

    let mut rows = Vec::new();
    for b in 0..k {
        for i in 0..n {
            rows.push(ModelRow {
                name: format!("link_{}_{}", i + 1, b + 1),
                kind: RowKind::VolumeLink,
                coeffs: vec![(lay.qb(b), 1.0), (lay.q(i, b), -1.0), (lay.z(i, b), m)],
                sense: RowSense::Le,
                rhs: m,
            });
        }
    }
    rows.push(ModelRow {
        name: "demand".into(),
        kind: RowKind::Demand,
        coeffs: (0..k).map(|b| (lay.qb(b), 1.0)).collect(),
        sense: RowSense::Ge,
        rhs: req.target_volume,
    });
    for (i, o) in offers.iter().enumerate() {
        rows.push(ModelRow {
            name: format!("cap_{}", i + 1),
            kind: RowKind::Capacity,
            coeffs: (0..k).map(|b| (lay.q(i, b), 1.0)).collect(),
            sense: RowSense::Le,
            rhs: o.volume,
        });
    }

    if with_block_rows {
        block_rows(inst, &lay, &mut rows);
    }

    MilpModel { name: format!("reserve_{}", inst.formulation().as_str().replace('-', "_")), columns, objective, rows }
}

fn block_rows(inst: &ProblemInstance, lay: &Layout, rows: &mut Vec<ModelRow>) {
    let (n, k) = (lay.n, lay.k);
    match inst.formulation() {
        Formulation::Uniform => {
            let r = inst.uniform_reliability().unwrap_or(0.0);
            let psi = inst.psi().unwrap_or(0.0);
            let need = inst.min_offers_per_block().unwrap_or(0) as f64;
            for b in 0..k {
                rows.push(ModelRow {
                    name: format!("count_{}", b + 1),
                    kind: RowKind::Cardinality,
                    coeffs: (0..n).map(|i| (lay.z(i, b), 1.0)).collect(),
                    sense: RowSense::Ge,
                    rhs: need,
                });
            }
            for b in 0..k {
                for i in 0..n {
                    rows.push(ModelRow {
                        name: format!("vfloor_{}_{}", i + 1, b + 1),
                        kind: RowKind::VolumeFloor,
                        coeffs: vec![(lay.q(i, b), r), (lay.z(i, b), -1.0)],
                        sense: RowSense::Ge,
                        rhs: psi - 1.0,
                    });
                }
            }
        }
        Formulation::Milp | Formulation::Correlated | Formulation::SourceRestricted => {
            let rhs = ln_unavailability(inst.psi().unwrap_or(0.0));
            for b in 0..k {
                rows.push(ModelRow {
                    name: format!("rel_{}", b + 1),
                    kind: RowKind::Reliability,
                    coeffs: (0..n).map(|i| (lay.z(i, b), inst.log_coefficient(i))).collect(),
                    sense: RowSense::Le,
                    rhs,
                });
            }
            if let Some(groups) = inst.source_groups() {
                for (s, name) in inst.source_names().iter().enumerate() {
                    for b in 0..k {
                        rows.push(ModelRow {
                            name: format!("src_{}_{}", sanitize(name), b + 1),
                            kind: RowKind::SourceLimit,
                            coeffs: (0..n).filter(|&i| groups[i] == s).map(|i| (lay.z(i, b), 1.0)).collect(),
                            sense: RowSense::Le,
                            rhs: 1.0,
                        });
                    }
                }
            }
        }
        Formulation::Minlp | Formulation::Rminlp => {
            // necessary condition phi_b >= Phi on every block
            let rhs = ln_unavailability(inst.requirement().target_reliability);
            for b in 0..k {
                rows.push(ModelRow {
                    name: format!("rel_{}", b + 1),
                    kind: RowKind::Reliability,
                    coeffs: (0..n).map(|i| (lay.z(i, b), ln_unavailability(inst.offers()[i].reliability))).collect(),
                    sense: RowSense::Le,
                    rhs,
                });
            }
        }
        Formulation::UnawareBenchmark => {}
    }
}

pub(crate) fn sanitize(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect()
}

/// Node relaxation: the model with binaries relaxed to `[0, 1]` (or fixed by
/// `fixings`), reliability rows loosened by the boundary slack, and the
/// implied bound `q_ib >= floor * z_ib` added.
pub(crate) fn node_lp(model: &MilpModel, lay: &Layout, floor: f64, fixings: &[i8]) -> LinearProgram {
    let mut lp = LinearProgram::default();
    for c in &model.columns {
        lp.add_column(0.0, c.lower, c.upper);
    }
    for &(j, c) in &model.objective {
        lp.cost[j] = c;
    }
    for (v, &f) in fixings.iter().enumerate() {
        match f {
            0 => lp.upper[v] = 0.0,
            1 => lp.lower[v] = 1.0,
            _ => {}
        }
    }
    for row in &model.rows {
        let rhs = if row.kind == RowKind::Reliability { row.rhs + LOG_SLACK } else { row.rhs };
        lp.add_row(row.coeffs.clone(), row.sense, rhs);
    }
    if floor > 0.0 {
        for b in 0..lay.k {
            for i in 0..lay.n {
                lp.add_row(vec![(lay.q(i, b), 1.0), (lay.z(i, b), -floor)], RowSense::Ge, 0.0);
            }
        }
    }
    lp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{build_instance, FormulationParams};
    use relres_core::{Offer, OfferBook, Requirement};

    fn small_milp() -> ProblemInstance {
        let rows = [
            ("1", 40.0, 0.80, 80.0),
            ("2", 30.0, 0.90, 90.0),
            ("3", 30.0, 0.95, 95.0),
            ("4", 30.0, 0.98, 98.0),
            ("5a", 20.0, 0.99, 99.0),
            ("5b", 20.0, 0.99, 99.0),
        ];
        let book =
            OfferBook::new(rows.iter().map(|&(id, v, r, p)| Offer::new(id, v, p, r).unwrap()).collect()).unwrap();
        let req = Requirement::new(40.0, 0.9995, 20.0, 2).unwrap();
        build_instance(book, req, Formulation::Milp, FormulationParams::default()).unwrap()
    }

    #[test]
    fn milp_dimensions() {
        let m = build_model(&small_milp()).unwrap();
        assert_eq!(m.columns.iter().filter(|c| c.binary).count(), 12);
        assert_eq!(m.columns.len(), 12 + 12 + 2);
        // 12 links, demand, 6 capacities, 2 reliability rows
        assert_eq!(m.rows.len(), 21);
        let rel: Vec<_> = m.rows.iter().filter(|r| r.kind == RowKind::Reliability).collect();
        assert_eq!(rel.len(), 2);
        assert!((rel[0].coeffs[0].1 - (0.2f64).ln()).abs() < 1e-15);
        assert!((rel[0].rhs - (1.0 - 0.9995f64.sqrt()).ln()).abs() < 1e-12);
    }

    #[test]
    fn nonlinear_formulations_have_no_model() {
        let inst = small_milp();
        let exact = build_instance(
            inst.offers().clone(),
            inst.requirement().clone(),
            Formulation::Minlp,
            FormulationParams::default(),
        )
        .unwrap();
        assert!(matches!(build_model(&exact), Err(EngineError::NonlinearExport(_))));
    }
}
