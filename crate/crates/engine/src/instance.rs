//! Validated clearing problems and their per-block reliability rules.

use std::collections::{BTreeMap, HashMap};

use relres_core::{ln_unavailability, uniform_block_reliability, Formulation, OfferBook, Requirement};
use serde::{Deserialize, Serialize};

use crate::error::EngineError;

/// Absolute slack on log-space reliability comparisons. Reliability
/// constraints met with equality are feasible.
pub const LOG_SLACK: f64 = 1e-9;

/// Symmetric cross-correlation weights over offer ids, unit diagonal,
/// entries in `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    ids: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn new(ids: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self, EngineError> {
        let n = ids.len();
        let bad = |msg: String| Err(EngineError::Correlation(msg));
        if values.len() != n || values.iter().any(|row| row.len() != n) {
            return bad(format!("expected a {n}x{n} matrix"));
        }
        let mut seen = HashMap::new();
        for (k, id) in ids.iter().enumerate() {
            if seen.insert(id.as_str(), k).is_some() {
                return bad(format!("duplicate id `{id}`"));
            }
        }
        for i in 0..n {
            if values[i][i] != 1.0 {
                return bad(format!("diagonal entry for `{}` is {}, not 1", ids[i], values[i][i]));
            }
            for j in 0..n {
                let v = values[i][j];
                if !(v > 0.0 && v <= 1.0) {
                    return bad(format!("entry ({}, {}) = {v} outside (0, 1]", ids[i], ids[j]));
                }
                if v != values[j][i] {
                    return bad(format!("not symmetric at ({}, {})", ids[i], ids[j]));
                }
            }
        }
        Ok(Self { ids, values })
    }

    /// The all-ones matrix, under which correlation weighting is a no-op.
    pub fn ones(ids: Vec<String>) -> Self {
        let n = ids.len();
        Self { ids, values: vec![vec![1.0; n]; n] }
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn set(&mut self, a: &str, b: &str, value: f64) -> Result<(), EngineError> {
        let i = self.index_of(a)?;
        let j = self.index_of(b)?;
        if i == j || !(value > 0.0 && value <= 1.0) {
            return Err(EngineError::Correlation(format!("cannot set ({a}, {b}) to {value}")));
        }
        self.values[i][j] = value;
        self.values[j][i] = value;
        Ok(())
    }

    fn index_of(&self, id: &str) -> Result<usize, EngineError> {
        self.ids.iter().position(|x| x == id).ok_or_else(|| EngineError::Correlation(format!("unknown id `{id}`")))
    }

    /// Row products `prod_j rho_ij`, reordered to follow `book`.
    pub fn row_weights(&self, book: &OfferBook) -> Result<Vec<f64>, EngineError> {
        if self.ids.len() != book.len() {
            return Err(EngineError::Correlation(format!(
                "matrix covers {} ids, book has {} offers",
                self.ids.len(),
                book.len()
            )));
        }
        book.iter()
            .map(|o| {
                let i = self.index_of(&o.id)?;
                Ok(self.values[i].iter().product())
            })
            .collect()
    }
}

/// Optional per-formulation parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FormulationParams {
    /// Per-block reliability floor. Defaults to the uniform split of the target.
    pub psi: Option<f64>,
    /// Uniform offer reliability of each block (uniform formulation).
    pub uniform_reliability: Option<f64>,
    pub correlation: Option<CorrelationMatrix>,
    /// Minimum offer reliability admitted by the unaware benchmark.
    /// Defaults to the largest reliability in the book.
    pub benchmark_threshold: Option<f64>,
}

/// A validated clearing problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    offers: OfferBook,
    requirement: Requirement,
    formulation: Formulation,
    big_m: f64,
    psi: Option<f64>,
    uniform_reliability: Option<f64>,
    min_offers_per_block: Option<usize>,
    correlation: Option<CorrelationMatrix>,
    correlation_weights: Option<Vec<f64>>,
    source_groups: Option<Vec<usize>>,
    source_names: Vec<String>,
    benchmark_threshold: Option<f64>,
}

/// Builds and validates a problem instance for `formulation`.
///
/// The linear formulations receive their block floor `psi` (by default the
/// target split evenly over the blocks), which must be reachable by some
/// offer subset and must guarantee the target over all blocks.
pub fn build_instance(
    offers: OfferBook,
    requirement: Requirement,
    formulation: Formulation,
    params: FormulationParams,
) -> Result<ProblemInstance, EngineError> {
    if offers.is_empty() {
        return Err(EngineError::NoOffers);
    }
    requirement.validate()?;
    let big_m = requirement.resolve_big_m(&offers)?;
    let mut inst = ProblemInstance {
        offers,
        requirement,
        formulation: Formulation::Minlp,
        big_m,
        psi: None,
        uniform_reliability: None,
        min_offers_per_block: None,
        correlation: None,
        correlation_weights: None,
        source_groups: None,
        source_names: Vec::new(),
        benchmark_threshold: None,
    };
    match formulation {
        Formulation::Minlp | Formulation::Rminlp => {
            inst.formulation = formulation;
        }
        Formulation::Milp => {
            inst.set_psi(params.psi)?;
            inst.formulation = Formulation::Milp;
            inst.check_psi_reachable()?;
        }
        Formulation::Uniform => {
            let uniform = params.uniform_reliability.ok_or(EngineError::MissingParameter("uniform_reliability"))?;
            inst.set_psi(params.psi)?;
            inst.formulation = Formulation::Uniform;
            inst.set_uniform(uniform)?;
        }
        Formulation::Correlated => {
            inst.set_psi(params.psi)?;
            inst.formulation = Formulation::Milp;
            let gamma = params.correlation.ok_or(EngineError::MissingParameter("correlation"))?;
            inst = build_correlation_adjusted(inst, gamma)?;
        }
        Formulation::SourceRestricted => {
            inst.set_psi(params.psi)?;
            inst.formulation = Formulation::Milp;
            inst = build_source_restricted(inst)?;
        }
        Formulation::UnawareBenchmark => {
            let threshold = params.benchmark_threshold.unwrap_or_else(|| inst.offers.max_reliability());
            if !(0.0..1.0).contains(&threshold) {
                return Err(EngineError::InvalidParameter(format!("benchmark threshold {threshold}")));
            }
            inst.benchmark_threshold = Some(threshold);
            inst.formulation = Formulation::UnawareBenchmark;
        }
    }
    Ok(inst)
}

/// Adds the one-offer-per-source-per-block restriction to a floor-based
/// instance.
pub fn build_source_restricted(mut inst: ProblemInstance) -> Result<ProblemInstance, EngineError> {
    if inst.psi.is_none() {
        return Err(EngineError::MissingParameter("psi"));
    }
    let mut names: BTreeMap<&str, usize> = BTreeMap::new();
    for o in inst.offers.iter() {
        if !o.has_source() {
            return Err(EngineError::MissingSource(o.id.clone()));
        }
        let next = names.len();
        names.entry(o.source.as_str()).or_insert(next);
    }
    let groups = inst.offers.iter().map(|o| names[o.source.as_str()]).collect();
    let mut ordered: Vec<(usize, String)> = names.into_iter().map(|(s, k)| (k, s.to_string())).collect();
    ordered.sort();
    inst.source_names = ordered.into_iter().map(|(_, s)| s).collect();
    inst.source_groups = Some(groups);
    inst.formulation = Formulation::SourceRestricted;
    inst.check_psi_reachable()?;
    Ok(inst)
}

/// Weights every offer's `ln(1 - R)` contribution by its correlation row
/// product. The all-ones matrix leaves the instance unchanged.
pub fn build_correlation_adjusted(
    mut inst: ProblemInstance,
    gamma: CorrelationMatrix,
) -> Result<ProblemInstance, EngineError> {
    if inst.psi.is_none() {
        return Err(EngineError::MissingParameter("psi"));
    }
    let weights = gamma.row_weights(&inst.offers)?;
    inst.correlation_weights = Some(weights);
    inst.correlation = Some(gamma);
    inst.formulation = Formulation::Correlated;
    inst.check_psi_reachable()?;
    Ok(inst)
}

impl ProblemInstance {
    fn set_psi(&mut self, psi: Option<f64>) -> Result<(), EngineError> {
        let req = &self.requirement;
        let psi = match psi {
            Some(p) => p,
            None => uniform_block_reliability(req.target_reliability, req.block_count)?,
        };
        if !(psi > 0.0 && psi < 1.0) {
            return Err(EngineError::InvalidParameter(format!("psi {psi} outside (0, 1)")));
        }
        if (req.block_count as f64) * psi.ln() < req.target_reliability.ln() - LOG_SLACK {
            return Err(EngineError::PsiTooLow { psi, blocks: req.block_count, target: req.target_reliability });
        }
        self.psi = Some(psi);
        Ok(())
    }

    fn set_uniform(&mut self, uniform: f64) -> Result<(), EngineError> {
        if !(uniform > 0.0 && uniform < 1.0) {
            return Err(EngineError::InvalidParameter(format!("uniform reliability {uniform} outside (0, 1)")));
        }
        let psi = self.psi.expect("psi set before uniform reliability");
        let needed = min_offers_for(psi, uniform);
        let available = self.offers.iter().filter(|o| o.reliability >= uniform).count();
        if needed > available {
            return Err(EngineError::TooFewUniformOffers { needed, available, uniform });
        }
        self.uniform_reliability = Some(uniform);
        self.min_offers_per_block = Some(needed);
        Ok(())
    }

    fn check_psi_reachable(&self) -> Result<(), EngineError> {
        let rule = self.block_rule();
        if rule.max_reachable() < rule.need {
            return Err(EngineError::PsiUnachievable { psi: self.psi.unwrap_or(f64::NAN) });
        }
        Ok(())
    }

    pub fn offers(&self) -> &OfferBook {
        &self.offers
    }

    pub fn requirement(&self) -> &Requirement {
        &self.requirement
    }

    pub fn formulation(&self) -> Formulation {
        self.formulation
    }

    pub fn big_m(&self) -> f64 {
        self.big_m
    }

    pub fn psi(&self) -> Option<f64> {
        self.psi
    }

    pub fn uniform_reliability(&self) -> Option<f64> {
        self.uniform_reliability
    }

    pub fn min_offers_per_block(&self) -> Option<usize> {
        self.min_offers_per_block
    }

    pub fn correlation(&self) -> Option<&CorrelationMatrix> {
        self.correlation.as_ref()
    }

    /// Row products of the correlation matrix in book order.
    pub fn correlation_weights(&self) -> Option<&[f64]> {
        self.correlation_weights.as_deref()
    }

    /// Source group index per offer, when the source restriction is active.
    pub fn source_groups(&self) -> Option<&[usize]> {
        self.source_groups.as_deref()
    }

    pub fn source_names(&self) -> &[String] {
        &self.source_names
    }

    pub fn benchmark_threshold(&self) -> Option<f64> {
        self.benchmark_threshold
    }

    pub fn offer_count(&self) -> usize {
        self.offers.len()
    }

    pub fn block_count(&self) -> usize {
        self.requirement.block_count
    }

    pub fn binary_count(&self) -> usize {
        self.offer_count() * self.block_count()
    }

    /// Lower bound on every block volume: the minimum block size, raised
    /// under the uniform formulation to the volume implied by its
    /// nonzero-volume link.
    pub fn block_floor(&self) -> f64 {
        let base = self.requirement.min_block_volume;
        match (self.formulation, self.psi, self.uniform_reliability) {
            (Formulation::Uniform, Some(psi), Some(r)) => base.max(psi / r),
            _ => base,
        }
    }

    /// Joint log-reliability target `ln(Phi)` for the exact formulations.
    pub fn joint_log_target(&self) -> Option<f64> {
        match self.formulation {
            Formulation::Minlp | Formulation::Rminlp => Some(self.requirement.target_reliability.ln()),
            _ => None,
        }
    }

    /// Coefficient of `z_ib` in the linear block row `sum coef * z <= rhs`,
    /// in the `ln(1 - R)` orientation of the exported model.
    pub fn log_coefficient(&self, offer: usize) -> f64 {
        let base = ln_unavailability(self.offers[offer].reliability);
        match &self.correlation_weights {
            Some(w) => w[offer] * base,
            None => base,
        }
    }

    /// The per-block acceptance rule in `sum weight * z >= need` form.
    ///
    /// For the exact formulations this is only the necessary condition
    /// `phi_b >= Phi`; joint feasibility is checked separately.
    pub(crate) fn block_rule(&self) -> BlockRule {
        let n = self.offer_count();
        let floor = self.block_floor();
        let mut eligible: Vec<bool> = self.offers.iter().map(|o| o.volume >= floor * (1.0 - 1e-12)).collect();
        let (weights, need) = match self.formulation {
            Formulation::Uniform => {
                let r = self.uniform_reliability.unwrap_or(0.0);
                for (k, o) in self.offers.iter().enumerate() {
                    if o.reliability < r {
                        eligible[k] = false;
                    }
                }
                let need = self.min_offers_per_block.unwrap_or(0) as f64 - LOG_SLACK;
                (vec![1.0; n], need)
            }
            Formulation::Minlp | Formulation::Rminlp | Formulation::UnawareBenchmark => {
                let w = (0..n).map(|k| -ln_unavailability(self.offers[k].reliability)).collect();
                (w, -ln_unavailability(self.requirement.target_reliability) - LOG_SLACK)
            }
            _ => {
                let psi = self.psi.unwrap_or(0.0);
                let w = (0..n).map(|k| -self.log_coefficient(k)).collect();
                (w, -ln_unavailability(psi) - LOG_SLACK)
            }
        };
        let weights = weights.into_iter().zip(&eligible).map(|(w, &e)| if e { w } else { 0.0 }).collect();
        BlockRule { weights, eligible, need, groups: self.source_groups.clone() }
    }
}

/// Smallest offer count whose uniform reliability reaches `psi`.
pub fn min_offers_for(psi: f64, uniform: f64) -> usize {
    let ratio = ln_unavailability(psi) / ln_unavailability(uniform);
    // 4.000000000000001 must stay 4
    (ratio - 1e-9 * ratio.abs().max(1.0)).ceil().max(1.0) as usize
}

/// `sum_i weights[i] * z_i >= need` over eligible offers, with at most one
/// offer per group when `groups` is set.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct BlockRule {
    pub weights: Vec<f64>,
    pub eligible: Vec<bool>,
    pub need: f64,
    pub groups: Option<Vec<usize>>,
}

impl BlockRule {
    /// Largest attainable weight over a single block.
    pub fn max_reachable(&self) -> f64 {
        match &self.groups {
            None => self.weights.iter().zip(&self.eligible).filter(|(_, e)| **e).map(|(w, _)| *w).sum(),
            Some(groups) => {
                let mut best: BTreeMap<usize, f64> = BTreeMap::new();
                for (k, &g) in groups.iter().enumerate() {
                    if self.eligible[k] {
                        let e = best.entry(g).or_insert(0.0);
                        *e = e.max(self.weights[k]);
                    }
                }
                best.values().sum()
            }
        }
    }

    pub fn satisfied_by(&self, members: &[usize]) -> bool {
        if members.iter().any(|&k| !self.eligible[k]) {
            return false;
        }
        if let Some(groups) = &self.groups {
            let mut used = std::collections::BTreeSet::new();
            if members.iter().any(|&k| !used.insert(groups[k])) {
                return false;
            }
        }
        members.iter().map(|&k| self.weights[k]).sum::<f64>() >= self.need
    }
}
