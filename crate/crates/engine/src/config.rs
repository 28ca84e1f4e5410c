use std::time::Duration;

use serde::{Deserialize, Serialize};

/// Limits and parallelism shared by all solvers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Maximum number of evaluated branch-and-bound nodes.
    pub node_limit: u64,
    /// Wall-clock limit of the search phase.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_limit: Option<Duration>,
    /// Worker threads; 1 runs everything on the calling thread.
    pub workers: usize,
    /// Relative optimality gap under which a node is pruned.
    pub rel_gap: f64,
    /// Largest `offers x blocks` accepted by exhaustive enumeration.
    pub enumeration_cap: usize,
    /// Node budget of each per-block cover search.
    pub cover_budget: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            node_limit: 1_000_000,
            time_limit: None,
            workers: 1,
            rel_gap: 1e-9,
            enumeration_cap: 24,
            cover_budget: 200_000,
        }
    }
}

impl SolverConfig {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn with_node_limit(mut self, node_limit: u64) -> Self {
        self.node_limit = node_limit;
        self
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    /// Absolute pruning tolerance around an incumbent cost.
    pub(crate) fn prune_tol(&self, incumbent: f64) -> f64 {
        (self.rel_gap * incumbent.abs()).max(1e-9)
    }

    pub(crate) fn pool(&self) -> Option<rayon::ThreadPool> {
        if self.workers <= 1 {
            return None;
        }
        rayon::ThreadPoolBuilder::new().num_threads(self.workers).build().ok()
    }
}
