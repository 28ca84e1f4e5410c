//! Cheapest offer set of a single block that meets its reliability rule.
//!
//! Minimises `sum P_i z_i` subject to `sum w_i z_i >= need`, fixings,
//! eligibility and the one-per-group restriction. The unit cost of a block
//! bounds the cost of every MW it carries.

use crate::instance::BlockRule;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Cover {
    /// No completion of the fixings meets the rule.
    Infeasible,
    Found {
        /// Valid lower bound on the block unit cost.
        bound: f64,
        /// Cheapest member set found, if any.
        members: Option<Vec<usize>>,
        /// `members` is proven optimal and `bound` is its cost.
        exact: bool,
    },
}

impl Cover {
    pub fn bound(&self) -> Option<f64> {
        match self {
            Cover::Infeasible => None,
            Cover::Found { bound, .. } => Some(*bound),
        }
    }
}

pub(crate) struct CoverSearch<'a> {
    rule: &'a BlockRule,
    prices: &'a [f64],
    budget: u64,
}

struct Dfs<'a> {
    items: Vec<usize>,
    w: &'a [f64],
    p: &'a [f64],
    groups: Option<&'a [usize]>,
    need: f64,
    nodes: u64,
    budget: u64,
    aborted: bool,
    best: f64,
    best_set: Option<Vec<usize>>,
    stack: Vec<usize>,
    used: Vec<bool>,
}

impl<'a> CoverSearch<'a> {
    pub fn new(rule: &'a BlockRule, prices: &'a [f64], budget: u64) -> Self {
        Self { rule, prices, budget }
    }

    /// `fixings[i]` is 0, 1 or -1 (free) for offer `i` in this block.
    pub fn solve(&self, fixings: &[i8]) -> Cover {
        let rule = self.rule;
        let n = rule.weights.len();
        let mut forced = Vec::new();
        let mut used_groups = Vec::new();
        for i in 0..n {
            if fixings[i] == 1 {
                if !rule.eligible[i] {
                    return Cover::Infeasible;
                }
                if let Some(g) = &rule.groups {
                    if used_groups.contains(&g[i]) {
                        return Cover::Infeasible;
                    }
                    used_groups.push(g[i]);
                }
                forced.push(i);
            }
        }
        let base_cost: f64 = forced.iter().map(|&i| self.prices[i]).sum();
        let base_w: f64 = forced.iter().map(|&i| rule.weights[i]).sum();
        let need = rule.need - base_w;
        if need <= 0.0 {
            return Cover::Found { bound: base_cost, members: Some(forced), exact: true };
        }

        let mut items: Vec<usize> = (0..n)
            .filter(|&i| fixings[i] < 0 && rule.eligible[i] && rule.weights[i] > 0.0)
            .filter(|&i| rule.groups.as_ref().is_none_or(|g| !used_groups.contains(&g[i])))
            .collect();
        items.sort_by(|&a, &b| {
            let ra = self.prices[a] / rule.weights[a];
            let rb = self.prices[b] / rule.weights[b];
            ra.total_cmp(&rb).then(a.cmp(&b))
        });

        let mut dfs = Dfs {
            w: &rule.weights,
            p: self.prices,
            groups: rule.groups.as_deref(),
            need,
            nodes: 0,
            budget: self.budget,
            aborted: false,
            best: f64::INFINITY,
            best_set: None,
            stack: Vec::new(),
            used: Vec::new(),
            items,
        };
        let Some(root) = dfs.relaxation(0, 0.0) else {
            return Cover::Infeasible;
        };
        let group_count = rule.groups.as_ref().map_or(0, |g| g.iter().copied().max().map_or(0, |m| m + 1));
        dfs.used = vec![false; group_count];
        dfs.search(0, 0.0, 0.0);

        let members = dfs.best_set.take().map(|mut extra| {
            extra.extend(forced.iter().copied());
            extra.sort_unstable();
            extra
        });
        if dfs.aborted {
            Cover::Found { bound: base_cost + root, members, exact: false }
        } else if members.is_some() {
            Cover::Found { bound: base_cost + dfs.best, members, exact: true }
        } else {
            Cover::Infeasible
        }
    }
}

impl Dfs<'_> {
    /// Fractional cover cost of the remaining need from item `from` on,
    /// ignoring groups; `None` when even all items fall short.
    fn relaxation(&self, from: usize, have: f64) -> Option<f64> {
        let mut rem = self.need - have;
        if rem <= 0.0 {
            return Some(0.0);
        }
        let mut cost = 0.0;
        for &i in &self.items[from..] {
            let w = self.w[i];
            if w >= rem {
                return Some(cost + self.p[i] * rem / w);
            }
            rem -= w;
            cost += self.p[i];
        }
        None
    }

    fn search(&mut self, from: usize, have: f64, cost: f64) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            return;
        }
        if have >= self.need {
            if cost < self.best {
                self.best = cost;
                self.best_set = Some(self.stack.clone());
            }
            return;
        }
        let Some(rest) = self.relaxation(from, have) else {
            return;
        };
        if cost + rest >= self.best {
            return;
        }
        for k in from..self.items.len() {
            let i = self.items[k];
            if let Some(g) = self.groups {
                if self.used[g[i]] {
                    continue;
                }
                self.used[g[i]] = true;
            }
            self.stack.push(i);
            self.search(k + 1, have + self.w[i], cost + self.p[i]);
            self.stack.pop();
            if let Some(g) = self.groups {
                self.used[g[i]] = false;
            }
            if self.aborted {
                return;
            }
            // skipping item k: the remaining items must still be able to cover
            match self.relaxation(k + 1, have) {
                Some(r) if cost + r < self.best => {}
                _ => return,
            }
        }
    }
}
