//! Dense bounded-variable primal simplex.
//!
//! Every row gets a slack so that `A x + s = b`, with the row sense encoded
//! in the slack bounds. Rows whose starting residual violates the slack
//! bounds get an artificial column and phase 1 drives those to zero.
//! Nonbasic variables sit at one of their bounds (or at zero when free).
//!
//! Pricing is Dantzig's rule until a degenerate pivot occurs; from then on
//! Bland's rule is used until the objective moves again, which rules out
//! cycling and keeps the pivot sequence deterministic.

const PIVOT_TOL: f64 = 1e-9;
const OPT_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

/// `min cost . x` subject to `rows` and `lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearProgram {
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<LpRow>,
}

impl LinearProgram {
    pub fn add_column(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.cost.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.cost.len() - 1
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, f64)>, sense: RowSense, rhs: f64) {
        self.rows.push(LpRow { coeffs, sense, rhs });
    }

    pub fn columns(&self) -> usize {
        self.cost.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Basic,
    AtLower,
    AtUpper,
    /// Free nonbasic variable held at zero.
    Zero,
}

struct Tableau {
    m: usize,
    cols: usize,
    /// Row-major `m x cols`, holding `B^-1 A`.
    t: Vec<f64>,
    /// Values of the basic variables, by row.
    beta: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<State>,
    value: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    iterations: usize,
    max_iterations: usize,
}

enum Phase {
    Optimal,
    Unbounded,
    IterationLimit,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * self.cols + c]
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for r in 0..self.m {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                let row = &self.t[r * self.cols..(r + 1) * self.cols];
                for (dj, a) in d.iter_mut().zip(row) {
                    *dj -= cb * a;
                }
            }
        }
        d
    }

    fn entering(&self, d: &[f64], bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..self.cols {
            let dir = match self.state[j] {
                State::Basic => continue,
                _ if self.upper[j] - self.lower[j] <= 0.0 => continue,
                State::AtLower if d[j] < -OPT_TOL => 1.0,
                State::AtUpper if d[j] > OPT_TOL => -1.0,
                State::Zero if d[j].abs() > OPT_TOL => -d[j].signum(),
                _ => continue,
            };
            if bland {
                return Some((j, dir));
            }
            if best.is_none_or(|(b, _)| d[j].abs() > d[b].abs()) {
                best = Some((j, dir));
            }
        }
        best
    }

    fn run(&mut self, cost: &[f64]) -> Phase {
        let mut d = self.reduced_costs(cost);
        let mut bland = false;
        loop {
            let Some((j, dir)) = self.entering(&d, bland) else {
                return Phase::Optimal;
            };
            if self.iterations >= self.max_iterations {
                return Phase::IterationLimit;
            }
            self.iterations += 1;

            // ratio test; ties go to the lowest basic variable index
            let mut theta = self.upper[j] - self.lower[j];
            let mut leave: Option<(usize, State)> = None;
            for r in 0..self.m {
                let alpha = dir * self.at(r, j);
                let b = self.basis[r];
                let (limit, hits) = if alpha > PIVOT_TOL {
                    ((self.beta[r] - self.lower[b]) / alpha, State::AtLower)
                } else if alpha < -PIVOT_TOL {
                    ((self.upper[b] - self.beta[r]) / -alpha, State::AtUpper)
                } else {
                    continue;
                };
                if !limit.is_finite() {
                    continue;
                }
                let limit = limit.max(0.0);
                if limit < theta - 1e-12 {
                    theta = limit;
                    leave = Some((r, hits));
                } else if limit <= theta + 1e-12 {
                    if let Some((lr, _)) = leave {
                        if b < self.basis[lr] {
                            theta = theta.min(limit);
                            leave = Some((r, hits));
                        }
                    }
                }
            }
            if !theta.is_finite() {
                return Phase::Unbounded;
            }
            bland = theta <= 1e-12;

            let step = dir * theta;
            for r in 0..self.m {
                let a = self.at(r, j);
                if a != 0.0 {
                    self.beta[r] -= a * step;
                }
            }
            self.value[j] += step;

            match leave {
                None => {
                    // bound flip
                    self.state[j] = if dir > 0.0 { State::AtUpper } else { State::AtLower };
                    self.value[j] = if dir > 0.0 { self.upper[j] } else { self.lower[j] };
                }
                Some((r, hits)) => {
                    let out = self.basis[r];
                    self.state[out] = hits;
                    self.value[out] = if hits == State::AtLower { self.lower[out] } else { self.upper[out] };
                    let entering_value = self.value[j];
                    self.pivot(r, j);
                    self.beta[r] = entering_value;
                    self.state[j] = State::Basic;
                    let dj = d[j];
                    let row = &self.t[r * self.cols..(r + 1) * self.cols];
                    for (dk, a) in d.iter_mut().zip(row) {
                        *dk -= dj * a;
                    }
                    d[j] = 0.0;
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let cols = self.cols;
        let p = self.at(r, j);
        for c in 0..cols {
            self.t[r * cols + c] /= p;
        }
        self.t[r * cols + j] = 1.0;
        let (before, rest) = self.t.split_at_mut(r * cols);
        let (prow, after) = rest.split_at_mut(cols);
        for chunk in before.chunks_mut(cols).chain(after.chunks_mut(cols)) {
            let f = chunk[j];
            if f != 0.0 {
                for (x, a) in chunk.iter_mut().zip(prow.iter()) {
                    *x -= f * a;
                }
                chunk[j] = 0.0;
            }
        }
        self.basis[r] = j;
    }
}

/// Solves `lp` to optimality, or reports infeasibility or unboundedness.
pub fn solve(lp: &LinearProgram) -> LpSolution {
    let n = lp.columns();
    let m = lp.rows.len();
    let max_iterations = 50_000 + 50 * (n + m);

    // starting point of the structural columns
    let mut x0 = vec![0.0; n];
    let mut st = vec![State::Zero; n];
    for j in 0..n {
        if lp.lower[j] > lp.upper[j] + FEAS_TOL {
            return LpSolution { status: LpStatus::Infeasible, x: vec![], objective: f64::NAN, iterations: 0 };
        }
        if lp.lower[j].is_finite() {
            x0[j] = lp.lower[j];
            st[j] = State::AtLower;
        } else if lp.upper[j].is_finite() {
            x0[j] = lp.upper[j];
            st[j] = State::AtUpper;
        }
    }

    // residual of each row with all slacks at zero
    let residual: Vec<f64> =
        lp.rows.iter().map(|row| row.rhs - row.coeffs.iter().map(|&(j, a)| a * x0[j]).sum::<f64>()).collect();
    let needs_art: Vec<bool> = lp
        .rows
        .iter()
        .zip(&residual)
        .map(|(row, &r)| match row.sense {
            RowSense::Le => r < 0.0,
            RowSense::Ge => r > 0.0,
            RowSense::Eq => r != 0.0,
        })
        .collect();
    let n_art = needs_art.iter().filter(|&&a| a).count();
    let cols = n + m + n_art;

    let mut lower = lp.lower.clone();
    let mut upper = lp.upper.clone();
    for row in &lp.rows {
        let (l, u) = match row.sense {
            RowSense::Le => (0.0, f64::INFINITY),
            RowSense::Ge => (f64::NEG_INFINITY, 0.0),
            RowSense::Eq => (0.0, 0.0),
        };
        lower.push(l);
        upper.push(u);
    }
    lower.extend(std::iter::repeat_n(0.0, n_art));
    upper.extend(std::iter::repeat_n(f64::INFINITY, n_art));

    let mut t = vec![0.0; m * cols];
    let mut beta = vec![0.0; m];
    let mut basis = vec![0; m];
    let mut state = st;
    state.extend(std::iter::repeat_n(State::AtLower, m + n_art));
    let mut value = x0;
    value.extend(std::iter::repeat_n(0.0, m + n_art));
    let mut art = n + m;
    let mut phase1_cost = vec![0.0; cols];
    for (r, row) in lp.rows.iter().enumerate() {
        let base = r * cols;
        // a row with an artificial is scaled so the artificial has +1
        let sign = if needs_art[r] && residual[r] < 0.0 { -1.0 } else { 1.0 };
        for &(j, a) in &row.coeffs {
            t[base + j] += sign * a;
        }
        t[base + n + r] = sign;
        if needs_art[r] {
            t[base + art] = 1.0;
            basis[r] = art;
            beta[r] = residual[r].abs();
            state[art] = State::Basic;
            phase1_cost[art] = 1.0;
            art += 1;
        } else {
            basis[r] = n + r;
            beta[r] = residual[r];
            state[n + r] = State::Basic;
        }
        if state[n + r] != State::Basic {
            state[n + r] = if lower[n + r].is_finite() { State::AtLower } else { State::AtUpper };
        }
    }

    let mut tab = Tableau { m, cols, t, beta, basis, state, value, lower, upper, iterations: 0, max_iterations };

    if n_art > 0 {
        match tab.run(&phase1_cost) {
            Phase::IterationLimit => return limit(&tab, n),
            Phase::Unbounded => unreachable!("phase 1 objective is bounded below"),
            Phase::Optimal => {}
        }
        let infeas: f64 = (0..m).filter(|&r| tab.basis[r] >= n + m).map(|r| tab.beta[r]).sum();
        if infeas > FEAS_TOL {
            return LpSolution {
                status: LpStatus::Infeasible,
                x: vec![],
                objective: f64::NAN,
                iterations: tab.iterations,
            };
        }
        for a in n + m..cols {
            tab.upper[a] = 0.0;
            if tab.state[a] != State::Basic {
                tab.state[a] = State::AtLower;
                tab.value[a] = 0.0;
            }
        }
    }

    let mut cost = lp.cost.clone();
    cost.resize(cols, 0.0);
    match tab.run(&cost) {
        Phase::IterationLimit => return limit(&tab, n),
        Phase::Unbounded => {
            return LpSolution {
                status: LpStatus::Unbounded,
                x: vec![],
                objective: f64::NEG_INFINITY,
                iterations: tab.iterations,
            }
        }
        Phase::Optimal => {}
    }
    let x = primal(&tab, n);
    let objective = x.iter().zip(&lp.cost).map(|(a, c)| a * c).sum();
    LpSolution { status: LpStatus::Optimal, x, objective, iterations: tab.iterations }
}

fn primal(tab: &Tableau, n: usize) -> Vec<f64> {
    let mut x = tab.value[..n].to_vec();
    for r in 0..tab.m {
        let b = tab.basis[r];
        if b < n {
            x[b] = tab.beta[r].clamp(tab.lower[b], tab.upper[b]);
        }
    }
    x
}

fn limit(tab: &Tableau, _n: usize) -> LpSolution {
    LpSolution { status: LpStatus::IterationLimit, x: vec![], objective: f64::NAN, iterations: tab.iterations }
}
