//! Dense-tableau simplex for small bounded LPs.
//!
//! Every structural variable carries finite bounds. Row `i` becomes
//! `a_i·x + s_i = b_i` with a slack whose bounds encode the sense
//! (`≤`: `s ≥ 0`, `≥`: `s ≤ 0`, `=`: `s = 0`). Phase 1 adds one artificial
//! per row the starting point violates and minimizes their sum; phase 2
//! minimizes the objective. Pricing is Dantzig's rule until more than
//! `bland_after` consecutive degenerate pivots, then Bland's rule until the
//! next nondegenerate step.
//!
//! Rows added after a solve are appended to the final tableau and repaired
//! with the dual simplex, which keeps the previous basis dual feasible.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint<F> {
    pub coeffs: Vec<(usize, F)>,
    pub sense: Sense,
    pub rhs: F,
}

impl<F: Real> Constraint<F> {
    pub fn activity(&self, x: &[F]) -> F {
        self.coeffs
            .iter()
            .fold(F::zero(), |acc, &(j, a)| acc + a * x[j])
    }

    /// Amount by which `x` violates the row (zero when satisfied).
    pub fn violation(&self, x: &[F]) -> F {
        let lhs = self.activity(x);
        match self.sense {
            Sense::Le => (lhs - self.rhs).max(F::zero()),
            Sense::Ge => (self.rhs - lhs).max(F::zero()),
            Sense::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// `minimize c·x` subject to sparse rows and per-variable bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram<F> {
    lower: Vec<F>,
    upper: Vec<F>,
    objective: Vec<(usize, F)>,
    constraints: Vec<Constraint<F>>,
}

impl<F: Real> Default for LinearProgram<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: Real> LinearProgram<F> {
    pub fn new() -> Self {
        LinearProgram {
            lower: Vec::new(),
            upper: Vec::new(),
            objective: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn add_var(&mut self, lo: F, hi: F) -> usize {
        self.lower.push(lo);
        self.upper.push(hi);
        self.lower.len() - 1
    }

    pub fn set_objective(&mut self, var: usize, coef: F) {
        self.objective.retain(|&(j, _)| j != var);
        self.objective.push((var, coef));
        self.objective.sort_by_key(|&(j, _)| j);
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, F)>, sense: Sense, rhs: F) -> usize {
        self.constraints.push(Constraint { coeffs, sense, rhs });
        self.constraints.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.lower.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn bounds(&self, var: usize) -> (F, F) {
        (self.lower[var], self.upper[var])
    }

    pub fn objective(&self) -> &[(usize, F)] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint<F>] {
        &self.constraints
    }

    pub fn objective_value(&self, x: &[F]) -> F {
        self.objective
            .iter()
            .fold(F::zero(), |acc, &(j, c)| acc + c * x[j])
    }

    /// Largest bound or row violation of `x`.
    pub fn max_violation(&self, x: &[F]) -> F {
        let bounds = (0..self.num_vars()).map(|j| {
            (self.lower[j] - x[j])
                .max(x[j] - self.upper[j])
                .max(F::zero())
        });
        let rows = self.constraints.iter().map(|c| c.violation(x));
        bounds.chain(rows).fold(F::zero(), F::max)
    }

    fn check(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        for j in 0..n {
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(LpError::InvalidModel(format!("variable {j} has bounds [{lo:?}, {hi:?}]")));
            }
        }
        for &(j, c) in &self.objective {
            if j >= n || !c.is_finite() {
                return Err(LpError::InvalidModel(format!("objective entry {j}")));
            }
        }
        for (i, row) in self.constraints.iter().enumerate() {
            Self::check_row(n, &row.coeffs, row.rhs).map_err(|e| match e {
                LpError::InvalidModel(msg) => LpError::InvalidModel(format!("row {i}: {msg}")),
                other => other,
            })?;
        }
        Ok(())
    }

    fn check_row(n: usize, coeffs: &[(usize, F)], rhs: F) -> Result<(), LpError> {
        if !rhs.is_finite() {
            return Err(LpError::InvalidModel("non-finite right-hand side".into()));
        }
        for &(j, a) in coeffs {
            if j >= n || !a.is_finite() {
                return Err(LpError::InvalidModel(format!("bad coefficient on variable {j}")));
            }
        }
        Ok(())
    }

    /// Plain-text dump, one item per line:
    ///
    /// ```text
    /// var <j> <lo> <hi>
    /// min <j>:<c> ...
    /// row <i> <j>:<a> ... <sense> <rhs>
    /// ```
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for j in 0..self.num_vars() {
            let _ = writeln!(out, "var {j} {:?} {:?}", self.lower[j], self.upper[j]);
        }
        out.push_str("min");
        for (j, c) in &self.objective {
            let _ = write!(out, " {j}:{c:?}");
        }
        out.push('\n');
        for (i, row) in self.constraints.iter().enumerate() {
            let _ = write!(out, "row {i}");
            for (j, a) in &row.coeffs {
                let _ = write!(out, " {j}:{a:?}");
            }
            let _ = writeln!(out, " {} {:?}", row.sense, row.rhs);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<F> {
    pub status: Status,
    /// Structural variable values (meaningful when optimal).
    pub values: Vec<F>,
    pub objective: F,
    pub iterations: usize,
}

impl<F> LpSolution<F> {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("iteration limit of {0} pivots exceeded")]
    IterationLimit(usize),
    #[error("numerical breakdown: {0}")]
    Numerical(String),
}

#[derive(Debug, Clone)]
pub struct SimplexConfig {
    /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
    pub bland_after: usize,
    /// Pivot cap per solve; `None` scales with the tableau size.
    pub max_iterations: Option<usize>,
    /// Pivots between recomputations of basic values and reduced costs.
    pub refresh_every: usize,
}

impl Default for SimplexConfig {
    fn default() -> Self {
        SimplexConfig {
            bland_after: 50,
            max_iterations: None,
            refresh_every: 64,
        }
    }
}

/// Solves `lp` from scratch.
pub fn solve<F: Real>(lp: &LinearProgram<F>) -> Result<LpSolution<F>, LpError> {
    SimplexSolver::new(lp.clone(), SimplexConfig::default())?.solve()
}

/// Adds a row to a solved program and re-optimizes.
pub fn add_constraint_and_resolve<F: Real>(
    solver: &mut SimplexSolver<F>,
    coeffs: Vec<(usize, F)>,
    sense: Sense,
    rhs: F,
) -> Result<LpSolution<F>, LpError> {
    solver.add_constraint(coeffs, sense, rhs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColKind {
    Structural,
    Slack(usize),
    Artificial { row: usize, sign: bool },
}

/// Simplex state that survives between solves so rows can be added cheaply.
#[derive(Debug, Clone)]
pub struct SimplexSolver<F> {
    lp: LinearProgram<F>,
    config: SimplexConfig,
    tol: F,
    kinds: Vec<ColKind>,
    lo: Vec<F>,
    hi: Vec<F>,
    cost: Vec<F>,
    slack_of: Vec<usize>,
    /// `B⁻¹A`, one vector per row.
    tab: Vec<Vec<F>>,
    /// Reduced costs.
    d: Vec<F>,
    x: Vec<F>,
    at_upper: Vec<bool>,
    basis: Vec<usize>,
    row_of: Vec<Option<usize>>,
    iterations: usize,
    degenerate_run: usize,
    solved: Option<Status>,
}

enum Step {
    Done,
    Unbounded,
}

impl<F: Real> SimplexSolver<F> {
    pub fn new(lp: LinearProgram<F>, config: SimplexConfig) -> Result<Self, LpError> {
        lp.check()?;
        let n = lp.num_vars();
        let mut s = SimplexSolver {
            tol: F::tolerance(),
            kinds: vec![ColKind::Structural; n],
            lo: lp.lower.clone(),
            hi: lp.upper.clone(),
            cost: vec![F::zero(); n],
            slack_of: Vec::new(),
            tab: Vec::new(),
            d: Vec::new(),
            x: lp.lower.clone(),
            at_upper: vec![false; n],
            basis: Vec::new(),
            row_of: vec![None; n],
            iterations: 0,
            degenerate_run: 0,
            solved: None,
            lp,
            config,
        };
        for &(j, c) in &s.lp.objective {
            s.cost[j] = c;
        }
        for i in 0..s.lp.num_constraints() {
            s.push_slack(i);
        }
        Ok(s)
    }

    pub fn lp(&self) -> &LinearProgram<F> {
        &self.lp
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    fn slack_bounds(sense: Sense) -> (F, F) {
        match sense {
            Sense::Le => (F::zero(), F::infinity()),
            Sense::Ge => (F::neg_infinity(), F::zero()),
            Sense::Eq => (F::zero(), F::zero()),
        }
    }

    fn push_column(&mut self, kind: ColKind, lo: F, hi: F, value: F, cost: F) -> usize {
        let col = self.kinds.len();
        self.kinds.push(kind);
        self.lo.push(lo);
        self.hi.push(hi);
        self.cost.push(cost);
        self.x.push(value);
        self.at_upper.push(false);
        self.row_of.push(None);
        for row in &mut self.tab {
            row.push(F::zero());
        }
        if !self.d.is_empty() {
            self.d.push(cost);
        }
        col
    }

    fn push_slack(&mut self, i: usize) {
        let (lo, hi) = Self::slack_bounds(self.lp.constraints[i].sense);
        let start = if lo.is_finite() { lo } else { hi };
        let col = self.push_column(ColKind::Slack(i), lo, hi, start, F::zero());
        self.slack_of.push(col);
    }

    fn width(&self) -> usize {
        self.kinds.len()
    }

    fn max_iterations(&self) -> usize {
        self.config
            .max_iterations
            .unwrap_or(20_000 + 50 * (self.tab.len() + self.width()))
    }

    /// Solves from scratch (phase 1 then phase 2).
    pub fn solve(&mut self) -> Result<LpSolution<F>, LpError> {
        self.iterations = 0;
        self.initial_basis();
        let has_artificials = self
            .kinds
            .iter()
            .any(|k| matches!(k, ColKind::Artificial { .. }));
        if has_artificials {
            let phase1: Vec<F> = self
                .kinds
                .iter()
                .map(|k| match k {
                    ColKind::Artificial { .. } => F::one(),
                    _ => F::zero(),
                })
                .collect();
            self.recompute_duals(&phase1);
            if let Step::Unbounded = self.primal(&phase1)? {
                return Err(LpError::Numerical("phase 1 reported unbounded".into()));
            }
            self.refresh_values();
            let infeasibility = self
                .kinds
                .iter()
                .enumerate()
                .filter(|(_, k)| matches!(k, ColKind::Artificial { .. }))
                .fold(F::zero(), |acc, (j, _)| acc + self.x[j].abs());
            if infeasibility > F::lit(1e-7) {
                return Ok(self.finish(Status::Infeasible));
            }
            self.retire_artificials();
        }
        let cost = self.cost.clone();
        self.recompute_duals(&cost);
        self.optimize()
    }

    /// Appends `coeffs·x (sense) rhs` and re-optimizes from the current basis.
    pub fn add_constraint(
        &mut self,
        coeffs: Vec<(usize, F)>,
        sense: Sense,
        rhs: F,
    ) -> Result<LpSolution<F>, LpError> {
        LinearProgram::check_row(self.lp.num_vars(), &coeffs, rhs)?;
        let i = self.lp.add_constraint(coeffs, sense, rhs);
        if self.solved != Some(Status::Optimal) {
            self.reset();
            return self.solve();
        }
        self.push_slack(i);
        let slack = self.slack_of[i];

        let width = self.width();
        let mut dense = vec![F::zero(); width];
        for &(j, a) in &self.lp.constraints[i].coeffs {
            dense[j] = dense[j] + a;
        }
        let mut new_row = dense.clone();
        for (r, &b) in self.basis.iter().enumerate() {
            let coef = if b < dense.len() { dense[b] } else { F::zero() };
            if coef != F::zero() {
                for (t, &v) in new_row.iter_mut().zip(&self.tab[r]) {
                    *t = *t - coef * v;
                }
            }
        }
        new_row[slack] = F::one();
        let activity = self.lp.constraints[i].activity(&self.x);
        self.tab.push(new_row);
        self.basis.push(slack);
        self.row_of[slack] = Some(self.tab.len() - 1);
        self.x[slack] = rhs - activity;

        self.iterations = 0;
        match self.dual() {
            Ok(Some(status)) => return Ok(self.finish(status)),
            Ok(None) => {}
            Err(_) => {
                self.reset();
                return self.solve();
            }
        }
        match self.optimize() {
            Ok(sol) => Ok(sol),
            Err(_) => {
                self.reset();
                self.solve()
            }
        }
    }

    fn reset(&mut self) {
        let lp = std::mem::take(&mut self.lp);
        let config = self.config.clone();
        *self = SimplexSolver::new(lp, config).expect("model already validated");
    }

    fn initial_basis(&mut self) {
        let n = self.lp.num_vars();
        let rows = self.lp.num_constraints();
        // Drop artificials from a previous solve.
        let keep = n + rows;
        self.kinds.truncate(keep);
        self.lo.truncate(keep);
        self.hi.truncate(keep);
        self.cost.truncate(keep);
        self.x.truncate(keep);
        self.at_upper.truncate(keep);
        self.row_of.truncate(keep);
        for j in 0..n {
            self.x[j] = self.lo[j];
            self.at_upper[j] = false;
            self.row_of[j] = None;
        }
        self.tab = Vec::with_capacity(rows);
        self.basis = Vec::with_capacity(rows);
        self.d = Vec::new();
        for i in 0..rows {
            let mut row = vec![F::zero(); self.width()];
            for &(j, a) in &self.lp.constraints[i].coeffs {
                row[j] = row[j] + a;
            }
            row[self.slack_of[i]] = F::one();
            self.tab.push(row);
        }
        for i in 0..rows {
            let c = &self.lp.constraints[i];
            let residual = c.rhs - c.activity(&self.x);
            let s = self.slack_of[i];
            let (slo, shi) = (self.lo[s], self.hi[s]);
            if residual >= slo - self.tol && residual <= shi + self.tol {
                self.x[s] = residual;
                self.basis.push(s);
                self.row_of[s] = Some(i);
                continue;
            }
            let v = if residual < slo { slo } else { shi };
            self.x[s] = v;
            self.at_upper[s] = residual > shi;
            self.row_of[s] = None;
            let gap = residual - v;
            let positive = gap > F::zero();
            let a = self.push_column(
                ColKind::Artificial { row: i, sign: positive },
                F::zero(),
                F::infinity(),
                gap.abs(),
                F::zero(),
            );
            if !positive {
                for t in self.tab[i].iter_mut() {
                    *t = -*t;
                }
            }
            self.tab[i][a] = F::one();
            self.basis.push(a);
            self.row_of[a] = Some(i);
        }
        self.degenerate_run = 0;
    }

    /// Fixes artificials at zero and pivots basic ones out where possible.
    fn retire_artificials(&mut self) {
        for j in 0..self.width() {
            if let ColKind::Artificial { .. } = self.kinds[j] {
                self.hi[j] = F::zero();
                if self.row_of[j].is_none() {
                    self.x[j] = F::zero();
                    self.at_upper[j] = false;
                }
            }
        }
        for r in 0..self.basis.len() {
            let b = self.basis[r];
            if !matches!(self.kinds[b], ColKind::Artificial { .. }) {
                continue;
            }
            let candidate = (0..self.width())
                .filter(|&j| {
                    self.row_of[j].is_none()
                        && !matches!(self.kinds[j], ColKind::Artificial { .. })
                })
                .max_by(|&a, &b| {
                    self.tab[r][a]
                        .abs()
                        .partial_cmp(&self.tab[r][b].abs())
                        .unwrap()
                        .then(b.cmp(&a))
                });
            if let Some(q) = candidate {
                if self.tab[r][q].abs() > F::lit(1e-7) {
                    // Degenerate pivot: the artificial sits at zero.
                    self.x[b] = F::zero();
                    self.pivot(r, q);
                    self.at_upper[b] = false;
                }
            }
        }
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.hi[j] - self.lo[j] <= self.tol
    }

    fn optimize(&mut self) -> Result<LpSolution<F>, LpError> {
        let cost = self.cost.clone();
        for _ in 0..8 {
            if let Step::Unbounded = self.primal(&cost)? { return Ok(self.finish(Status::Unbounded)) }
            self.refresh_values();
            self.recompute_duals(&cost);
            if self.max_basic_infeasibility() > F::lit(1e-9) {
                if let Some(status) = self.dual()? {
                    return Ok(self.finish(status));
                }
                continue;
            }
            if self.entering_candidate(false).is_none() {
                return Ok(self.finish(Status::Optimal));
            }
        }
        Err(LpError::Numerical("could not reach a stable optimal basis".into()))
    }

    fn finish(&mut self, status: Status) -> LpSolution<F> {
        self.solved = Some(status);
        let n = self.lp.num_vars();
        let mut values = self.x[..n].to_vec();
        if status == Status::Optimal {
            for j in 0..n {
                values[j] = values[j].max(self.lo[j]).min(self.hi[j]);
            }
        }
        let objective = self.lp.objective_value(&values);
        LpSolution {
            status,
            values,
            objective,
            iterations: self.iterations,
        }
    }

    fn max_basic_infeasibility(&self) -> F {
        self.basis
            .iter()
            .map(|&b| (self.lo[b] - self.x[b]).max(self.x[b] - self.hi[b]))
            .fold(F::zero(), F::max)
    }

    /// Eligible entering column: Dantzig's largest violation, or the lowest
    /// index under Bland's rule.
    fn entering_candidate(&self, bland: bool) -> Option<(usize, F)> {
        let mut best: Option<(usize, F)> = None;
        for j in 0..self.width() {
            if self.row_of[j].is_some() || self.is_fixed(j) {
                continue;
            }
            let dj = self.d[j];
            let dir = if !self.at_upper[j] && dj < -self.tol {
                F::one()
            } else if self.at_upper[j] && dj > self.tol {
                -F::one()
            } else {
                continue;
            };
            if bland {
                return Some((j, dir));
            }
            match best {
                Some((b, _)) if self.d[b].abs() >= dj.abs() => {}
                _ => best = Some((j, dir)),
            }
        }
        best
    }

    fn primal(&mut self, cost: &[F]) -> Result<Step, LpError> {
        let limit = self.max_iterations();
        let mut since_refresh = 0;
        loop {
            if self.iterations >= limit {
                return Err(LpError::IterationLimit(limit));
            }
            let bland = self.degenerate_run > self.config.bland_after;
            let Some((q, dir)) = self.entering_candidate(bland) else {
                return Ok(Step::Done);
            };

            // Harris ratio test: bound the step with relaxed bounds, then pick
            // the largest pivot among rows that block within that bound.
            let relax = self.tol;
            let mut theta_max = F::infinity();
            for (r, &b) in self.basis.iter().enumerate() {
                let alpha = dir * self.tab[r][q];
                if alpha > self.tol && self.lo[b].is_finite() {
                    theta_max = theta_max.min((self.x[b] - self.lo[b] + relax) / alpha);
                } else if alpha < -self.tol && self.hi[b].is_finite() {
                    theta_max = theta_max.min((self.hi[b] - self.x[b] + relax) / -alpha);
                }
            }
            let flip = self.hi[q] - self.lo[q];
            let mut leave: Option<(usize, F)> = None;
            if flip > theta_max || !flip.is_finite() {
                if !theta_max.is_finite() {
                    return Ok(Step::Unbounded);
                }
                for (r, &b) in self.basis.iter().enumerate() {
                    let alpha = dir * self.tab[r][q];
                    let ratio = if alpha > self.tol && self.lo[b].is_finite() {
                        (self.x[b] - self.lo[b]) / alpha
                    } else if alpha < -self.tol && self.hi[b].is_finite() {
                        (self.hi[b] - self.x[b]) / -alpha
                    } else {
                        continue;
                    };
                    if ratio > theta_max {
                        continue;
                    }
                    let better = match leave {
                        None => true,
                        Some((l, _)) => {
                            if bland {
                                b < self.basis[l]
                            } else {
                                alpha.abs() > (dir * self.tab[l][q]).abs()
                            }
                        }
                    };
                    if better {
                        leave = Some((r, ratio.max(F::zero())));
                    }
                }
            }

            self.iterations += 1;
            match leave {
                None => {
                    // Bound flip of the entering variable.
                    let theta = flip;
                    for (r, &b) in self.basis.iter().enumerate() {
                        let alpha = self.tab[r][q];
                        if alpha != F::zero() {
                            self.x[b] = self.x[b] - dir * theta * alpha;
                        }
                    }
                    self.at_upper[q] = !self.at_upper[q];
                    self.x[q] = if self.at_upper[q] { self.hi[q] } else { self.lo[q] };
                    self.degenerate_run = 0;
                }
                Some((r, theta)) => {
                    let leaving = self.basis[r];
                    let alpha_r = dir * self.tab[r][q];
                    for (i, &b) in self.basis.iter().enumerate() {
                        let alpha = self.tab[i][q];
                        if alpha != F::zero() {
                            self.x[b] = self.x[b] - dir * theta * alpha;
                        }
                    }
                    self.x[q] = self.x[q] + dir * theta;
                    let to_upper = alpha_r < F::zero();
                    self.x[leaving] = if to_upper { self.hi[leaving] } else { self.lo[leaving] };
                    self.pivot(r, q);
                    self.at_upper[leaving] = to_upper;
                    if theta <= self.tol {
                        self.degenerate_run += 1;
                    } else {
                        self.degenerate_run = 0;
                    }
                }
            }
            since_refresh += 1;
            if since_refresh >= self.config.refresh_every {
                since_refresh = 0;
                self.refresh_values();
                self.recompute_duals(cost);
            }
        }
    }

    /// Dual simplex until primal feasible. Returns `Some(Infeasible)` when a
    /// violated row admits no entering column.
    fn dual(&mut self) -> Result<Option<Status>, LpError> {
        let limit = self.max_iterations();
        let cost = self.cost.clone();
        let mut since_refresh = 0;
        loop {
            if self.iterations >= limit {
                return Err(LpError::IterationLimit(limit));
            }
            let bland = self.degenerate_run > self.config.bland_after;
            let mut pick: Option<(usize, F)> = None;
            for (r, &b) in self.basis.iter().enumerate() {
                let below = self.lo[b] - self.x[b];
                let above = self.x[b] - self.hi[b];
                let infeas = below.max(above);
                if infeas <= self.tol {
                    continue;
                }
                let better = match pick {
                    None => true,
                    Some((l, v)) => {
                        if bland {
                            b < self.basis[l]
                        } else {
                            infeas > v
                        }
                    }
                };
                if better {
                    pick = Some((r, infeas));
                }
            }
            let Some((r, _)) = pick else {
                return Ok(None);
            };
            let leaving = self.basis[r];
            let increase = self.x[leaving] < self.lo[leaving];
            let target = if increase { self.lo[leaving] } else { self.hi[leaving] };

            let mut enter: Option<(usize, F, F)> = None;
            for j in 0..self.width() {
                if self.row_of[j].is_some() || self.is_fixed(j) {
                    continue;
                }
                let dir = if self.at_upper[j] { -F::one() } else { F::one() };
                // Change of the leaving basic per unit step of j.
                let rate = -dir * self.tab[r][j];
                let useful = if increase { rate > self.tol } else { rate < -self.tol };
                if !useful {
                    continue;
                }
                let ratio = (dir * self.d[j]).max(F::zero()) / rate.abs();
                let better = match enter {
                    None => true,
                    Some((e, best, _)) => {
                        if ratio < best - self.tol {
                            true
                        } else if ratio <= best + self.tol {
                            if bland {
                                j < e
                            } else {
                                self.tab[r][j].abs() > self.tab[r][e].abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    enter = Some((j, ratio, dir));
                }
            }
            let Some((q, ratio, dir)) = enter else {
                return Ok(Some(Status::Infeasible));
            };

            self.iterations += 1;
            let rate = -dir * self.tab[r][q];
            let theta = (target - self.x[leaving]) / rate;
            for (i, &b) in self.basis.iter().enumerate() {
                let alpha = self.tab[i][q];
                if alpha != F::zero() {
                    self.x[b] = self.x[b] - dir * theta * alpha;
                }
            }
            self.x[q] = self.x[q] + dir * theta;
            self.x[leaving] = target;
            self.pivot(r, q);
            self.at_upper[leaving] = !increase;
            if ratio <= self.tol {
                self.degenerate_run += 1;
            } else {
                self.degenerate_run = 0;
            }
            since_refresh += 1;
            if since_refresh >= self.config.refresh_every {
                since_refresh = 0;
                self.refresh_values();
                self.recompute_duals(&cost);
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let piv = self.tab[r][q];
        let inv = F::one() / piv;
        for v in self.tab[r].iter_mut() {
            *v = *v * inv;
        }
        self.tab[r][q] = F::one();
        let pivot_row = std::mem::take(&mut self.tab[r]);
        let nz: Vec<usize> = (0..pivot_row.len())
            .filter(|&j| pivot_row[j] != F::zero())
            .collect();
        for (i, row) in self.tab.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[q];
            if factor == F::zero() {
                continue;
            }
            for &j in &nz {
                row[j] = row[j] - factor * pivot_row[j];
            }
            row[q] = F::zero();
        }
        let dq = self.d[q];
        if dq != F::zero() {
            for &j in &nz {
                self.d[j] = self.d[j] - dq * pivot_row[j];
            }
            self.d[q] = F::zero();
        }
        self.tab[r] = pivot_row;
        let old = self.basis[r];
        self.row_of[old] = None;
        self.basis[r] = q;
        self.row_of[q] = Some(r);
    }

    /// Recomputes basic values as `B⁻¹(b − N·x_N)`; the slack columns of the
    /// tableau hold `B⁻¹`.
    fn refresh_values(&mut self) {
        let rows = self.tab.len();
        let mut w: Vec<F> = self.lp.constraints.iter().map(|c| c.rhs).collect();
        for (i, c) in self.lp.constraints.iter().enumerate() {
            for &(j, a) in &c.coeffs {
                if self.row_of[j].is_none() {
                    w[i] = w[i] - a * self.x[j];
                }
            }
            let s = self.slack_of[i];
            if self.row_of[s].is_none() {
                w[i] = w[i] - self.x[s];
            }
        }
        for j in 0..self.width() {
            if let ColKind::Artificial { row, sign } = self.kinds[j] {
                if self.row_of[j].is_none() {
                    let a = if sign { F::one() } else { -F::one() };
                    w[row] = w[row] - a * self.x[j];
                }
            }
        }
        for r in 0..rows {
            let b = self.basis[r];
            let value = (0..rows).fold(F::zero(), |acc, i| acc + self.tab[r][self.slack_of[i]] * w[i]);
            self.x[b] = value;
        }
    }

    /// Reduced costs `c − (c_B B⁻¹) A` from the original columns.
    fn recompute_duals(&mut self, cost: &[F]) {
        let rows = self.tab.len();
        let mut y = vec![F::zero(); rows];
        for r in 0..rows {
            let cb = cost[self.basis[r]];
            if cb != F::zero() {
                for i in 0..rows {
                    y[i] = y[i] + cb * self.tab[r][self.slack_of[i]];
                }
            }
        }
        let mut d = cost.to_vec();
        for (i, c) in self.lp.constraints.iter().enumerate() {
            if y[i] == F::zero() {
                continue;
            }
            for &(j, a) in &c.coeffs {
                d[j] = d[j] - y[i] * a;
            }
            d[self.slack_of[i]] = d[self.slack_of[i]] - y[i];
        }
        for j in 0..self.width() {
            if let ColKind::Artificial { row, sign } = self.kinds[j] {
                let a = if sign { F::one() } else { -F::one() };
                d[j] = d[j] - y[row] * a;
            }
        }
        for &b in &self.basis {
            d[b] = F::zero();
        }
        self.d = d;
    }
}
