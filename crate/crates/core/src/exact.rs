//! Exhaustive optimal solvers for small instances.
//!
//! An assignment is encoded as a global bitmask with one bit per
//! (vertex, available interface) slot: vertex 0 owns the lowest bits, and
//! within a vertex bit `j` stands for its `j`-th interface in ascending
//! order. Plain mode scans every mask in ascending order and keeps the first
//! of least max-cost, so ties resolve to the smallest mask. Branch-and-bound
//! assigns vertices from the highest index down, which visits masks in the
//! same order and therefore returns the same assignment.

use thiserror::Error;

use crate::dsu::Dsu;
use crate::{Assignment, Instance, InterfaceSet, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExactMode {
    Plain,
    BranchAndBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactConfig {
    /// Largest admissible `Σ_v |λ(v)|`.
    pub budget: usize,
    pub mode: ExactMode,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            budget: 24,
            mode: ExactMode::Plain,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("instance has {slots} interface slots, budget is {budget}")]
    Budget { slots: usize, budget: usize },
    #[error("no feasible assignment exists")]
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSolution {
    pub cost: Rational,
    pub assignment: Assignment,
    /// The global slot bitmask of `assignment`.
    pub mask: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Goal {
    Cover,
    Connect,
}

struct Tables {
    offset: Vec<u32>,
    width: Vec<u32>,
    /// `sets[v][sub]`: interfaces of subset `sub` of `λ(v)`.
    sets: Vec<Vec<InterfaceSet>>,
    /// `rank[v][sub]`: position of the subset's cost among all distinct costs.
    rank: Vec<Vec<u32>>,
    costs: Vec<Rational>,
}

impl Tables {
    fn new(inst: &Instance, config: &ExactConfig) -> Result<Self, ExactError> {
        let slots: usize = (0..inst.n()).map(|v| inst.interfaces(v).len()).sum();
        if slots > config.budget || slots > 63 {
            return Err(ExactError::Budget {
                slots,
                budget: config.budget,
            });
        }
        let mut offset = Vec::new();
        let mut width = Vec::new();
        let mut sets = Vec::new();
        let mut raw: Vec<Vec<Rational>> = Vec::new();
        let mut at = 0u32;
        for v in 0..inst.n() {
            let list = inst.interfaces(v);
            offset.push(at);
            width.push(list.len() as u32);
            at += list.len() as u32;
            let mut vs = Vec::with_capacity(1 << list.len());
            let mut vc = Vec::with_capacity(1 << list.len());
            for sub in 0..1usize << list.len() {
                let mut set = InterfaceSet::EMPTY;
                let mut cost = Rational::from_integer(0);
                for (j, &(i, c)) in list.iter().enumerate() {
                    if sub >> j & 1 == 1 {
                        set.insert(i);
                        cost += c;
                    }
                }
                vs.push(set);
                vc.push(cost);
            }
            sets.push(vs);
            raw.push(vc);
        }
        let mut costs: Vec<Rational> = raw.iter().flatten().copied().collect();
        costs.sort();
        costs.dedup();
        let rank = raw
            .iter()
            .map(|vc| {
                vc.iter()
                    .map(|c| costs.binary_search(c).unwrap() as u32)
                    .collect()
            })
            .collect();
        Ok(Tables {
            offset,
            width,
            sets,
            rank,
            costs,
        })
    }

    fn sub(&self, mask: u64, v: usize) -> usize {
        ((mask >> self.offset[v]) & ((1u64 << self.width[v]) - 1)) as usize
    }

    fn assignment(&self, mask: u64) -> Assignment {
        Assignment::from_sets(
            (0..self.sets.len())
                .map(|v| self.sets[v][self.sub(mask, v)])
                .collect(),
        )
    }
}

fn feasible(inst: &Instance, goal: Goal, active: &[InterfaceSet], dsu: &mut Dsu) -> bool {
    match goal {
        Goal::Cover => inst
            .edges()
            .iter()
            .all(|&(u, v)| active[u].intersects(active[v])),
        Goal::Connect => {
            *dsu = Dsu::new(inst.n());
            for &(u, v) in inst.edges() {
                if active[u].intersects(active[v]) {
                    dsu.union(u, v);
                }
            }
            inst.groups()
                .iter()
                .all(|g| g.iter().all(|&t| dsu.same(g[0], t)))
        }
    }
}

fn plain(inst: &Instance, t: &Tables, goal: Goal) -> Option<u64> {
    let n = inst.n();
    let total: u32 = t.width.iter().sum();
    let mut best: Option<(u32, u64)> = None;
    let mut active = vec![InterfaceSet::EMPTY; n];
    let mut dsu = Dsu::new(n);
    for mask in 0..1u64 << total {
        let rank = (0..n).map(|v| t.rank[v][t.sub(mask, v)]).max().unwrap_or(0);
        if best.is_some_and(|(r, _)| rank >= r) {
            continue;
        }
        for v in 0..n {
            active[v] = t.sets[v][t.sub(mask, v)];
        }
        if feasible(inst, goal, &active, &mut dsu) {
            best = Some((rank, mask));
        }
    }
    best.map(|(_, m)| m)
}

struct Search<'a> {
    inst: &'a Instance,
    t: &'a Tables,
    goal: Goal,
    /// Edges `(v, w)` with `w > v`, per `v`.
    upper: Vec<Vec<usize>>,
    active: Vec<InterfaceSet>,
    dsu: Dsu,
    best: Option<(u32, u64)>,
}

impl Search<'_> {
    fn dfs(&mut self, v: usize, mask: u64, rank: u32) {
        if self.best.is_some_and(|(r, _)| rank >= r) {
            return;
        }
        let Some(v) = v.checked_sub(1) else {
            let mut dsu = std::mem::replace(&mut self.dsu, Dsu::new(0));
            if feasible(self.inst, self.goal, &self.active, &mut dsu) {
                self.best = Some((rank, mask));
            }
            self.dsu = dsu;
            return;
        };
        for sub in 0..1usize << self.t.width[v] {
            let set = self.t.sets[v][sub];
            if self.goal == Goal::Cover {
                let ok = self.upper[v].iter().all(|&w| set.intersects(self.active[w]));
                if !ok {
                    continue;
                }
            }
            self.active[v] = set;
            let next = mask | (sub as u64) << self.t.offset[v];
            self.dfs(v, next, rank.max(self.t.rank[v][sub]));
        }
        self.active[v] = InterfaceSet::EMPTY;
    }
}

fn branch_and_bound(inst: &Instance, t: &Tables, goal: Goal) -> Option<u64> {
    let n = inst.n();
    let mut upper = vec![Vec::new(); n];
    for &(u, v) in inst.edges() {
        let (lo, hi) = if u < v { (u, v) } else { (v, u) };
        upper[lo].push(hi);
    }
    let mut s = Search {
        inst,
        t,
        goal,
        upper,
        active: vec![InterfaceSet::EMPTY; n],
        dsu: Dsu::new(n),
        best: None,
    };
    s.dfs(n, 0, 0);
    s.best.map(|(_, m)| m)
}

fn solve(inst: &Instance, config: &ExactConfig, goal: Goal) -> Result<ExactSolution, ExactError> {
    let t = Tables::new(inst, config)?;
    let mask = match config.mode {
        ExactMode::Plain => plain(inst, &t, goal),
        ExactMode::BranchAndBound => branch_and_bound(inst, &t, goal),
    }
    .ok_or(ExactError::Infeasible)?;
    let rank = (0..inst.n()).map(|v| t.rank[v][t.sub(mask, v)]).max();
    let cost = rank.map_or(Rational::from_integer(0), |r| t.costs[r as usize]);
    Ok(ExactSolution {
        cost,
        assignment: t.assignment(mask),
        mask,
    })
}

/// Least max-cost covering assignment.
pub fn exact_coverage(inst: &Instance, config: &ExactConfig) -> Result<ExactSolution, ExactError> {
    solve(inst, config, Goal::Cover)
}

/// Least max-cost assignment connecting every terminal group.
pub fn exact_connectivity(inst: &Instance, config: &ExactConfig) -> Result<ExactSolution, ExactError> {
    solve(inst, config, Goal::Connect)
}
