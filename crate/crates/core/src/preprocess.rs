//! Cost scaling by guessed powers of two, cheap/expensive classification and
//! the restart wrapper for randomized procedures.
//!
//! A guess `b` keeps the interfaces costing at most `2^b` and divides their
//! costs by the largest kept cost `C_b`, so the scaled costs lie in `[0, 1]`
//! and reach 1. A vertex whose kept scaled costs sum to at most 1 is cheap.

use num_traits::{One, Zero};

use crate::dsu::groups_connected;
use crate::scalar::rational_to_f64;
use crate::{seed, verify, Assignment, Instance, InterfaceSet, Rational};

/// Which feasibility notion a guess must support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Problem {
    /// Every edge must be coverable by kept interfaces.
    Coverage,
    /// Every terminal group must be connected by coverable edges.
    Connectivity,
}

/// One guess of the preprocessing: kept interfaces and scaled costs.
#[derive(Debug, Clone)]
pub struct ScaledInstance<'a> {
    base: &'a Instance,
    b: u32,
    kept: Vec<InterfaceSet>,
    norm_factor: Rational,
    scaled: Vec<Vec<(usize, Rational)>>,
    scaled_f64: Vec<Vec<(usize, f64)>>,
    cheap: Vec<bool>,
}

fn pow2(b: u32) -> Rational {
    Rational::from_integer(1i128 << b.min(126))
}

/// `C`: the smallest `b` with `2^b ≥ max cost`, or 0 when the maximum is at most 1.
pub fn guess_range(inst: &Instance) -> u32 {
    let max = inst.max_cost();
    let mut c = 0;
    while pow2(c) < max {
        c += 1;
    }
    c
}

impl<'a> ScaledInstance<'a> {
    /// Applies guess `b` without checking whether it should be discarded.
    pub fn new(base: &'a Instance, b: u32) -> Self {
        let limit = pow2(b);
        let kept_lists: Vec<Vec<(usize, Rational)>> = (0..base.n())
            .map(|v| {
                base.interfaces(v)
                    .iter()
                    .copied()
                    .filter(|&(_, c)| c <= limit)
                    .collect()
            })
            .collect();
        let max_kept = kept_lists
            .iter()
            .flatten()
            .map(|&(_, c)| c)
            .max()
            .unwrap_or_else(Rational::zero);
        let norm_factor = if max_kept.is_zero() {
            Rational::one()
        } else {
            max_kept
        };
        Self::from_lists(base, b, kept_lists, norm_factor)
    }

    /// The unscaled instance: every interface kept, costs unchanged, no
    /// cheap vertices.
    pub fn identity(base: &'a Instance) -> Self {
        let lists = (0..base.n()).map(|v| base.interfaces(v).to_vec()).collect();
        let mut s = Self::from_lists(base, guess_range(base), lists, Rational::one());
        s.cheap = vec![false; base.n()];
        s
    }

    fn from_lists(
        base: &'a Instance,
        b: u32,
        lists: Vec<Vec<(usize, Rational)>>,
        norm_factor: Rational,
    ) -> Self {
        let kept = lists
            .iter()
            .map(|l| l.iter().map(|&(i, _)| i).collect())
            .collect();
        let scaled: Vec<Vec<(usize, Rational)>> = lists
            .into_iter()
            .map(|l| l.into_iter().map(|(i, c)| (i, c / norm_factor)).collect())
            .collect();
        let scaled_f64 = scaled
            .iter()
            .map(|l| l.iter().map(|(i, c)| (*i, rational_to_f64(c))).collect())
            .collect();
        let cheap = scaled
            .iter()
            .map(|l| l.iter().map(|&(_, c)| c).sum::<Rational>() <= Rational::one())
            .collect();
        ScaledInstance {
            base,
            b,
            kept,
            norm_factor,
            scaled,
            scaled_f64,
            cheap,
        }
    }

    pub fn base(&self) -> &'a Instance {
        self.base
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn norm_factor(&self) -> Rational {
        self.norm_factor
    }

    pub fn kept(&self, v: usize) -> InterfaceSet {
        self.kept[v]
    }

    pub fn is_kept(&self, interface: usize, v: usize) -> bool {
        self.kept[v].contains(interface)
    }

    /// Kept interfaces shared by both endpoints.
    pub fn kept_common(&self, u: usize, v: usize) -> InterfaceSet {
        self.kept[u].intersection(self.kept[v])
    }

    pub fn scaled_cost(&self, interface: usize, v: usize) -> Option<Rational> {
        self.scaled[v]
            .iter()
            .find(|&&(i, _)| i == interface)
            .map(|&(_, c)| c)
    }

    /// Kept `(interface, scaled cost)` pairs at `v`, ascending by interface.
    pub fn scaled_interfaces(&self, v: usize) -> &[(usize, Rational)] {
        &self.scaled[v]
    }

    pub fn scaled_interfaces_f64(&self, v: usize) -> &[(usize, f64)] {
        &self.scaled_f64[v]
    }

    pub fn is_cheap(&self, v: usize) -> bool {
        self.cheap[v]
    }

    pub fn cheap_vertices(&self) -> Vec<usize> {
        (0..self.cheap.len()).filter(|&v| self.cheap[v]).collect()
    }

    /// Edges with at least one kept common interface.
    pub fn coverable_edges(&self) -> Vec<(usize, usize)> {
        self.base
            .edges()
            .iter()
            .copied()
            .filter(|&(u, v)| !self.kept_common(u, v).is_empty())
            .collect()
    }

    /// Maximum per-vertex cost of `a` in scaled units.
    pub fn scaled_max_cost(&self, a: &Assignment) -> Rational {
        (0..self.base.n())
            .map(|v| {
                self.scaled[v]
                    .iter()
                    .filter(|(i, _)| a.active(v).contains(*i))
                    .map(|&(_, c)| c)
                    .sum::<Rational>()
            })
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

/// True when guess `b` must be skipped: some edge (coverage) or group
/// (connectivity) cannot be served by kept interfaces, or `b ≥ 1` and no
/// kept cost exceeds `2^(b-1)`.
pub fn discard_guess(inst: &Instance, b: u32, problem: Problem) -> bool {
    let limit = pow2(b);
    let kept = |v: usize| -> InterfaceSet {
        inst.interfaces(v)
            .iter()
            .filter(|&&(_, c)| c <= limit)
            .map(|&(i, _)| i)
            .collect()
    };
    let kept: Vec<InterfaceSet> = (0..inst.n()).map(kept).collect();
    let coverable = |&(u, v): &(usize, usize)| kept[u].intersects(kept[v]);
    let serviceable = match problem {
        Problem::Coverage => inst.edges().iter().all(coverable),
        Problem::Connectivity => {
            let usable: Vec<(usize, usize)> =
                inst.edges().iter().copied().filter(coverable).collect();
            groups_connected(inst.n(), &usable, inst.groups())
        }
    };
    if !serviceable {
        return true;
    }
    if b >= 1 {
        let max_kept = (0..inst.n())
            .flat_map(|v| inst.interfaces(v).iter().map(|&(_, c)| c))
            .filter(|&c| c <= limit)
            .max()
            .unwrap_or_else(Rational::zero);
        if max_kept <= pow2(b - 1) {
            return true;
        }
    }
    false
}

/// Every kept guess `b ∈ {0, …, C}` in ascending order.
pub fn enumerate_guesses(inst: &Instance, problem: Problem) -> Vec<ScaledInstance<'_>> {
    (0..=guess_range(inst))
        .filter(|&b| !discard_guess(inst, b, problem))
        .map(|b| ScaledInstance::new(inst, b))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RestartConfig {
    /// Lower bound on the number of runs per guess.
    pub floor: usize,
}

impl Default for RestartConfig {
    fn default() -> Self {
        RestartConfig { floor: 3 }
    }
}

/// Runs per guess: `max(⌈ln C / ln m + 1⌉, 1, floor)`, with the logarithmic
/// term dropped when `m ≤ 2` or `C ≤ 1`.
pub fn restart_count(c: u32, m: usize, config: RestartConfig) -> usize {
    let k = if m <= 2 || c <= 1 {
        1
    } else {
        ((c as f64).ln() / (m as f64).ln() + 1.0).ceil() as usize
    };
    k.max(1).max(config.floor)
}

/// What a randomized procedure reports for one run.
#[derive(Debug, Clone)]
pub struct RunResult<T> {
    pub assignment: Assignment,
    pub feasible: bool,
    pub extra: T,
}

#[derive(Debug, Clone)]
pub struct BestRun<T> {
    pub b: u32,
    pub run: usize,
    /// Max-cost in original units.
    pub cost: Rational,
    pub assignment: Assignment,
    pub extra: T,
}

#[derive(Debug, Clone)]
pub struct RestartOutcome<T> {
    pub best: Option<BestRun<T>>,
    pub runs: usize,
    pub feasible_runs: usize,
}

/// Runs `procedure` `runs_per_guess` times on every guess with seeds
/// `derive_seed(seed, [b, run])` and keeps the feasible result of least
/// original max-cost (ties: smaller `b`, then smaller run).
pub fn run_with_restarts<T>(
    guesses: &[ScaledInstance<'_>],
    runs_per_guess: usize,
    seed: u64,
    mut procedure: impl FnMut(&ScaledInstance<'_>, u64) -> RunResult<T>,
) -> RestartOutcome<T> {
    let mut outcome = RestartOutcome {
        best: None,
        runs: 0,
        feasible_runs: 0,
    };
    for s in guesses {
        for run in 0..runs_per_guess {
            let run_seed = seed::derive_seed(seed, &[s.b() as u64, run as u64]);
            let result = procedure(s, run_seed);
            outcome.runs += 1;
            if !result.feasible {
                continue;
            }
            outcome.feasible_runs += 1;
            let cost = verify::max_cost(s.base(), &result.assignment)
                .expect("procedure returned an assignment for another instance")
                .max;
            if outcome.best.as_ref().is_none_or(|best| cost < best.cost) {
                outcome.best = Some(BestRun {
                    b: s.b(),
                    run,
                    cost,
                    assignment: result.assignment,
                    extra: result.extra,
                });
            }
        }
    }
    outcome
}
