//! The Connectivity relaxation solved by cutting planes, edge sampling and
//! iterative threshold rounding.
//!
//! On top of the Coverage columns the relaxation has `y[e] ∈ [0,1]` per edge,
//! linked by `Σ_i z[i,e] ≥ y[e]`, and one cut row `y(δ(S)) ≥ 1` for every
//! vertex set `S` separating two terminals of a group. Cut rows are added
//! lazily: after each solve a max-flow oracle looks for cuts of value below
//! `1 − ε_sep`, and every distinct violated cut found is appended.

use std::collections::HashSet;

use rand::Rng;

use crate::coverage::{cheapest_common, draw_thresholds, round_with_thresholds, ActivationLp, LpMode};
use crate::exact::exact_connectivity;
use crate::lp::{Sense, SimplexConfig, SimplexSolver, Status};
use crate::maxflow::max_flow_min_cut;
use crate::preprocess::{self, Problem, RunResult, ScaledInstance};
use crate::report::{SolveConfig, SolveError, SolveOutcome, SolveReport};
use crate::{dsu, seed, verify, Assignment, CapGraph, Cut, Instance};

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityConfig {
    /// `p_e = min(1, sample_factor · ln m · y_e)`.
    pub sample_factor: f64,
    /// Activation when `round_factor · ln m · x ≥ t`.
    pub round_factor: f64,
    /// Keep every kept interface at every cheap vertex instead of only at
    /// cheap vertices touching `H` or a group.
    pub keep_all_cheap: bool,
    pub eps_sep: f64,
    /// Cap on LP solves in the cutting-plane loop; default `10·n·p`.
    pub max_cut_iterations: Option<usize>,
}

impl Default for ConnectivityConfig {
    fn default() -> Self {
        ConnectivityConfig {
            sample_factor: 4.0,
            round_factor: 4.0,
            keep_all_cheap: false,
            eps_sep: 1e-6,
            max_cut_iterations: None,
        }
    }
}

/// Result of one oracle pass.
#[derive(Debug, Clone)]
pub struct Separation {
    /// The cut of least value over all (group, terminal) pairs, if violated.
    pub most_violated: Option<Cut>,
    /// Every violated cut found, deduplicated by crossing set, in discovery order.
    pub violated: Vec<Cut>,
    /// Max-flow computations performed.
    pub calls: usize,
}

/// For each group, computes a minimum cut between its first terminal and
/// each other terminal under capacities `y`.
pub fn separation_oracle(inst: &Instance, y: &[f64], eps_sep: f64) -> Separation {
    let g = CapGraph::from_edges(
        inst.n(),
        inst.edges()
            .iter()
            .zip(y)
            .map(|(&(u, v), &c)| (u, v, c.clamp(0.0, 1.0))),
    );
    let mut out = Separation {
        most_violated: None,
        violated: Vec::new(),
        calls: 0,
    };
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    for group in inst.groups() {
        let Some((&root, rest)) = group.split_first() else {
            continue;
        };
        for &t in rest {
            let (_, cut) = max_flow_min_cut(&g, root, t);
            out.calls += 1;
            if cut.value >= 1.0 - eps_sep {
                continue;
            }
            if out
                .most_violated
                .as_ref()
                .is_none_or(|best| cut.value < best.value)
            {
                out.most_violated = Some(cut.clone());
            }
            if seen.insert(cut.crossing.clone()) {
                out.violated.push(cut);
            }
        }
    }
    out
}

/// An optimal solution of the Connectivity relaxation with all cuts added.
#[derive(Debug, Clone)]
pub struct ConnectivityFractional {
    pub mode: LpMode,
    pub x: Vec<Vec<(usize, f64)>>,
    pub z: Vec<Vec<(usize, f64)>>,
    pub y: Vec<f64>,
    pub objective: f64,
    /// Crossing edge sets of the cut rows, in insertion order.
    pub cuts: Vec<Vec<usize>>,
    pub oracle_calls: usize,
    pub lp_solves: usize,
}

impl ConnectivityFractional {
    pub fn x(&self, v: usize, interface: usize) -> f64 {
        self.x[v]
            .iter()
            .find(|&&(i, _)| i == interface)
            .map_or(0.0, |&(_, x)| x)
    }
}

/// The relaxation without cut rows, with the column of each `y[e]`.
pub fn build_connectivity_lp(s: &ScaledInstance<'_>, mode: LpMode) -> (ActivationLp, Vec<usize>) {
    let inst = s.base();
    let mut built = ActivationLp::build(s, mode);
    let mut y_vars = Vec::with_capacity(inst.m());
    for e in 0..inst.m() {
        let hi = if built.z_vars[e].is_empty() { 0.0 } else { 1.0 };
        let y = built.lp.add_var(0.0, hi);
        y_vars.push(y);
        let mut row: Vec<(usize, f64)> = built.z_vars[e].iter().map(|&(_, z)| (z, 1.0)).collect();
        row.push((y, -1.0));
        built.lp.add_constraint(row, Sense::Ge, 0.0);
    }
    (built, y_vars)
}

pub fn solve_connectivity_lp(
    s: &ScaledInstance<'_>,
    mode: LpMode,
    config: &ConnectivityConfig,
) -> Result<ConnectivityFractional, SolveError> {
    let inst = s.base();
    if !dsu::groups_connected(inst.n(), &s.coverable_edges(), inst.groups()) {
        return Err(SolveError::GroupsSplit);
    }
    let (built, y_vars) = build_connectivity_lp(s, mode);

    let p = inst.groups().iter().filter(|g| g.len() > 1).count().max(1);
    let cap = config.max_cut_iterations.unwrap_or(10 * inst.n() * p);
    let mut solver = SimplexSolver::new(built.lp.clone(), SimplexConfig::default())?;
    let mut sol = solver.solve()?;
    let mut cuts: Vec<Vec<usize>> = Vec::new();
    let mut known: HashSet<Vec<usize>> = HashSet::new();
    let mut oracle_calls = 0;
    let mut lp_solves = 1;
    loop {
        if sol.status != Status::Optimal {
            return Err(SolveError::LpInfeasible);
        }
        let y: Vec<f64> = y_vars.iter().map(|&c| sol.values[c]).collect();
        let sep = separation_oracle(inst, &y, config.eps_sep);
        oracle_calls += sep.calls;
        let Some(worst) = sep.most_violated else {
            return Ok(ConnectivityFractional {
                mode,
                x: built.extract_x(s, &sol.values),
                z: built.extract_z(&sol.values),
                y,
                objective: sol.objective,
                cuts,
                oracle_calls,
                lp_solves,
            });
        };
        let fresh: Vec<Cut> = sep
            .violated
            .into_iter()
            .filter(|c| !known.contains(&c.crossing))
            .collect();
        if lp_solves > cap || fresh.is_empty() {
            return Err(SolveError::CutLimit {
                iterations: lp_solves,
                cuts: cuts.len(),
                violation: 1.0 - worst.value,
            });
        }
        for cut in fresh {
            let row = cut.crossing.iter().map(|&e| (y_vars[e], 1.0)).collect();
            sol = solver.add_constraint(row, Sense::Ge, 1.0)?;
            known.insert(cut.crossing.clone());
            cuts.push(cut.crossing);
            if sol.status != Status::Optimal {
                break;
            }
        }
        lp_solves += 1;
    }
}

/// Optimum of the unscaled plain relaxation, a lower bound on the
/// Connectivity OPT in original units.
pub fn connectivity_lower_bound(inst: &Instance, config: &ConnectivityConfig) -> Result<f64, SolveError> {
    Ok(solve_connectivity_lp(&ScaledInstance::identity(inst), LpMode::Pure, config)?.objective)
}

/// Draws `H`: edge `e` is kept with probability `min(1, factor · ln m · y_e)`.
pub fn sample_h(y: &[f64], factor: f64, seed: u64) -> Vec<usize> {
    let scale = factor * (y.len() as f64).ln();
    let mut rng = seed::rng(seed);
    (0..y.len())
        .filter(|&e| {
            let p = (scale * y[e]).min(1.0);
            rng.gen::<f64>() < p
        })
        .collect()
}

/// Round count `T = ⌈2 ln m / (1 − 1/e)⌉`.
pub fn round_count(m: usize) -> usize {
    let t = 2.0 * (m as f64).ln() / (1.0 - (-1.0f64).exp());
    (t.ceil() as usize).max(1)
}

/// Progress of the iterative rounding.
#[derive(Debug, Clone)]
pub struct RoundingState {
    pub h: Vec<usize>,
    /// `covered[j]` tells whether `h[j]` is covered by `acc`.
    pub covered: Vec<bool>,
    pub acc: Assignment,
    pub round: usize,
}

impl RoundingState {
    pub fn new(inst: &Instance, h: Vec<usize>) -> Self {
        let covered = vec![false; h.len()];
        RoundingState {
            h,
            covered,
            acc: Assignment::empty(inst.n()),
            round: 0,
        }
    }

    pub fn covered_count(&self) -> usize {
        self.covered.iter().filter(|&&c| c).count()
    }

    pub fn is_complete(&self) -> bool {
        self.covered.iter().all(|&c| c)
    }

    /// One round: fresh thresholds, union into the accumulated assignment.
    pub fn step(
        &mut self,
        s: &ScaledInstance<'_>,
        mode: LpMode,
        x: &[Vec<(usize, f64)>],
        scale: f64,
        rng: &mut impl Rng,
    ) {
        let t = draw_thresholds(s.base().interface_count(), rng);
        let a = round_with_thresholds(s, mode, x, scale, &t);
        self.acc.union_with(&a);
        let edges = s.base().edges();
        for (j, &e) in self.h.iter().enumerate() {
            let (u, v) = edges[e];
            self.covered[j] = self.acc.active(u).intersects(self.acc.active(v));
        }
        self.round += 1;
    }
}

#[derive(Debug, Clone)]
pub struct RoundingOutcome {
    pub assignment: Assignment,
    pub rounds_used: usize,
    /// Covered `H` edges after each round.
    pub covered_per_round: Vec<usize>,
}

/// Up to `T` rounds of `round_factor · ln m` threshold rounding, stopping
/// once `H` is covered.
pub fn iterative_rounding(
    s: &ScaledInstance<'_>,
    frac: &ConnectivityFractional,
    h: &[usize],
    config: &ConnectivityConfig,
    seed: u64,
) -> RoundingOutcome {
    let inst = s.base();
    let m = inst.m();
    let scale = config.round_factor * (m as f64).ln();
    let mut rng = seed::rng(seed);
    let mut state = RoundingState::new(inst, h.to_vec());
    let mut covered_per_round = Vec::new();
    for _ in 0..round_count(m) {
        if state.is_complete() {
            break;
        }
        state.step(s, frac.mode, &frac.x, scale, &mut rng);
        covered_per_round.push(state.covered_count());
    }
    let mut assignment = state.acc;
    if !config.keep_all_cheap && frac.mode == LpMode::Strengthened {
        let mut relevant = vec![false; inst.n()];
        for &e in h {
            let (u, v) = inst.edges()[e];
            relevant[u] = true;
            relevant[v] = true;
        }
        for &t in inst.groups().iter().flatten() {
            relevant[t] = true;
        }
        for v in s.cheap_vertices() {
            if !relevant[v] {
                assignment.set(v, Default::default());
            }
        }
    }
    RoundingOutcome {
        assignment,
        rounds_used: state.round,
        covered_per_round,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectivityAlgo {
    /// Cutting-plane relaxation, `H` sampling and iterative rounding.
    Randomized,
    Exact,
}

impl ConnectivityAlgo {
    pub fn name(self) -> &'static str {
        match self {
            ConnectivityAlgo::Randomized => "connectivity:logm2",
            ConnectivityAlgo::Exact => "connectivity:exact",
        }
    }
}

fn is_connecting(inst: &Instance, a: &Assignment) -> bool {
    verify::is_connecting(inst, a).is_ok_and(|v| v.connecting)
}

/// Full Connectivity pipeline with restarts and verification.
pub fn solve_connectivity(
    inst: &Instance,
    algo: ConnectivityAlgo,
    config: &SolveConfig,
) -> Result<SolveOutcome, SolveError> {
    let cc = &config.connectivity;
    let mut report = SolveReport::new(algo.name(), config);
    let finish = |mut report: SolveReport, a: Option<Assignment>| {
        if let Some(a) = &a {
            report.record(inst, a);
        }
        Ok(SolveOutcome { assignment: a, report })
    };

    if inst.groups().iter().all(|g| g.len() <= 1) {
        report.lp_bound = Some(0.0);
        return finish(report, Some(Assignment::empty(inst.n())));
    }
    report.lp_bound = Some(connectivity_lower_bound(inst, cc)?);

    if algo == ConnectivityAlgo::Exact {
        let sol = exact_connectivity(inst, &config.exact)?;
        return finish(report, Some(sol.assignment));
    }
    if inst.m() == 1 {
        let (u, v) = inst.edges()[0];
        let mut a = Assignment::empty(inst.n());
        let i = cheapest_common(inst, u, v).expect("edges share an interface");
        a.activate(u, i);
        a.activate(v, i);
        return finish(report, Some(a));
    }

    let guesses = preprocess::enumerate_guesses(inst, Problem::Connectivity);
    if guesses.is_empty() {
        return Err(SolveError::NoGuess);
    }
    let fracs = guesses
        .iter()
        .map(|s| solve_connectivity_lp(s, LpMode::Strengthened, cc))
        .collect::<Result<Vec<_>, _>>()?;
    let runs = preprocess::restart_count(preprocess::guess_range(inst), inst.m(), config.restarts);
    let mut best: Option<(crate::Rational, u32, Assignment, (usize, usize))> = None;
    let (mut total, mut feasible) = (0, 0);
    for trial in 0..config.trials.max(1) {
        let trial_seed = seed::derive_seed(config.seed, &[trial as u64]);
        let outcome = preprocess::run_with_restarts(&guesses, runs, trial_seed, |s, run_seed| {
            let g = guesses.iter().position(|h| h.b() == s.b()).unwrap();
            let h = sample_h(&fracs[g].y, cc.sample_factor, seed::derive_seed(run_seed, &[0]));
            let r = iterative_rounding(s, &fracs[g], &h, cc, seed::derive_seed(run_seed, &[1]));
            RunResult {
                feasible: is_connecting(inst, &r.assignment),
                assignment: r.assignment,
                extra: (r.rounds_used, h.len()),
            }
        });
        total += outcome.runs;
        feasible += outcome.feasible_runs;
        if let Some(run) = outcome.best {
            if best.as_ref().is_none_or(|(c, ..)| run.cost < *c) {
                best = Some((run.cost, run.b, run.assignment, run.extra));
            }
        }
    }
    report.runs = total;
    report.feasible_rate = Some(if total == 0 {
        0.0
    } else {
        feasible as f64 / total as f64
    });
    let a = best.map(|(_, b, a, (rounds, h_size))| {
        let g = guesses.iter().position(|h| h.b() == b).unwrap();
        report.set_guess(b, guesses[g].norm_factor());
        report.cuts_generated = Some(fracs[g].cuts.len());
        report.oracle_calls = Some(fracs[g].oracle_calls);
        report.rounds_used = Some(rounds);
        report.h_size = Some(h_size);
        a
    });
    finish(report, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn one() -> Rational {
        Rational::from_integer(1)
    }

    fn path_ac() -> Instance {
        Instance::new(
            vec![vec![(0, one())], vec![(0, one())], vec![(0, one())]],
            vec![(0, 1), (1, 2)],
            vec![vec![0, 2]],
        )
        .unwrap()
    }

    #[test]
    fn path_lp_uses_both_bridges() {
        let inst = path_ac();
        let s = ScaledInstance::identity(&inst);
        let frac = solve_connectivity_lp(&s, LpMode::Pure, &ConnectivityConfig::default()).unwrap();
        assert!((frac.objective - 1.0).abs() < 1e-7);
        assert!(frac.y.iter().all(|&y| (y - 1.0).abs() < 1e-7));
        assert!(!frac.cuts.is_empty());
    }

    #[test]
    fn oracle_on_zero_and_unit_capacities() {
        let inst = path_ac();
        let sep = separation_oracle(&inst, &[0.0, 0.0], 1e-6);
        let cut = sep.most_violated.unwrap();
        assert_eq!(cut.value, 0.0);
        assert!(cut.separates(0, 2));
        assert!(separation_oracle(&inst, &[1.0, 1.0], 1e-6).most_violated.is_none());
    }

    #[test]
    fn sampling_extremes() {
        let y = vec![1.0, 0.0, 1.0, 0.0];
        for seed in 0..20 {
            assert_eq!(sample_h(&y, 4.0, seed), vec![0, 2]);
        }
    }

    #[test]
    fn unit_x_covers_h_in_one_round() {
        let inst = path_ac();
        let s = ScaledInstance::identity(&inst);
        let frac = solve_connectivity_lp(&s, LpMode::Pure, &ConnectivityConfig::default()).unwrap();
        let r = iterative_rounding(&s, &frac, &[0, 1], &ConnectivityConfig::default(), 5);
        assert_eq!(r.rounds_used, 1);
        assert_eq!(r.covered_per_round, vec![2]);
    }

    #[test]
    fn round_count_matches_formula() {
        assert_eq!(round_count(2), 3);
        assert_eq!(round_count(25), 11);
    }

    #[test]
    fn path_pipeline_matches_exact() {
        let inst = path_ac();
        let cfg = SolveConfig::default();
        let r = solve_connectivity(&inst, ConnectivityAlgo::Randomized, &cfg).unwrap();
        let e = solve_connectivity(&inst, ConnectivityAlgo::Exact, &cfg).unwrap();
        assert!(r.report.feasible);
        assert_eq!(r.report.max_cost_exact, e.report.max_cost_exact);
        assert_eq!(r.report.max_cost_exact.as_deref(), Some("1"));
    }

    #[test]
    fn singleton_groups_need_nothing() {
        let inst = path_ac().with_groups(vec![vec![0], vec![2]]);
        let out = solve_connectivity(&inst, ConnectivityAlgo::Randomized, &SolveConfig::default()).unwrap();
        assert_eq!(out.report.max_cost_exact.as_deref(), Some("0"));
        assert!(out.assignment.unwrap().sets().iter().all(|s| s.is_empty()));
    }
}
