//! The Coverage relaxation and its two roundings.
//!
//! Variables: `M`, one `x[i,v] ∈ [0,1]` per kept interface of each vertex and
//! one `z[i,e] ∈ [0,1]` per edge and kept common interface.
//!
//! ```text
//! minimize M
//!   Σ_i c(i,v)·x[i,v] ≤ M          every vertex
//!   Σ_i z[i,uv] ≥ 1                 every edge
//!   z[i,uv] ≤ x[i,u],  z[i,uv] ≤ x[i,v]
//!   x[i,v] = 1                      cheap v      (strengthened mode)
//!   Σ_i c(i,v)·x[i,v] ≥ 1           expensive v  (strengthened mode)
//! ```
//!
//! Cheap vertices have no `x` columns; their unit values are substituted.

use num_traits::Zero;
use rand::distributions::Open01;
use rand::Rng;

use crate::exact::exact_coverage;
use crate::lp::{Sense, SimplexConfig, SimplexSolver, Status};
use crate::preprocess::{self, Problem, RunResult, ScaledInstance};
use crate::report::{SolveConfig, SolveError, SolveOutcome, SolveReport};
use crate::{seed, verify, Assignment, Instance, InterfaceSet, LinearProgram, LpSolution};

/// Slack on LP-side threshold comparisons.
pub const EPS_FEAS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpMode {
    /// Cheap vertices fixed to all-active, expensive ones cost at least 1.
    Strengthened,
    /// Plain relaxation: every vertex has free `x` columns, no cost floor.
    Pure,
}

/// Columns shared by the Coverage and Connectivity relaxations.
#[derive(Debug, Clone)]
pub struct ActivationLp {
    pub lp: LinearProgram,
    pub mode: LpMode,
    pub m_var: usize,
    /// `(interface, column)` per vertex; empty for substituted cheap vertices.
    pub x_vars: Vec<Vec<(usize, usize)>>,
    /// `(interface, column)` per edge.
    pub z_vars: Vec<Vec<(usize, usize)>>,
}

impl ActivationLp {
    fn substituted(&self, s: &ScaledInstance<'_>, v: usize) -> bool {
        self.mode == LpMode::Strengthened && s.is_cheap(v)
    }

    fn x_var(&self, v: usize, i: usize) -> Option<usize> {
        self.x_vars[v].iter().find(|&&(j, _)| j == i).map(|&(_, c)| c)
    }

    /// Builds `M`, `x`, `z`, the cost rows and the `z ≤ x` links. Edge rows
    /// are left to the caller.
    pub(crate) fn build(s: &ScaledInstance<'_>, mode: LpMode) -> Self {
        let inst = s.base();
        let mut lp = LinearProgram::new();
        let totals: Vec<f64> = (0..inst.n())
            .map(|v| s.scaled_interfaces_f64(v).iter().map(|&(_, c)| c).sum())
            .collect();
        let m_hi = totals.iter().copied().fold(0.0, f64::max);
        let m_var = lp.add_var(0.0, m_hi);
        lp.set_objective(m_var, 1.0);
        let mut this = ActivationLp {
            lp,
            mode,
            m_var,
            x_vars: vec![Vec::new(); inst.n()],
            z_vars: vec![Vec::new(); inst.m()],
        };
        for v in 0..inst.n() {
            if this.substituted(s, v) {
                this.lp
                    .add_constraint(vec![(m_var, 1.0)], Sense::Ge, totals[v]);
                continue;
            }
            let mut row = Vec::new();
            for &(i, c) in s.scaled_interfaces_f64(v) {
                let col = this.lp.add_var(0.0, 1.0);
                this.x_vars[v].push((i, col));
                row.push((col, c));
            }
            if mode == LpMode::Strengthened {
                this.lp.add_constraint(row.clone(), Sense::Ge, 1.0);
            }
            row.push((m_var, -1.0));
            this.lp.add_constraint(row, Sense::Le, 0.0);
        }
        for (e, &(u, v)) in inst.edges().iter().enumerate() {
            for i in s.kept_common(u, v).iter() {
                let z = this.lp.add_var(0.0, 1.0);
                this.z_vars[e].push((i, z));
                for w in [u, v] {
                    if let Some(x) = this.x_var(w, i) {
                        this.lp.add_constraint(vec![(z, 1.0), (x, -1.0)], Sense::Le, 0.0);
                    }
                }
            }
        }
        this
    }

    /// Reads `x` back, substituting 1 for cheap vertices.
    pub(crate) fn extract_x(&self, s: &ScaledInstance<'_>, values: &[f64]) -> Vec<Vec<(usize, f64)>> {
        (0..s.base().n())
            .map(|v| {
                if self.substituted(s, v) {
                    s.kept(v).iter().map(|i| (i, 1.0)).collect()
                } else {
                    self.x_vars[v].iter().map(|&(i, c)| (i, values[c])).collect()
                }
            })
            .collect()
    }

    pub(crate) fn extract_z(&self, values: &[f64]) -> Vec<Vec<(usize, f64)>> {
        self.z_vars
            .iter()
            .map(|zs| zs.iter().map(|&(i, c)| (i, values[c])).collect())
            .collect()
    }
}

pub fn build_coverage_lp(s: &ScaledInstance<'_>, mode: LpMode) -> ActivationLp {
    let mut base = ActivationLp::build(s, mode);
    for zs in &base.z_vars {
        let row: Vec<(usize, f64)> = zs.iter().map(|&(_, z)| (z, 1.0)).collect();
        base.lp.add_constraint(row, Sense::Ge, 1.0);
    }
    base
}

/// An optimal fractional solution of the Coverage relaxation.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageFractional {
    pub mode: LpMode,
    /// `(interface, value)` per vertex over kept interfaces.
    pub x: Vec<Vec<(usize, f64)>>,
    /// `(interface, value)` per edge over kept common interfaces.
    pub z: Vec<Vec<(usize, f64)>>,
    pub objective: f64,
}

impl CoverageFractional {
    pub fn x(&self, v: usize, interface: usize) -> f64 {
        self.x[v]
            .iter()
            .find(|&&(i, _)| i == interface)
            .map_or(0.0, |&(_, x)| x)
    }
}

pub(crate) fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, SolveError> {
    let sol = SimplexSolver::new(lp.clone(), SimplexConfig::default())?.solve()?;
    match sol.status {
        Status::Optimal => Ok(sol),
        _ => Err(SolveError::LpInfeasible),
    }
}

pub fn solve_coverage_lp(s: &ScaledInstance<'_>, mode: LpMode) -> Result<CoverageFractional, SolveError> {
    let built = build_coverage_lp(s, mode);
    let sol = solve_lp(&built.lp)?;
    Ok(CoverageFractional {
        mode,
        x: built.extract_x(s, &sol.values),
        z: built.extract_z(&sol.values),
        objective: sol.objective,
    })
}

/// Optimum of the unscaled plain relaxation: a lower bound on OPT in
/// original cost units.
pub fn coverage_lower_bound(inst: &Instance) -> Result<f64, SolveError> {
    Ok(solve_coverage_lp(&ScaledInstance::identity(inst), LpMode::Pure)?.objective)
}

fn all_kept_if_cheap(s: &ScaledInstance<'_>, frac_mode: LpMode, v: usize) -> Option<InterfaceSet> {
    (frac_mode == LpMode::Strengthened && s.is_cheap(v)).then(|| s.kept(v))
}

/// Activates `i` at `v` when `x[i,v] ≥ 1/k`, `k` the number of interfaces of
/// the instance.
pub fn round_k_threshold(s: &ScaledInstance<'_>, frac: &CoverageFractional) -> Assignment {
    let k = s.base().k().max(1) as f64;
    let mut a = Assignment::empty(s.base().n());
    for v in 0..s.base().n() {
        let set = all_kept_if_cheap(s, frac.mode, v).unwrap_or_else(|| {
            frac.x[v]
                .iter()
                .filter(|&&(_, x)| x >= 1.0 / k - EPS_FEAS)
                .map(|&(i, _)| i)
                .collect()
        });
        a.set(v, set);
    }
    a
}

/// One uniform threshold in `(0, 1)` per interface index.
pub fn draw_thresholds(count: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..count).map(|_| rng.sample(Open01)).collect()
}

/// Activates `i` at `v` when `scale·x[i,v] ≥ t_i`; cheap vertices take every
/// kept interface.
pub fn round_with_thresholds(
    s: &ScaledInstance<'_>,
    frac_mode: LpMode,
    x: &[Vec<(usize, f64)>],
    scale: f64,
    thresholds: &[f64],
) -> Assignment {
    let mut a = Assignment::empty(s.base().n());
    for v in 0..s.base().n() {
        let set = all_kept_if_cheap(s, frac_mode, v).unwrap_or_else(|| {
            x[v].iter()
                .filter(|&&(i, x)| scale * x >= thresholds[i])
                .map(|&(i, _)| i)
                .collect()
        });
        a.set(v, set);
    }
    a
}

/// Random threshold rounding with scale `2 ln m`.
pub fn round_randomized_coverage(
    s: &ScaledInstance<'_>,
    frac: &CoverageFractional,
    seed: u64,
) -> Assignment {
    let scale = 2.0 * (s.base().m() as f64).ln();
    let mut rng = seed::rng(seed);
    let t = draw_thresholds(s.base().interface_count(), &mut rng);
    round_with_thresholds(s, frac.mode, &frac.x, scale, &t)
}

/// The common interface of edge `(u, v)` whose larger endpoint cost is least.
pub(crate) fn cheapest_common(inst: &Instance, u: usize, v: usize) -> Option<usize> {
    inst.common(u, v).iter().min_by_key(|&i| {
        let cu = inst.cost(i, u).unwrap();
        let cv = inst.cost(i, v).unwrap();
        cu.max(cv)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverageAlgo {
    /// Deterministic `1/k` threshold rounding.
    KThreshold,
    /// Random thresholds scaled by `2 ln m`, restart-wrapped.
    Randomized,
    /// Exhaustive search.
    Exact,
}

impl CoverageAlgo {
    pub fn name(self) -> &'static str {
        match self {
            CoverageAlgo::KThreshold => "coverage:k",
            CoverageAlgo::Randomized => "coverage:logm",
            CoverageAlgo::Exact => "coverage:exact",
        }
    }
}

fn is_covering(inst: &Instance, a: &Assignment) -> bool {
    verify::is_covering(inst, a).is_ok_and(|v| v.covering)
}

/// Full Coverage pipeline: preprocessing, relaxation, rounding and
/// verification.
pub fn solve_coverage(
    inst: &Instance,
    algo: CoverageAlgo,
    config: &SolveConfig,
) -> Result<SolveOutcome, SolveError> {
    let mut report = SolveReport::new(algo.name(), config);
    report.lp_bound = Some(coverage_lower_bound(inst)?);
    let finish = |mut report: SolveReport, a: Option<Assignment>| {
        if let Some(a) = &a {
            report.record(inst, a);
        }
        Ok(SolveOutcome { assignment: a, report })
    };

    if inst.m() <= 1 {
        let mut a = Assignment::empty(inst.n());
        if let Some(&(u, v)) = inst.edges().first() {
            let i = cheapest_common(inst, u, v).expect("edges share an interface");
            a.activate(u, i);
            a.activate(v, i);
        }
        return finish(report, Some(a));
    }

    match algo {
        CoverageAlgo::Exact => {
            let sol = exact_coverage(inst, &config.exact)?;
            finish(report, Some(sol.assignment))
        }
        CoverageAlgo::KThreshold if !config.preprocess => {
            let s = ScaledInstance::identity(inst);
            let frac = solve_coverage_lp(&s, LpMode::Pure)?;
            let a = round_k_threshold(&s, &frac);
            let ok = is_covering(inst, &a);
            finish(report, ok.then_some(a))
        }
        CoverageAlgo::KThreshold => {
            let guesses = preprocess::enumerate_guesses(inst, Problem::Coverage);
            if guesses.is_empty() {
                return Err(SolveError::NoGuess);
            }
            let fracs = guesses
                .iter()
                .map(|s| solve_coverage_lp(s, LpMode::Strengthened))
                .collect::<Result<Vec<_>, _>>()?;
            let outcome = preprocess::run_with_restarts(&guesses, 1, config.seed, |s, _| {
                let g = guesses.iter().position(|h| h.b() == s.b()).unwrap();
                let a = round_k_threshold(s, &fracs[g]);
                RunResult {
                    feasible: is_covering(inst, &a),
                    assignment: a,
                    extra: (),
                }
            });
            let a = outcome.best.map(|best| {
                let g = guesses.iter().position(|h| h.b() == best.b).unwrap();
                report.set_guess(best.b, guesses[g].norm_factor());
                best.assignment
            });
            finish(report, a)
        }
        CoverageAlgo::Randomized => {
            let guesses = preprocess::enumerate_guesses(inst, Problem::Coverage);
            if guesses.is_empty() {
                return Err(SolveError::NoGuess);
            }
            let fracs = guesses
                .iter()
                .map(|s| solve_coverage_lp(s, LpMode::Strengthened))
                .collect::<Result<Vec<_>, _>>()?;
            let runs =
                preprocess::restart_count(preprocess::guess_range(inst), inst.m(), config.restarts);
            let mut best: Option<(crate::Rational, u32, Assignment)> = None;
            let (mut total, mut feasible) = (0, 0);
            for trial in 0..config.trials.max(1) {
                let trial_seed = seed::derive_seed(config.seed, &[trial as u64]);
                let outcome = preprocess::run_with_restarts(&guesses, runs, trial_seed, |s, run_seed| {
                    let g = guesses.iter().position(|h| h.b() == s.b()).unwrap();
                    let a = round_randomized_coverage(s, &fracs[g], run_seed);
                    RunResult {
                        feasible: is_covering(inst, &a),
                        assignment: a,
                        extra: (),
                    }
                });
                total += outcome.runs;
                feasible += outcome.feasible_runs;
                if let Some(run) = outcome.best {
                    if best.as_ref().is_none_or(|(c, _, _)| run.cost < *c) {
                        best = Some((run.cost, run.b, run.assignment));
                    }
                }
            }
            report.runs = total;
            report.feasible_rate = Some(if total == 0 {
                0.0
            } else {
                feasible as f64 / total as f64
            });
            let a = best.map(|(_, b, a)| {
                let g = guesses.iter().position(|h| h.b() == b).unwrap();
                report.set_guess(b, guesses[g].norm_factor());
                a
            });
            finish(report, a)
        }
    }
}

/// Scaled max-cost of `a` as a float, for bound checks.
pub fn scaled_cost_f64(s: &ScaledInstance<'_>, a: &Assignment) -> f64 {
    let c = s.scaled_max_cost(a);
    if c.is_zero() {
        0.0
    } else {
        crate::scalar::rational_to_f64(&c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(p: i128, d: i128) -> Rational {
        Rational::new(p, d)
    }

    fn unit_triangle() -> Instance {
        let one = q(1, 1);
        Instance::new(
            vec![vec![(0, one)], vec![(0, one)], vec![(0, one)]],
            vec![(0, 1), (1, 2), (0, 2)],
            vec![],
        )
        .unwrap()
    }

    /// Center 0 holds interfaces 0..k, leaf j holds only j-1; unit costs.
    fn star(k: usize) -> Instance {
        let one = q(1, 1);
        let mut avail = vec![(0..k).map(|i| (i, one)).collect::<Vec<_>>()];
        avail.extend((0..k).map(|i| vec![(i, one)]));
        let edges = (1..=k).map(|j| (0, j)).collect();
        Instance::new(avail, edges, vec![]).unwrap()
    }

    #[test]
    fn single_edge_lp_activates_the_shared_interface() {
        let inst = Instance::new(vec![vec![(0, q(1, 1))], vec![(0, q(1, 1))]], vec![(0, 1)], vec![])
            .unwrap();
        let s = ScaledInstance::identity(&inst);
        let frac = solve_coverage_lp(&s, LpMode::Pure).unwrap();
        assert!((frac.objective - 1.0).abs() < 1e-9);
        assert!((frac.x(0, 0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn star_forces_every_interface_at_the_center() {
        let inst = star(4);
        let frac = solve_coverage_lp(&ScaledInstance::identity(&inst), LpMode::Pure).unwrap();
        assert!((frac.objective - 4.0).abs() < 1e-7);
        for i in 0..4 {
            assert!((frac.x(0, i) - 1.0).abs() < 1e-7);
        }
    }

    #[test]
    fn cheap_vertices_have_no_columns() {
        let inst = Instance::new(
            vec![vec![(0, q(1, 4))], vec![(0, q(1, 1)), (1, q(1, 1))], vec![(1, q(1, 1))]],
            vec![(0, 1), (1, 2)],
            vec![],
        )
        .unwrap();
        let s = ScaledInstance::new(&inst, 0);
        assert!(s.is_cheap(0));
        assert!(!s.is_cheap(1));
        let built = build_coverage_lp(&s, LpMode::Strengthened);
        assert!(built.x_vars[0].is_empty());
        assert_eq!(built.x_vars[1].len(), 2);
        let frac = solve_coverage_lp(&s, LpMode::Strengthened).unwrap();
        assert_eq!(frac.x(0, 0), 1.0);
    }

    #[test]
    fn half_values_pass_the_k_threshold() {
        let inst = Instance::new(
            vec![vec![(0, q(1, 1)), (1, q(1, 1))], vec![(0, q(1, 1)), (1, q(1, 1))]],
            vec![(0, 1)],
            vec![],
        )
        .unwrap();
        let s = ScaledInstance::identity(&inst);
        let frac = CoverageFractional {
            mode: LpMode::Pure,
            x: vec![vec![(0, 0.5), (1, 0.5)], vec![(0, 0.5), (1, 0.5)]],
            z: vec![vec![(0, 0.5), (1, 0.5)]],
            objective: 1.0,
        };
        let a = round_k_threshold(&s, &frac);
        assert_eq!(a.active(0), InterfaceSet::from_bits(0b11));
        assert_eq!(a.active(1), InterfaceSet::from_bits(0b11));
    }

    #[test]
    fn zero_is_never_and_one_is_always_activated() {
        let inst = star(3);
        let s = ScaledInstance::identity(&inst);
        let mut x: Vec<Vec<(usize, f64)>> = (0..inst.n())
            .map(|v| inst.interfaces(v).iter().map(|&(i, _)| (i, 0.0)).collect())
            .collect();
        x[0][1].1 = 1.0;
        for seed in 0..50 {
            let t = draw_thresholds(3, &mut seed::rng(seed));
            let a = round_with_thresholds(&s, LpMode::Pure, &x, 2.0 * 3f64.ln(), &t);
            assert_eq!(a.active(0), InterfaceSet::singleton(1));
            assert!(a.active(1).is_empty());
        }
    }

    #[test]
    fn unit_triangle_costs_one_for_every_algorithm() {
        let inst = unit_triangle();
        let cfg = SolveConfig::default();
        for algo in [CoverageAlgo::KThreshold, CoverageAlgo::Randomized, CoverageAlgo::Exact] {
            let out = solve_coverage(&inst, algo, &cfg).unwrap();
            assert!(out.report.feasible, "{algo:?}");
            assert_eq!(out.report.max_cost_exact.as_deref(), Some("1"), "{algo:?}");
        }
    }

    #[test]
    fn single_edge_uses_the_cheapest_common_interface() {
        let inst = Instance::new(
            vec![vec![(0, q(2, 1)), (1, q(5, 1))], vec![(0, q(3, 1)), (1, q(1, 1))]],
            vec![(0, 1)],
            vec![],
        )
        .unwrap();
        let out = solve_coverage(&inst, CoverageAlgo::Randomized, &SolveConfig::default()).unwrap();
        assert_eq!(out.report.max_cost_exact.as_deref(), Some("3"));
    }

    #[test]
    fn preprocessed_threshold_rounding_covers() {
        let inst = star(3);
        let cfg = SolveConfig {
            preprocess: true,
            ..SolveConfig::default()
        };
        let out = solve_coverage(&inst, CoverageAlgo::KThreshold, &cfg).unwrap();
        assert!(out.report.feasible);
        assert_eq!(out.report.b, Some(0));
    }
}
