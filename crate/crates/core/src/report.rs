//! Solver configuration, errors and the report emitted by every pipeline.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::connectivity::ConnectivityConfig;
use crate::exact::{ExactConfig, ExactError};
use crate::instance::format_cost;
use crate::lp::LpError;
use crate::preprocess::RestartConfig;
use crate::scalar::rational_to_f64;
use crate::{seed, verify, Assignment, Instance, Rational};

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub seed: u64,
    /// Independent restart-wrapped executions of a randomized pipeline.
    pub trials: usize,
    pub restarts: RestartConfig,
    pub exact: ExactConfig,
    /// Run the deterministic threshold rounding on every preprocessing guess
    /// instead of the unscaled relaxation.
    pub preprocess: bool,
    pub connectivity: ConnectivityConfig,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            seed: seed::DEFAULT_SEED,
            trials: 1,
            restarts: RestartConfig::default(),
            exact: ExactConfig::default(),
            preprocess: false,
            connectivity: ConnectivityConfig::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("no preprocessing guess admits a solution")]
    NoGuess,
    #[error("LP solver failed: {0}")]
    Lp(#[from] LpError),
    #[error("LP relaxation is infeasible")]
    LpInfeasible,
    #[error("a terminal group is split in the graph of coverable edges")]
    GroupsSplit,
    #[error("cutting-plane loop stopped after {iterations} iterations with {cuts} cuts and a violated cut of value {violation}")]
    CutLimit {
        iterations: usize,
        cuts: usize,
        violation: f64,
    },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Summary of one solve; serializes to the JSON report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub algo: String,
    pub feasible: bool,
    /// Preprocessing guess of the returned assignment.
    pub b: Option<u32>,
    /// `C_b` of that guess, exact.
    pub norm_factor: Option<String>,
    /// Optimum of the unscaled relaxation, a lower bound on OPT.
    pub lp_bound: Option<f64>,
    pub max_cost: Option<f64>,
    pub max_cost_exact: Option<String>,
    pub seed: u64,
    pub trials: usize,
    /// Randomized runs executed over all trials, guesses and restarts.
    pub runs: usize,
    /// Fraction of those runs whose output verified.
    pub feasible_rate: Option<f64>,
    pub per_vertex: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cuts_generated: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_calls: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rounds_used: Option<usize>,
    #[serde(rename = "H_size", skip_serializing_if = "Option::is_none")]
    pub h_size: Option<usize>,
    /// The assignment in the instance text format, one vertex per entry.
    pub assignment: Vec<String>,
}

impl SolveReport {
    pub fn new(algo: &str, config: &SolveConfig) -> Self {
        SolveReport {
            algo: algo.to_string(),
            feasible: false,
            b: None,
            norm_factor: None,
            lp_bound: None,
            max_cost: None,
            max_cost_exact: None,
            seed: config.seed,
            trials: config.trials,
            runs: 0,
            feasible_rate: None,
            per_vertex: Vec::new(),
            cuts_generated: None,
            oracle_calls: None,
            rounds_used: None,
            h_size: None,
            assignment: Vec::new(),
        }
    }

    /// Fills the cost fields from a verified assignment.
    pub fn record(&mut self, inst: &Instance, a: &Assignment) {
        let costs = verify::max_cost(inst, a).expect("assignment matches its instance");
        self.feasible = true;
        self.max_cost = Some(rational_to_f64(&costs.max));
        self.max_cost_exact = Some(format_cost(&costs.max));
        self.per_vertex = costs.per_vertex.iter().map(format_cost).collect();
        self.assignment = a.to_text(inst).lines().map(str::to_string).collect();
    }

    pub fn set_guess(&mut self, b: u32, norm_factor: Rational) {
        self.b = Some(b);
        self.norm_factor = Some(format_cost(&norm_factor));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Human-readable `key: value` lines.
    pub fn to_text(&self) -> String {
        fn opt<T: ToString>(v: &Option<T>) -> String {
            v.as_ref().map_or_else(|| "-".to_string(), T::to_string)
        }
        let mut out = String::new();
        let _ = writeln!(out, "algo: {}", self.algo);
        let _ = writeln!(out, "feasible: {}", self.feasible);
        let _ = writeln!(out, "max_cost: {}", opt(&self.max_cost_exact));
        let _ = writeln!(out, "lp_bound: {}", opt(&self.lp_bound));
        let _ = writeln!(out, "b: {}", opt(&self.b));
        let _ = writeln!(out, "norm_factor: {}", opt(&self.norm_factor));
        let _ = writeln!(out, "seed: {}", self.seed);
        let _ = writeln!(out, "trials: {}", self.trials);
        let _ = writeln!(out, "runs: {}", self.runs);
        let _ = writeln!(out, "feasible_rate: {}", opt(&self.feasible_rate));
        for (name, v) in [
            ("cuts_generated", self.cuts_generated),
            ("oracle_calls", self.oracle_calls),
            ("rounds_used", self.rounds_used),
            ("H_size", self.h_size),
        ] {
            if let Some(v) = v {
                let _ = writeln!(out, "{name}: {v}");
            }
        }
        for line in &self.assignment {
            let _ = writeln!(out, "{line}");
        }
        out
    }
}

/// A solver's answer: the best verified assignment, if any, and its report.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub assignment: Option<Assignment>,
    pub report: SolveReport,
}
