//! Batch runs that compare every algorithm against the exact optimum and the
//! LP bound.
//!
//! One CSV row per (instance, algorithm), in input order:
//!
//! | column | meaning |
//! |---|---|
//! | `instance` | file name or `gen-<i>` |
//! | `algo` | algorithm name |
//! | `lp_bound` | optimum of the plain relaxation, original units |
//! | `cost` | max-cost of the returned assignment |
//! | `exact_opt` | exact optimum, when the enumeration budget allows |
//! | `ratio_vs_exact` | `cost / exact_opt` |
//! | `ratio_vs_lp` | `cost / lp_bound` |
//! | `feasible_rate` | verified runs over all runs (1 or 0 for deterministic algorithms) |
//! | `wall_time` | seconds spent in the solver, parsing excluded |
//! | `error` | why the row has no cost |
//!
//! Missing values are empty fields.

use std::time::Instant;

use mina_core::exact::ExactConfig;
use mina_core::report::SolveConfig;
use mina_core::scalar::rational_to_f64;
use mina_core::Instance;
use rayon::prelude::*;
use serde::Serialize;

use crate::algo::Algo;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Row {
    pub instance: String,
    pub algo: String,
    pub lp_bound: Option<f64>,
    pub cost: Option<f64>,
    pub exact_opt: Option<f64>,
    pub ratio_vs_exact: Option<f64>,
    pub ratio_vs_lp: Option<f64>,
    pub feasible_rate: Option<f64>,
    pub wall_time: f64,
    pub error: Option<String>,
}

fn ratio(num: Option<f64>, den: Option<f64>) -> Option<f64> {
    match (num, den) {
        (Some(n), Some(d)) if d > 0.0 => Some(n / d),
        (Some(n), Some(d)) if n == 0.0 && d == 0.0 => Some(1.0),
        _ => None,
    }
}

fn exact_opt(inst: &Instance, algo: Algo, config: &ExactConfig) -> Option<f64> {
    let sol = algo.exact(inst, config).ok()?;
    Some(if sol.cost == 0.into() {
        0.0
    } else {
        rational_to_f64(&sol.cost)
    })
}

fn run_row(name: &str, inst: &Instance, algo: Algo, config: &SolveConfig) -> Row {
    let exact = exact_opt(inst, algo, &config.exact);
    let start = Instant::now();
    let result = algo.run(inst, config);
    let wall_time = start.elapsed().as_secs_f64();
    let mut row = Row {
        instance: name.to_string(),
        algo: algo.name().to_string(),
        lp_bound: None,
        cost: None,
        exact_opt: exact,
        ratio_vs_exact: None,
        ratio_vs_lp: None,
        feasible_rate: None,
        wall_time,
        error: None,
    };
    match result {
        Ok(out) => {
            row.lp_bound = out.report.lp_bound;
            row.cost = out.report.max_cost;
            row.feasible_rate = out
                .report
                .feasible_rate
                .or(Some(if out.report.feasible { 1.0 } else { 0.0 }));
            if out.assignment.is_none() {
                row.error = Some("no feasible assignment".into());
            }
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row.ratio_vs_exact = ratio(row.cost, row.exact_opt);
    row.ratio_vs_lp = ratio(row.cost, row.lp_bound);
    row
}

/// Runs every algorithm on every instance in a worker pool; rows come back
/// in input order.
pub fn run(instances: &[(String, Instance)], algos: &[Algo], config: &SolveConfig) -> Vec<Row> {
    let jobs: Vec<(&str, &Instance, Algo)> = instances
        .iter()
        .flat_map(|(name, inst)| algos.iter().map(move |&a| (name.as_str(), inst, a)))
        .collect();
    jobs.into_par_iter()
        .map(|(name, inst, algo)| run_row(name, inst, algo, config))
        .collect()
}

pub fn write_csv(rows: &[Row], out: impl std::io::Write) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
