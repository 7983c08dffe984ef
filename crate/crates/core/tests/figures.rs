//! The two ten-vertex example networks, with unit costs.

use mina_core::coverage::{solve_coverage, CoverageAlgo};
use mina_core::exact::{exact_connectivity, exact_coverage, ExactConfig, ExactMode};
use mina_core::instance::{parse_assignment, parse_instance};
use mina_core::report::SolveConfig;
use mina_core::{verify, Instance, Rational};

const FIG1: &str = include_str!("data/fig1.txt");
const FIG2: &str = include_str!("data/fig2.txt");
const FIG1_ACTIVE: &str = include_str!("data/fig1_assignment.txt");
const FIG2_ACTIVE: &str = include_str!("data/fig2_assignment.txt");

const BNB: ExactConfig = ExactConfig {
    budget: 24,
    mode: ExactMode::BranchAndBound,
};

fn edge_ids(inst: &Instance, pairs: &[(&str, &str)]) -> Vec<usize> {
    let mut ids: Vec<usize> = pairs
        .iter()
        .map(|&(a, b)| {
            let (a, b) = (inst.vertex_index(a).unwrap(), inst.vertex_index(b).unwrap());
            inst.edges()
                .iter()
                .position(|&(u, v)| (u, v) == (a, b) || (u, v) == (b, a))
                .unwrap()
        })
        .collect();
    ids.sort();
    ids
}

#[test]
fn coverage_figure_parses() {
    let inst = parse_instance(FIG1).unwrap();
    assert_eq!((inst.n(), inst.m(), inst.k()), (10, 18, 4));
    assert!(inst.groups().is_empty());
    assert_eq!(parse_instance(&inst.to_text()).unwrap(), inst);
}

#[test]
fn coverage_figure_assignment_covers_every_edge() {
    let inst = parse_instance(FIG1).unwrap();
    let a = parse_assignment(&inst, FIG1_ACTIVE).unwrap();
    let covered = verify::covered_edges(&inst, &a).unwrap();
    assert_eq!(covered, (0..18).collect::<Vec<_>>());
    assert!(verify::is_covering(&inst, &a).unwrap().covering);
    assert_eq!(verify::max_cost(&inst, &a).unwrap().max, Rational::from_integer(3));
}

#[test]
fn connectivity_figure_assignment_covers_the_bold_edges() {
    let inst = parse_instance(FIG2).unwrap();
    assert_eq!(inst.groups().len(), 2);
    let a = parse_assignment(&inst, FIG2_ACTIVE).unwrap();
    let verdict = verify::is_connecting(&inst, &a).unwrap();
    assert!(verdict.connecting, "{:?}", verdict.split);
    let bold = [
        ("v1", "v10"),
        ("v10", "v4"),
        ("v4", "v5"),
        ("v10", "v8"),
        ("v3", "v7"),
        // v3 and v4 both activate interface 4, so this edge is covered too.
        ("v3", "v4"),
    ];
    assert_eq!(verify::covered_edges(&inst, &a).unwrap(), edge_ids(&inst, &bold));
    assert!(!verify::is_covering(&inst, &a).unwrap().covering);
}

#[test]
fn figure_optima() {
    let fig1 = parse_instance(FIG1).unwrap();
    let fig2 = parse_instance(FIG2).unwrap();
    let cov = exact_coverage(&fig1, &BNB).unwrap();
    assert!(verify::is_covering(&fig1, &cov.assignment).unwrap().covering);
    assert_eq!(cov.cost, Rational::from_integer(2));
    let conn = exact_connectivity(&fig2, &BNB).unwrap();
    assert!(verify::is_connecting(&fig2, &conn.assignment).unwrap().connecting);
    assert_eq!(conn.cost, Rational::from_integer(2));
}

#[test]
fn randomized_rounding_covers_the_figure() {
    let inst = parse_instance(FIG1).unwrap();
    let mut covering = 0;
    for seed in 0..100 {
        let cfg = SolveConfig {
            seed,
            ..SolveConfig::default()
        };
        let out = solve_coverage(&inst, CoverageAlgo::Randomized, &cfg).unwrap();
        if let Some(a) = out.assignment {
            if verify::is_covering(&inst, &a).unwrap().covering {
                covering += 1;
            }
        }
    }
    assert!(covering >= 90, "{covering}/100 covering");
}
