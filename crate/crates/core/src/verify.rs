//! Ground-truth feasibility and cost auditing of assignments.

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::dsu::Dsu;
use crate::{Assignment, Instance, Rational};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("assignment has {got} vertices, instance has {want}")]
    Size { want: usize, got: usize },
    #[error("interface {interface} is not available at vertex {vertex}")]
    Unavailable { vertex: usize, interface: usize },
}

fn check(inst: &Instance, a: &Assignment) -> Result<(), VerifyError> {
    if a.n() != inst.n() {
        return Err(VerifyError::Size {
            want: inst.n(),
            got: a.n(),
        });
    }
    for v in 0..inst.n() {
        let extra = a.active(v).bits() & !inst.available_set(v).bits();
        if extra != 0 {
            return Err(VerifyError::Unavailable {
                vertex: v,
                interface: extra.trailing_zeros() as usize,
            });
        }
    }
    Ok(())
}

/// Indices of edges whose endpoints share an active interface.
pub fn covered_edges(inst: &Instance, a: &Assignment) -> Result<Vec<usize>, VerifyError> {
    check(inst, a)?;
    Ok(inst
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, &(u, v))| a.active(u).intersects(a.active(v)))
        .map(|(e, _)| e)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoveringVerdict {
    pub covering: bool,
    /// Edge indices left uncovered.
    pub uncovered: Vec<usize>,
}

pub fn is_covering(inst: &Instance, a: &Assignment) -> Result<CoveringVerdict, VerifyError> {
    check(inst, a)?;
    let uncovered: Vec<usize> = inst
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, &(u, v))| !a.active(u).intersects(a.active(v)))
        .map(|(e, _)| e)
        .collect();
    Ok(CoveringVerdict {
        covering: uncovered.is_empty(),
        uncovered,
    })
}

/// A terminal group spread over several components of the covered graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitGroup {
    pub group: usize,
    /// The group's terminals partitioned by component, in order of first
    /// terminal.
    pub parts: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConnectingVerdict {
    pub connecting: bool,
    pub split: Vec<SplitGroup>,
}

/// Checks that each terminal group lies in one component of `G_A`.
pub fn is_connecting(inst: &Instance, a: &Assignment) -> Result<ConnectingVerdict, VerifyError> {
    let covered = covered_edges(inst, a)?;
    let mut dsu = Dsu::new(inst.n());
    for e in covered {
        let (u, v) = inst.edges()[e];
        dsu.union(u, v);
    }
    let mut split = Vec::new();
    for (r, group) in inst.groups().iter().enumerate() {
        let mut parts: Vec<(usize, Vec<usize>)> = Vec::new();
        for &t in group {
            let root = dsu.find(t);
            match parts.iter_mut().find(|(r, _)| *r == root) {
                Some((_, members)) => members.push(t),
                None => parts.push((root, vec![t])),
            }
        }
        if parts.len() > 1 {
            split.push(SplitGroup {
                group: r,
                parts: parts.into_iter().map(|(_, m)| m).collect(),
            });
        }
    }
    Ok(ConnectingVerdict {
        connecting: split.is_empty(),
        split,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostBreakdown {
    pub max: Rational,
    pub per_vertex: Vec<Rational>,
}

/// Exact per-vertex activation cost and its maximum.
pub fn max_cost(inst: &Instance, a: &Assignment) -> Result<CostBreakdown, VerifyError> {
    check(inst, a)?;
    let per_vertex: Vec<Rational> = (0..inst.n())
        .map(|v| {
            inst.interfaces(v)
                .iter()
                .filter(|(i, _)| a.active(v).contains(*i))
                .map(|&(_, c)| c)
                .sum()
        })
        .collect();
    let max = per_vertex.iter().copied().max().unwrap_or_else(Rational::zero);
    Ok(CostBreakdown { max, per_vertex })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i128, d: i128) -> Rational {
        Rational::new(p, d)
    }

    fn path3() -> Instance {
        Instance::new(
            vec![
                vec![(0, q(1, 1))],
                vec![(0, q(1, 1)), (1, q(1, 2))],
                vec![(1, q(1, 4))],
            ],
            vec![(0, 1), (1, 2)],
            vec![vec![0, 2]],
        )
        .unwrap()
    }

    #[test]
    fn empty_assignment_covers_nothing_and_costs_zero() {
        let inst = path3();
        let a = Assignment::empty(3);
        assert!(covered_edges(&inst, &a).unwrap().is_empty());
        assert_eq!(max_cost(&inst, &a).unwrap().max, Rational::zero());
        let verdict = is_connecting(&inst, &a).unwrap();
        assert!(!verdict.connecting);
        assert_eq!(verdict.split[0].parts, vec![vec![0], vec![2]]);
    }

    #[test]
    fn full_assignment_covers_everything() {
        let inst = path3();
        let a = Assignment::full(&inst);
        assert_eq!(covered_edges(&inst, &a).unwrap(), vec![0, 1]);
        assert!(is_covering(&inst, &a).unwrap().covering);
        assert!(is_connecting(&inst, &a).unwrap().connecting);
    }

    #[test]
    fn vertex_cost_sums_active_interfaces() {
        let inst = Instance::new(
            vec![vec![(0, q(1, 2)), (1, q(1, 4))], vec![(0, q(1, 1))]],
            vec![(0, 1)],
            vec![],
        )
        .unwrap();
        let mut a = Assignment::empty(2);
        a.activate(0, 0);
        a.activate(0, 1);
        let c = max_cost(&inst, &a).unwrap();
        assert_eq!(c.per_vertex, vec![q(3, 4), q(0, 1)]);
        assert_eq!(c.max, q(3, 4));
    }

    #[test]
    fn singleton_groups_are_connected_by_nothing() {
        let inst = path3().with_groups(vec![vec![0], vec![2]]);
        assert!(is_connecting(&inst, &Assignment::empty(3)).unwrap().connecting);
    }

    #[test]
    fn unavailable_interface_is_an_error() {
        let inst = path3();
        let mut a = Assignment::empty(3);
        a.activate(0, 1);
        assert_eq!(
            covered_edges(&inst, &a),
            Err(VerifyError::Unavailable { vertex: 0, interface: 1 })
        );
        assert!(max_cost(&inst, &Assignment::empty(2)).is_err());
    }

    #[test]
    fn uncovered_edges_are_listed() {
        let inst = path3();
        let mut a = Assignment::empty(3);
        a.activate(0, 0);
        a.activate(1, 0);
        let v = is_covering(&inst, &a).unwrap();
        assert!(!v.covering);
        assert_eq!(v.uncovered, vec![1]);
    }
}
