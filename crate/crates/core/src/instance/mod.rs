//! Problem data: graph, available interfaces, activation costs and terminal
//! groups, plus the assignment type the solvers produce.

mod format;
mod generate;

use std::fmt;

use num_traits::Zero;

use crate::dsu::Dsu;
use crate::Rational;

pub use format::{format_cost, parse_assignment, parse_cost, parse_instance, ParseError};
pub use generate::{generate_random, GenError, GenParams};

/// Largest number of distinct interfaces an instance may use.
pub const MAX_INTERFACES: usize = 64;

/// A set of interface indices, stored as a bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InterfaceSet(u64);

impl InterfaceSet {
    pub const EMPTY: InterfaceSet = InterfaceSet(0);

    pub fn from_bits(bits: u64) -> Self {
        InterfaceSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn singleton(i: usize) -> Self {
        debug_assert!(i < MAX_INTERFACES);
        InterfaceSet(1 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_INTERFACES && self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1 << i);
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn intersects(self, other: InterfaceSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn intersection(self, other: InterfaceSet) -> InterfaceSet {
        InterfaceSet(self.0 & other.0)
    }

    pub fn union(self, other: InterfaceSet) -> InterfaceSet {
        InterfaceSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: InterfaceSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Ascending interface indices.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        })
    }
}

impl FromIterator<usize> for InterfaceSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut s = InterfaceSet::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl fmt::Debug for InterfaceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// One broken instance invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NoVertices,
    TooManyInterfaces(usize),
    VertexOutOfRange { vertex: usize },
    InterfaceOutOfRange { vertex: usize, interface: usize },
    DuplicateInterface { vertex: usize, interface: usize },
    NegativeCost { vertex: usize, interface: usize },
    SelfLoop { vertex: usize },
    DuplicateEdge { u: usize, v: usize },
    NotConnected,
    EdgeLacksCommonInterface { u: usize, v: usize },
    EmptyGroup { group: usize },
    GroupsNotDisjoint { vertex: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoVertices => write!(f, "instance has no vertices"),
            Violation::TooManyInterfaces(k) => {
                write!(f, "{k} interfaces exceed the supported maximum of {MAX_INTERFACES}")
            }
            Violation::VertexOutOfRange { vertex } => write!(f, "vertex {vertex} out of range"),
            Violation::InterfaceOutOfRange { vertex, interface } => {
                write!(f, "interface {interface} at vertex {vertex} out of range")
            }
            Violation::DuplicateInterface { vertex, interface } => {
                write!(f, "interface {interface} listed twice at vertex {vertex}")
            }
            Violation::NegativeCost { vertex, interface } => {
                write!(f, "negative cost for interface {interface} at vertex {vertex}")
            }
            Violation::SelfLoop { vertex } => write!(f, "self-loop at vertex {vertex}"),
            Violation::DuplicateEdge { u, v } => write!(f, "duplicate edge {u} {v}"),
            Violation::NotConnected => write!(f, "graph not connected"),
            Violation::EdgeLacksCommonInterface { u, v } => {
                write!(f, "edge lacks common interface: {u} {v}")
            }
            Violation::EmptyGroup { group } => write!(f, "group {group} is empty"),
            Violation::GroupsNotDisjoint { vertex } => {
                write!(f, "groups not disjoint: vertex {vertex} in more than one group")
            }
        }
    }
}

/// A multi-interface network.
///
/// Vertices and interfaces are dense indices; the original file labels are
/// kept for serialization. `available[v]` lists `(interface, cost)` pairs in
/// ascending interface order. An interface absent from that list is
/// unavailable at `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    vertex_labels: Vec<String>,
    interface_labels: Vec<String>,
    edges: Vec<(usize, usize)>,
    available: Vec<Vec<(usize, Rational)>>,
    sets: Vec<InterfaceSet>,
    groups: Vec<Vec<usize>>,
}

impl Instance {
    /// Builds and validates an instance with default labels (`0..n` for
    /// vertices, `1..=k` for interfaces).
    pub fn new(
        available: Vec<Vec<(usize, Rational)>>,
        edges: Vec<(usize, usize)>,
        groups: Vec<Vec<usize>>,
    ) -> Result<Self, Vec<Violation>> {
        let inst = Self::new_unchecked(available, edges, groups);
        let violations = inst.validate();
        if violations.is_empty() {
            Ok(inst)
        } else {
            Err(violations)
        }
    }

    /// Builds an instance without checking invariants. Interface indices are
    /// compacted to the ones actually used (labels keep the caller's
    /// numbering, 1-based); interfaces and group members are sorted.
    pub fn new_unchecked(
        mut available: Vec<Vec<(usize, Rational)>>,
        edges: Vec<(usize, usize)>,
        mut groups: Vec<Vec<usize>>,
    ) -> Self {
        let mut used: Vec<usize> = available.iter().flatten().map(|&(i, _)| i).collect();
        used.sort_unstable();
        used.dedup();
        for list in &mut available {
            for entry in list.iter_mut() {
                entry.0 = used.binary_search(&entry.0).unwrap();
            }
            list.sort_by_key(|&(i, _)| i);
        }
        for g in &mut groups {
            g.sort_unstable();
        }
        let interface_labels = used.iter().map(|i| (i + 1).to_string()).collect();
        let vertex_labels = (0..available.len()).map(|v| v.to_string()).collect();
        Self::with_labels(vertex_labels, interface_labels, available, edges, groups)
    }

    pub(crate) fn with_labels(
        vertex_labels: Vec<String>,
        interface_labels: Vec<String>,
        available: Vec<Vec<(usize, Rational)>>,
        edges: Vec<(usize, usize)>,
        groups: Vec<Vec<usize>>,
    ) -> Self {
        let sets = available
            .iter()
            .map(|list| {
                list.iter()
                    .filter(|&&(i, _)| i < MAX_INTERFACES)
                    .map(|&(i, _)| i)
                    .collect()
            })
            .collect();
        Instance {
            vertex_labels,
            interface_labels,
            edges,
            available,
            sets,
            groups,
        }
    }

    pub fn n(&self) -> usize {
        self.available.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Number of distinct interfaces used by the instance.
    pub fn k(&self) -> usize {
        let mut all = vec![false; self.interface_labels.len()];
        for &(i, _) in self.available.iter().flatten() {
            if i < all.len() {
                all[i] = true;
            }
        }
        all.iter().filter(|&&b| b).count()
    }

    /// Size of the interface index space (`k` plus any unused labels).
    pub fn interface_count(&self) -> usize {
        self.interface_labels.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// `(interface, cost)` pairs available at `v`, ascending by interface.
    pub fn interfaces(&self, v: usize) -> &[(usize, Rational)] {
        &self.available[v]
    }

    pub fn available_set(&self, v: usize) -> InterfaceSet {
        self.sets[v]
    }

    pub fn cost(&self, interface: usize, v: usize) -> Option<Rational> {
        self.available[v]
            .binary_search_by_key(&interface, |&(i, _)| i)
            .ok()
            .map(|pos| self.available[v][pos].1)
    }

    pub fn common(&self, u: usize, v: usize) -> InterfaceSet {
        self.sets[u].intersection(self.sets[v])
    }

    pub fn max_cost(&self) -> Rational {
        self.available
            .iter()
            .flatten()
            .map(|&(_, c)| c)
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn vertex_label(&self, v: usize) -> &str {
        &self.vertex_labels[v]
    }

    pub fn interface_label(&self, i: usize) -> &str {
        &self.interface_labels[i]
    }

    pub fn vertex_index(&self, label: &str) -> Option<usize> {
        self.vertex_labels.iter().position(|l| l == label)
    }

    pub fn interface_index(&self, label: &str) -> Option<usize> {
        self.interface_labels.iter().position(|l| l == label)
    }

    /// Same network with different terminal groups.
    pub fn with_groups(&self, mut groups: Vec<Vec<usize>>) -> Instance {
        for g in &mut groups {
            g.sort_unstable();
        }
        Instance {
            groups,
            ..self.clone()
        }
    }

    /// Incident edge indices per vertex.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n()];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            inc[u].push(e);
            inc[v].push(e);
        }
        inc
    }

    /// Every violated invariant; empty iff the instance is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.n();
        let mut out = Vec::new();
        if n == 0 {
            out.push(Violation::NoVertices);
            return out;
        }
        if self.interface_labels.len() > MAX_INTERFACES {
            out.push(Violation::TooManyInterfaces(self.interface_labels.len()));
        }
        for (v, list) in self.available.iter().enumerate() {
            for (pos, &(i, c)) in list.iter().enumerate() {
                if i >= self.interface_labels.len() || i >= MAX_INTERFACES {
                    out.push(Violation::InterfaceOutOfRange { vertex: v, interface: i });
                }
                if pos > 0 && list[pos - 1].0 == i {
                    out.push(Violation::DuplicateInterface { vertex: v, interface: i });
                }
                if c < Rational::zero() {
                    out.push(Violation::NegativeCost { vertex: v, interface: i });
                }
            }
        }

        let mut seen = std::collections::HashSet::new();
        let mut edges_ok = true;
        for &(u, v) in &self.edges {
            if u >= n || v >= n {
                out.push(Violation::VertexOutOfRange { vertex: u.max(v) });
                edges_ok = false;
                continue;
            }
            if u == v {
                out.push(Violation::SelfLoop { vertex: u });
                continue;
            }
            if !seen.insert((u.min(v), u.max(v))) {
                out.push(Violation::DuplicateEdge { u, v });
            }
        }
        if edges_ok {
            let mut dsu = Dsu::new(n);
            let mut parts = n;
            for &(u, v) in &self.edges {
                if dsu.union(u, v) {
                    parts -= 1;
                }
            }
            if parts > 1 {
                out.push(Violation::NotConnected);
            }
            for &(u, v) in &self.edges {
                if u != v && self.common(u, v).is_empty() {
                    out.push(Violation::EdgeLacksCommonInterface { u, v });
                }
            }
        }

        let mut owner = vec![false; n];
        let mut overlap = false;
        for (r, g) in self.groups.iter().enumerate() {
            if g.is_empty() {
                out.push(Violation::EmptyGroup { group: r });
            }
            for &t in g {
                if t >= n {
                    out.push(Violation::VertexOutOfRange { vertex: t });
                } else if owner[t] {
                    if !overlap {
                        out.push(Violation::GroupsNotDisjoint { vertex: t });
                    }
                    overlap = true;
                } else {
                    owner[t] = true;
                }
            }
        }
        out
    }
}

/// Free-function form of [`Instance::validate`].
pub fn validate(inst: &Instance) -> Vec<Violation> {
    inst.validate()
}

/// Activated interfaces per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Assignment {
    active: Vec<InterfaceSet>,
}

impl Assignment {
    pub fn empty(n: usize) -> Self {
        Assignment {
            active: vec![InterfaceSet::EMPTY; n],
        }
    }

    /// Every available interface at every vertex.
    pub fn full(inst: &Instance) -> Self {
        Assignment {
            active: (0..inst.n()).map(|v| inst.available_set(v)).collect(),
        }
    }

    pub fn from_sets(active: Vec<InterfaceSet>) -> Self {
        Assignment { active }
    }

    pub fn n(&self) -> usize {
        self.active.len()
    }

    pub fn active(&self, v: usize) -> InterfaceSet {
        self.active[v]
    }

    pub fn sets(&self) -> &[InterfaceSet] {
        &self.active
    }

    pub fn activate(&mut self, v: usize, interface: usize) {
        self.active[v].insert(interface);
    }

    pub fn set(&mut self, v: usize, interfaces: InterfaceSet) {
        self.active[v] = interfaces;
    }

    /// Vertex-wise union.
    pub fn union_with(&mut self, other: &Assignment) {
        for (a, b) in self.active.iter_mut().zip(&other.active) {
            *a = a.union(*b);
        }
    }

    /// True iff every activation is available at its vertex.
    pub fn is_valid_for(&self, inst: &Instance) -> bool {
        self.active.len() == inst.n()
            && (0..inst.n()).all(|v| self.active[v].is_subset(inst.available_set(v)))
    }

    /// Serializes as `active <vertex> <iface>...` lines, skipping idle vertices.
    pub fn to_text(&self, inst: &Instance) -> String {
        let mut out = String::new();
        for (v, set) in self.active.iter().enumerate() {
            if set.is_empty() {
                continue;
            }
            out.push_str("active ");
            out.push_str(inst.vertex_label(v));
            for i in set.iter() {
                out.push(' ');
                out.push_str(inst.interface_label(i));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128) -> Rational {
        Rational::from_integer(n)
    }

    fn triangle() -> Instance {
        Instance::new(
            vec![vec![(0, q(1))], vec![(0, q(1))], vec![(0, q(1))]],
            vec![(0, 1), (1, 2), (0, 2)],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn valid_triangle_has_no_violations() {
        assert!(triangle().validate().is_empty());
    }

    #[test]
    fn disconnected_graph_is_reported() {
        let inst = Instance::new_unchecked(
            vec![vec![(0, q(1))]; 4],
            vec![(0, 1), (2, 3)],
            vec![],
        );
        assert_eq!(inst.validate(), vec![Violation::NotConnected]);
        assert_eq!(inst.validate()[0].to_string(), "graph not connected");
    }

    #[test]
    fn overlapping_groups_are_reported() {
        let inst = Instance::new_unchecked(
            vec![vec![(0, q(1))]; 4],
            vec![(0, 1), (1, 2), (2, 3)],
            vec![vec![1, 2], vec![2, 3]],
        );
        assert_eq!(inst.validate(), vec![Violation::GroupsNotDisjoint { vertex: 2 }]);
    }

    #[test]
    fn edge_without_common_interface_is_reported() {
        let inst = Instance::new_unchecked(vec![vec![(0, q(1))], vec![(1, q(1))]], vec![(0, 1)], vec![]);
        assert_eq!(
            inst.validate(),
            vec![Violation::EdgeLacksCommonInterface { u: 0, v: 1 }]
        );
    }

    #[test]
    fn structural_violations() {
        let inst = Instance::new_unchecked(
            vec![vec![(0, q(1)), (0, q(2))], vec![(0, q(-1))]],
            vec![(0, 1), (1, 0), (1, 1)],
            vec![vec![]],
        );
        let v = inst.validate();
        assert!(v.contains(&Violation::DuplicateInterface { vertex: 0, interface: 0 }));
        assert!(v.contains(&Violation::NegativeCost { vertex: 1, interface: 0 }));
        assert!(v.contains(&Violation::DuplicateEdge { u: 1, v: 0 }));
        assert!(v.contains(&Violation::SelfLoop { vertex: 1 }));
        assert!(v.contains(&Violation::EmptyGroup { group: 0 }));
    }

    #[test]
    fn interface_set_ops() {
        let a: InterfaceSet = [0, 3, 5].into_iter().collect();
        let b: InterfaceSet = [3, 4].into_iter().collect();
        assert_eq!(a.len(), 3);
        assert!(a.intersects(b));
        assert_eq!(a.intersection(b).iter().collect::<Vec<_>>(), vec![3]);
        assert_eq!(a.union(b).iter().collect::<Vec<_>>(), vec![0, 3, 4, 5]);
        assert!(InterfaceSet::singleton(3).is_subset(a));
        assert!(!b.is_subset(a));
    }

    #[test]
    fn assignment_union_and_validity() {
        let inst = triangle();
        let mut a = Assignment::empty(3);
        a.activate(0, 0);
        let mut b = Assignment::empty(3);
        b.activate(2, 0);
        a.union_with(&b);
        assert!(a.active(0).contains(0) && a.active(2).contains(0));
        assert!(a.is_valid_for(&inst));
        a.activate(1, 1);
        assert!(!a.is_valid_for(&inst));
    }
}
