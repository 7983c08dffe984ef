//! Max-flow / min-cut on undirected capacitated graphs.
//!
//! Shortest augmenting paths (Edmonds–Karp). Each undirected edge becomes a
//! pair of opposite arcs that are each other's residual twin, so both
//! directions share the edge capacity.

use std::collections::VecDeque;

use crate::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct CapGraph<C> {
    n: usize,
    edges: Vec<(usize, usize, C)>,
}

impl<C: Scalar> CapGraph<C> {
    pub fn new(n: usize) -> Self {
        CapGraph { n, edges: Vec::new() }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, C)>) -> Self {
        let mut g = Self::new(n);
        for (u, v, c) in edges {
            g.add_edge(u, v, c);
        }
        g
    }

    /// Adds an undirected edge and returns its index.
    pub fn add_edge(&mut self, u: usize, v: usize, capacity: C) -> usize {
        assert!(u < self.n && v < self.n, "edge endpoint out of range");
        assert!(capacity >= C::zero(), "capacities must be non-negative");
        self.edges.push((u, v, capacity));
        self.edges.len() - 1
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, C)] {
        &self.edges
    }

    /// The cut `δ(S)` induced by a vertex side.
    pub fn cut_of(&self, side: Vec<bool>) -> Cut<C> {
        let crossing: Vec<usize> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, (u, v, _))| side[*u] != side[*v])
            .map(|(e, _)| e)
            .collect();
        let value = crossing
            .iter()
            .fold(C::zero(), |acc, &e| acc + self.edges[e].2.clone());
        Cut {
            side,
            crossing,
            value,
        }
    }
}

/// A vertex bipartition with its crossing edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut<C> {
    /// `side[v]` is true for vertices in `S` (the source side).
    pub side: Vec<bool>,
    /// Indices of edges with exactly one endpoint in `S`.
    pub crossing: Vec<usize>,
    pub value: C,
}

impl<C> Cut<C> {
    pub fn members(&self) -> Vec<usize> {
        (0..self.side.len()).filter(|&v| self.side[v]).collect()
    }

    pub fn separates(&self, a: usize, b: usize) -> bool {
        self.side[a] != self.side[b]
    }
}

/// Maximum `s`–`t` flow value and the canonical minimum cut, whose source
/// side is the set of vertices reachable from `s` in the final residual graph.
pub fn max_flow_min_cut<C: Scalar>(g: &CapGraph<C>, s: usize, t: usize) -> (C, Cut<C>) {
    assert!(s != t, "source and sink must differ");
    assert!(s < g.n && t < g.n, "terminal out of range");
    let n = g.n;
    let mut residual: Vec<C> = Vec::with_capacity(2 * g.edges.len());
    let mut head: Vec<usize> = Vec::with_capacity(2 * g.edges.len());
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, v, c) in &g.edges {
        let arc = residual.len();
        residual.push(c.clone());
        residual.push(c.clone());
        head.push(*v);
        head.push(*u);
        if u != v {
            adj[*u].push(arc);
            adj[*v].push(arc + 1);
        }
    }

    let mut flow = C::zero();
    let mut via: Vec<Option<usize>> = vec![None; n];
    loop {
        let reached = bfs(s, &adj, &head, &residual, &mut via);
        if !reached[t] {
            let cut = g.cut_of(reached);
            return (flow, cut);
        }
        let mut bottleneck: Option<C> = None;
        let mut x = t;
        while x != s {
            let arc = via[x].unwrap();
            bottleneck = Some(match bottleneck {
                Some(b) if b <= residual[arc] => b,
                _ => residual[arc].clone(),
            });
            x = head[arc ^ 1];
        }
        let b = bottleneck.unwrap();
        let mut x = t;
        while x != s {
            let arc = via[x].unwrap();
            residual[arc] = residual[arc].clone() - b.clone();
            residual[arc ^ 1] = residual[arc ^ 1].clone() + b.clone();
            x = head[arc ^ 1];
        }
        flow = flow + b;
    }
}

fn bfs<C: Scalar>(
    s: usize,
    adj: &[Vec<usize>],
    head: &[usize],
    residual: &[C],
    via: &mut [Option<usize>],
) -> Vec<bool> {
    let zero = C::zero();
    let mut seen = vec![false; adj.len()];
    via.iter_mut().for_each(|p| *p = None);
    seen[s] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(x) = queue.pop_front() {
        for &arc in &adj[x] {
            let y = head[arc];
            if !seen[y] && residual[arc] > zero {
                seen[y] = true;
                via[y] = Some(arc);
                queue.push_back(y);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn path_has_unit_flow_and_single_edge_cut() {
        let g = CapGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]);
        let (flow, cut) = max_flow_min_cut(&g, 0, 2);
        assert_eq!(flow, 1.0);
        assert_eq!(cut.value, 1.0);
        assert_eq!(cut.crossing.len(), 1);
        assert!(cut.separates(0, 2));
    }

    #[test]
    fn disconnected_terminals_have_zero_flow() {
        let g = CapGraph::from_edges(4, [(0, 1, 2.0), (2, 3, 5.0)]);
        let (flow, cut) = max_flow_min_cut(&g, 0, 3);
        assert_eq!(flow, 0.0);
        assert_eq!(cut.value, 0.0);
        assert_eq!(cut.members(), vec![0, 1]);
    }

    #[test]
    fn undirected_edges_carry_flow_both_ways() {
        // Diamond with a cross edge used in the "backward" direction.
        let g = CapGraph::from_edges(
            4,
            [(0, 1, 1.0), (0, 2, 1.0), (2, 1, 1.0), (1, 3, 1.0), (2, 3, 1.0)],
        );
        assert_eq!(max_flow_min_cut(&g, 0, 3).0, 2.0);
        assert_eq!(max_flow_min_cut(&g, 1, 2).0, 3.0);
    }

    #[test]
    fn rational_capacities_are_exact() {
        let q = |a, b| Rational::new(a, b);
        let g = CapGraph::from_edges(
            4,
            [(0, 1, q(1, 3)), (1, 3, q(1, 2)), (0, 2, q(1, 6)), (2, 3, q(1, 7))],
        );
        let (flow, cut) = max_flow_min_cut(&g, 0, 3);
        assert_eq!(flow, q(1, 3) + q(1, 7));
        assert_eq!(cut.value, flow);
    }

    #[test]
    fn zero_capacity_edges_are_not_traversed() {
        let g = CapGraph::from_edges(3, [(0, 1, 0.0), (1, 2, 4.0)]);
        let (flow, cut) = max_flow_min_cut(&g, 0, 2);
        assert_eq!(flow, 0.0);
        assert_eq!(cut.members(), vec![0]);
        assert_eq!(cut.crossing, vec![0]);
    }
}
