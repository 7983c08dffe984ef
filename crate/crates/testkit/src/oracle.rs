use std::collections::VecDeque;

use mina_core::lp::Sense;
use mina_core::maxflow::CapGraph;
use mina_core::{verify, Assignment, Instance, LinearProgram, Scalar};

/// A row `a·x (sense) b` in dense form.
struct DenseRow {
    a: Vec<f64>,
    sense: Sense,
    b: f64,
}

fn dense_rows(lp: &LinearProgram) -> Vec<DenseRow> {
    let n = lp.num_vars();
    let mut rows = Vec::new();
    for j in 0..n {
        let (lo, hi) = lp.bounds(j);
        let mut a = vec![0.0; n];
        a[j] = 1.0;
        rows.push(DenseRow { a: a.clone(), sense: Sense::Ge, b: lo });
        rows.push(DenseRow { a, sense: Sense::Le, b: hi });
    }
    for c in lp.constraints() {
        let mut a = vec![0.0; n];
        for &(j, v) in &c.coeffs {
            a[j] += v;
        }
        rows.push(DenseRow { a, sense: c.sense, b: c.rhs });
    }
    rows
}

/// Solves the square system by Gaussian elimination with partial pivoting.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-10 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..n {
                        a[r][c] -= f * a[col][c];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn combinations(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::new(), f);
}

/// Optimum of a bounded LP by enumerating every basic solution: each choice
/// of `n` tight rows (bounds included) whose system is nonsingular gives a
/// candidate vertex. Returns `None` when no vertex is feasible.
pub fn lp_by_vertex_enumeration(lp: &LinearProgram) -> Option<f64> {
    let n = lp.num_vars();
    let rows = dense_rows(lp);
    let mut best: Option<f64> = None;
    combinations(rows.len(), n, &mut |pick| {
        let a = pick.iter().map(|&r| rows[r].a.clone()).collect();
        let b = pick.iter().map(|&r| rows[r].b).collect();
        let Some(x) = solve_square(a, b) else {
            return;
        };
        let feasible = rows.iter().all(|r| {
            let lhs: f64 = r.a.iter().zip(&x).map(|(a, x)| a * x).sum();
            match r.sense {
                Sense::Le => lhs <= r.b + 1e-9,
                Sense::Ge => lhs >= r.b - 1e-9,
                Sense::Eq => (lhs - r.b).abs() <= 1e-9,
            }
        });
        if feasible {
            let obj = lp.objective_value(&x);
            if best.is_none_or(|b| obj < b) {
                best = Some(obj);
            }
        }
    });
    best
}

/// Least `s`–`t` cut value over every vertex set containing `s` but not `t`.
pub fn min_cut_by_enumeration<C: Scalar>(g: &CapGraph<C>, s: usize, t: usize) -> C {
    let n = g.n();
    let mut best: Option<C> = None;
    for mask in 0u64..1 << n {
        if mask >> s & 1 == 0 || mask >> t & 1 == 1 {
            continue;
        }
        let side: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
        let value = g.cut_of(side).value;
        if best.as_ref().is_none_or(|b| value < *b) {
            best = Some(value);
        }
    }
    best.unwrap_or_else(C::zero)
}

/// Every vertex set `S` (as a mask without vertex `n-1`, to skip
/// complements) that separates two terminals of some group.
pub fn separating_sets(inst: &Instance) -> Vec<u64> {
    let n = inst.n();
    let inside = |mask: u64, v: usize| mask >> v & 1 == 1;
    (1u64..1 << (n - 1))
        .filter(|&mask| {
            inst.groups().iter().any(|g| {
                g.iter().any(|&t| inside(mask, t)) && g.iter().any(|&t| !inside(mask, t))
            })
        })
        .collect()
}

/// Crossing edge indices of `mask`.
pub fn crossing(inst: &Instance, mask: u64) -> Vec<usize> {
    inst.edges()
        .iter()
        .enumerate()
        .filter(|(_, &(u, v))| (mask >> u & 1) != (mask >> v & 1))
        .map(|(e, _)| e)
        .collect()
}

/// Least `y(δ(S))` over all group-separating sets, if any exist.
pub fn min_separating_cut(inst: &Instance, y: &[f64]) -> Option<f64> {
    separating_sets(inst)
        .into_iter()
        .map(|mask| crossing(inst, mask).iter().map(|&e| y[e]).sum::<f64>())
        .min_by(f64::total_cmp)
}

/// Group connectivity of `G_A` recomputed by breadth-first search.
pub fn bfs_connecting(inst: &Instance, a: &Assignment) -> bool {
    let covered = verify::covered_edges(inst, a).expect("valid assignment");
    let mut adj = vec![Vec::new(); inst.n()];
    for e in covered {
        let (u, v) = inst.edges()[e];
        adj[u].push(v);
        adj[v].push(u);
    }
    inst.groups().iter().all(|g| {
        let mut seen = vec![false; inst.n()];
        seen[g[0]] = true;
        let mut queue = VecDeque::from([g[0]]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        g.iter().all(|&t| seen[t])
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_enumeration_on_a_textbook_program() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(0.0, 100.0);
        let y = lp.add_var(0.0, 100.0);
        lp.set_objective(x, -3.0);
        lp.set_objective(y, -5.0);
        lp.add_constraint(vec![(x, 1.0)], Sense::Le, 4.0);
        lp.add_constraint(vec![(y, 2.0)], Sense::Le, 12.0);
        lp.add_constraint(vec![(x, 3.0), (y, 2.0)], Sense::Le, 18.0);
        assert_eq!(lp_by_vertex_enumeration(&lp), Some(-36.0));
    }

    #[test]
    fn infeasible_program_has_no_vertex() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var(0.0, 1.0);
        lp.add_constraint(vec![(x, 1.0)], Sense::Ge, 2.0);
        assert_eq!(lp_by_vertex_enumeration(&lp), None);
    }
}
