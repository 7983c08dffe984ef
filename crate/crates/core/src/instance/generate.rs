use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use super::{Instance, InterfaceSet, MAX_INTERFACES};
use crate::{seed, Rational};

/// Costs are drawn on a grid of this many steps per unit.
const COST_GRID: i128 = 1000;

const MAX_INTERFACE_RETRIES: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub n: usize,
    pub k: usize,
    /// Probability of each non-tree vertex pair becoming an edge.
    pub edge_density: f64,
    pub cost_lo: Rational,
    pub cost_hi: Rational,
    pub num_groups: usize,
    pub group_size: usize,
    pub seed: u64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n: 6,
            k: 3,
            edge_density: 0.5,
            cost_lo: Rational::new(1, 10),
            cost_hi: Rational::from_integer(1),
            num_groups: 0,
            group_size: 0,
            seed: seed::DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("infeasible generator parameters: {0}")]
    Parameters(String),
    #[error("no compatible interface set for vertex {vertex} after {MAX_INTERFACE_RETRIES} draws")]
    Retries { vertex: usize },
}

/// Draws a valid instance; the same parameters always give the same instance.
///
/// A random spanning tree guarantees connectivity; every other vertex pair is
/// added with probability `edge_density`. Interface sets are drawn vertex by
/// vertex (each interface kept with probability 1/2) and redrawn until they
/// meet every already-drawn neighbour's set. Costs are uniform on a 1/1000
/// grid over `[cost_lo, cost_hi]`.
pub fn generate_random(params: &GenParams) -> Result<Instance, GenError> {
    let GenParams {
        n,
        k,
        edge_density,
        cost_lo,
        cost_hi,
        num_groups,
        group_size,
        seed,
    } = params.clone();
    let bad = |msg: &str| Err(GenError::Parameters(msg.to_string()));
    if n < 2 {
        return bad("n must be at least 2");
    }
    if k == 0 || k > MAX_INTERFACES {
        return bad("k must lie in 1..=64");
    }
    if !(0.0..=1.0).contains(&edge_density) {
        return bad("edge density must be a probability");
    }
    if cost_lo < Rational::from_integer(0) || cost_lo > cost_hi {
        return bad("cost range must satisfy 0 <= lo <= hi");
    }
    if num_groups > 0 && (group_size == 0 || num_groups * group_size > n) {
        return bad("groups must be non-empty and fit in the vertex set");
    }

    let mut rng = seed::rng(seed);

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut adjacent = vec![vec![false; n]; n];
    for idx in 1..n {
        let parent = order[rng.gen_range(0..idx)];
        let child = order[idx];
        adjacent[child][parent] = true;
        adjacent[parent][child] = true;
    }
    for u in 0..n {
        for v in u + 1..n {
            if !adjacent[u][v] && rng.gen_bool(edge_density) {
                adjacent[u][v] = true;
                adjacent[v][u] = true;
            }
        }
    }
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| adjacent[u][v])
        .collect();

    let mut sets = vec![InterfaceSet::EMPTY; n];
    for v in 0..n {
        let mut found = false;
        for _ in 0..MAX_INTERFACE_RETRIES {
            let candidate: InterfaceSet = (0..k).filter(|_| rng.gen_bool(0.5)).collect();
            if candidate.is_empty() {
                continue;
            }
            if (0..v).all(|u| !adjacent[u][v] || sets[u].intersects(candidate)) {
                sets[v] = candidate;
                found = true;
                break;
            }
        }
        if !found {
            return Err(GenError::Retries { vertex: v });
        }
    }

    let steps = ((cost_hi - cost_lo) * Rational::from_integer(COST_GRID))
        .floor()
        .to_integer()
        .to_i64()
        .unwrap_or(i64::MAX);
    let available: Vec<Vec<(usize, Rational)>> = sets
        .iter()
        .map(|set| {
            set.iter()
                .map(|i| {
                    let step = rng.gen_range(0..=steps) as i128;
                    (i, cost_lo + Rational::new(step, COST_GRID))
                })
                .collect()
        })
        .collect();

    let mut groups = Vec::new();
    if num_groups > 0 {
        let mut pool: Vec<usize> = (0..n).collect();
        pool.shuffle(&mut rng);
        for chunk in pool.chunks(group_size).take(num_groups) {
            groups.push(chunk.to_vec());
        }
    }

    let inst = Instance::new_unchecked(available, edges, groups);
    debug_assert!(inst.validate().is_empty(), "{:?}", inst.validate());
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;

    #[test]
    fn forced_parameters_give_the_single_edge_instance() {
        let inst = generate_random(&GenParams {
            n: 2,
            k: 1,
            edge_density: 1.0,
            cost_lo: Rational::from_integer(1),
            cost_hi: Rational::from_integer(1),
            num_groups: 0,
            group_size: 0,
            seed: 7,
        })
        .unwrap();
        let expected =
            parse_instance("header 2 1 1 0\nvertex 0 1:1\nvertex 1 1:1\nedge 0 1\n").unwrap();
        assert_eq!(inst, expected);
    }

    #[test]
    fn same_seed_same_bytes() {
        let p = GenParams {
            n: 9,
            k: 3,
            edge_density: 0.4,
            num_groups: 2,
            group_size: 3,
            seed: 99,
            ..GenParams::default()
        };
        let a = generate_random(&p).unwrap().to_text();
        let b = generate_random(&p).unwrap().to_text();
        assert_eq!(a, b);
        let other = generate_random(&GenParams { seed: 100, ..p }).unwrap().to_text();
        assert_ne!(a, other);
    }

    #[test]
    fn rejects_bad_parameters() {
        let base = GenParams::default();
        assert!(generate_random(&GenParams { n: 1, ..base.clone() }).is_err());
        assert!(generate_random(&GenParams { k: 0, ..base.clone() }).is_err());
        assert!(generate_random(&GenParams { edge_density: 1.5, ..base.clone() }).is_err());
        assert!(generate_random(&GenParams {
            num_groups: 3,
            group_size: 3,
            ..base
        })
        .is_err());
    }
}
