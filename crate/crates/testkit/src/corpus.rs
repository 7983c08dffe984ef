//! Seeded instance corpora. Corpus `i` of a family is drawn from seed
//! `derive_seed(FAMILY_SEED, [i])`; draws the generator rejects, or that miss
//! the family's size window, are skipped, so the corpus is a fixed function
//! of its family seed.

use mina_core::instance::{generate_random, GenParams};
use mina_core::lp::Sense;
use mina_core::maxflow::CapGraph;
use mina_core::seed::{derive_seed, rng};
use mina_core::{Instance, LinearProgram, Rational};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const SMALL_SEED: u64 = 0x5EED_0001;
pub const MEDIUM_SEED: u64 = 0x5EED_0002;
pub const CONNECT_SEED: u64 = 0x5EED_0003;
pub const STAR_SEED: u64 = 0x5EED_0004;
pub const LP_SEED: u64 = 0x5EED_0005;
pub const FLOW_SEED: u64 = 0x5EED_0006;

fn collect(
    family: u64,
    count: usize,
    mut draw: impl FnMut(&mut ChaCha8Rng, u64) -> Option<Instance>,
) -> Vec<Instance> {
    let mut out = Vec::new();
    let mut i = 0u64;
    while out.len() < count {
        let s = derive_seed(family, &[i]);
        let mut r = rng(s);
        if let Some(inst) = draw(&mut r, s) {
            out.push(inst);
        }
        i += 1;
        assert!(i < 100_000, "corpus family {family:#x} cannot be filled");
    }
    out
}

/// `n ∈ 3..=7`, `k ∈ 1..=3`, costs in `[1/10, 2]`, one or two groups.
pub fn small_instances(count: usize) -> Vec<Instance> {
    collect(SMALL_SEED, count, |r, s| {
        let n = r.gen_range(3..=7);
        let (num_groups, group_size) = if n >= 4 { (2, 2) } else { (1, 2) };
        generate_random(&GenParams {
            n,
            k: r.gen_range(1..=3),
            edge_density: r.gen_range(0.2..0.8),
            cost_lo: Rational::new(1, 10),
            cost_hi: Rational::from_integer(2),
            num_groups,
            group_size,
            seed: s,
        })
        .ok()
    })
}

/// Coverage instances with `20 ≤ m ≤ 60`: `n ∈ 12..=20`, `k = 3`.
pub fn medium_instances(count: usize) -> Vec<Instance> {
    collect(MEDIUM_SEED, count, |r, s| {
        let n: usize = r.gen_range(12..=20);
        let target = r.gen_range(20..=60) as f64;
        let pairs = (n * (n - 1) / 2) as f64;
        let density = ((target - (n - 1) as f64) / (pairs - (n - 1) as f64)).clamp(0.0, 1.0);
        let inst = generate_random(&GenParams {
            n,
            k: 3,
            edge_density: density,
            cost_lo: Rational::new(1, 10),
            cost_hi: Rational::from_integer(2),
            num_groups: 2,
            group_size: 3,
            seed: s,
        })
        .ok()?;
        (20..=60).contains(&inst.m()).then_some(inst)
    })
}

/// Connectivity instances small enough for the exact oracle: `n = 8`,
/// `k ≤ 3`, `20 ≤ m ≤ 28`, two groups.
pub fn connectivity_instances(count: usize) -> Vec<Instance> {
    collect(CONNECT_SEED, count, |r, s| {
        let group_size = r.gen_range(2..=3);
        let inst = generate_random(&GenParams {
            n: 8,
            k: 3,
            edge_density: r.gen_range(0.7..=1.0),
            cost_lo: Rational::new(1, 10),
            cost_hi: Rational::from_integer(2),
            num_groups: 2,
            group_size,
            seed: s,
        })
        .ok()?;
        (20..=60).contains(&inst.m()).then_some(inst)
    })
}

/// A star: center 0 and `leaves` leaves, every vertex in the single group.
pub fn random_star(index: u64, leaves: usize, k: usize) -> Instance {
    let mut r = rng(derive_seed(STAR_SEED, &[index]));
    let cost = |r: &mut ChaCha8Rng| Rational::new(r.gen_range(1..=20), 10);
    let mut center: Vec<usize> = (0..k).filter(|_| r.gen_bool(0.6)).collect();
    if center.is_empty() {
        center.push(r.gen_range(0..k));
    }
    let mut avail = vec![center.iter().map(|&i| (i, cost(&mut r))).collect::<Vec<_>>()];
    for _ in 0..leaves {
        let shared = *center.choose(&mut r).unwrap();
        let mut set: Vec<usize> = (0..k).filter(|&i| i == shared || r.gen_bool(0.3)).collect();
        set.dedup();
        avail.push(set.into_iter().map(|i| (i, cost(&mut r))).collect());
    }
    let edges = (1..=leaves).map(|j| (0, j)).collect();
    let group = (0..=leaves).collect();
    Instance::new(avail, edges, vec![group]).expect("star is valid")
}

/// A bounded LP with `1..=max_vars` columns, `1..=5` rows and small integer data.
pub fn random_lp(index: u64, max_vars: usize) -> LinearProgram {
    let mut r = rng(derive_seed(LP_SEED, &[index]));
    let mut lp = LinearProgram::new();
    let n = r.gen_range(1..=max_vars);
    for j in 0..n {
        let lo = r.gen_range(-2..=1) as f64;
        let hi = lo + r.gen_range(1..=4) as f64;
        lp.add_var(lo, hi);
        lp.set_objective(j, r.gen_range(-5..=5) as f64);
    }
    for _ in 0..r.gen_range(1..=5) {
        let mut coeffs = Vec::new();
        for j in 0..n {
            if r.gen_bool(0.7) {
                coeffs.push((j, r.gen_range(-3..=3) as f64));
            }
        }
        let sense = [Sense::Le, Sense::Ge, Sense::Eq][r.gen_range(0..3)];
        let rhs = r.gen_range(-4..=6) as f64;
        lp.add_constraint(coeffs, sense, rhs);
    }
    lp
}

/// Random graph on `n` vertices with capacities `p/q`, `p ∈ 0..=12`, `q ∈ 1..=6`.
pub fn random_rational_graph(index: u64, n: usize) -> CapGraph<Rational> {
    let mut r = rng(derive_seed(FLOW_SEED, &[index]));
    let mut g = CapGraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if r.gen_bool(0.5) {
                g.add_edge(u, v, Rational::new(r.gen_range(0..=12), r.gen_range(1..=6)));
            }
        }
    }
    g
}
