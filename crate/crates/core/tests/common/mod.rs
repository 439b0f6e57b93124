#![allow(dead_code)]

use cso_core::algorithms::QuerySet;
use cso_core::graph::{Graph, Vertex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EDGE_PROBS: [f64; 3] = [0.3, 0.5, 0.7];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// G(n, p) with every pair decided by one coin flip, in `(u, v)` order.
pub fn erdos_renyi(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// A small random instance: graph, query set and a constraint parameter
/// drawn from `param_range`.
#[derive(Clone, Debug)]
pub struct Instance {
    pub id: u64,
    pub n: usize,
    pub p: f64,
    pub graph: Graph,
    pub queries: Vec<Vertex>,
    pub k: usize,
    pub param: usize,
}

impl Instance {
    pub fn query_set(&self) -> QuerySet {
        QuerySet::new(&self.graph, self.queries.iter().copied(), self.k).unwrap()
    }

    pub fn with_k(&self, k: usize) -> QuerySet {
        QuerySet::new(&self.graph, self.queries.iter().copied(), k).unwrap()
    }
}

/// Instance `id` of the family used throughout the suites: `n` in 4..=12,
/// `p` cycling through 0.3 / 0.5 / 0.7, 1..=4 query vertices, `k` uniform in
/// `0..|Q|`, parameter uniform in `param_lo..=param_hi`.
pub fn instance(seed: u64, id: u64, param_lo: usize, param_hi: usize) -> Instance {
    let mut r = rng(seed.wrapping_mul(1_000_003).wrapping_add(id));
    let n = r.gen_range(4..=12);
    let p = EDGE_PROBS[(id % 3) as usize];
    let graph = erdos_renyi(n, p, &mut r);
    let q_len = r.gen_range(1..=4.min(n));
    let all: Vec<Vertex> = (0..n).collect();
    let mut queries: Vec<Vertex> = all.choose_multiple(&mut r, q_len).copied().collect();
    queries.sort_unstable();
    let k = r.gen_range(0..q_len);
    let param = r.gen_range(param_lo..=param_hi);
    Instance { id, n, p, graph, queries, k, param }
}

/// Planted-partition graph: `communities` blocks of near-equal size, edge
/// probability `p_in` inside a block and `p_out` across. Returns the graph
/// and each vertex's block.
pub fn planted_partition(n: usize, communities: usize, p_in: f64, p_out: f64, seed: u64) -> (Graph, Vec<u64>) {
    let mut r = rng(seed);
    let block: Vec<u64> = (0..n).map(|v| (v * communities / n) as u64).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if block[u] == block[v] { p_in } else { p_out };
            if r.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    (Graph::from_edges(n, edges).unwrap(), block)
}

/// Like [`planted_partition`], but cross-block edges only join blocks that are
/// adjacent on a ring, so distances grow with block separation.
pub fn ring_partition(n: usize, communities: usize, p_in: f64, p_adj: f64, seed: u64) -> (Graph, Vec<u64>) {
    let mut r = rng(seed);
    let c = communities as u64;
    let block: Vec<u64> = (0..n).map(|v| (v * communities / n) as u64).collect();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let gap = block[v] - block[u];
            let p = match gap.min(c - gap) {
                0 => p_in,
                1 => p_adj,
                _ => continue,
            };
            if r.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    (Graph::from_edges(n, edges).unwrap(), block)
}
