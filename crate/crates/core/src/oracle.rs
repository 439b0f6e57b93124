//! Brute-force reference solver for small graphs.
//!
//! Enumerates every non-empty vertex subset as a bitmask and evaluates the
//! problem definitions directly on the induced subgraph. Shares no code with
//! the peeling algorithms; adjacency, connectivity and distances are all
//! recomputed here on bitmasks.

use serde::Serialize;

use crate::algorithms::{ProblemSpec, QuerySet, Variant};
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

/// Which graph the distance constraint of the `d_max` variant is measured in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DistanceScope {
    /// Inside the candidate subgraph.
    #[default]
    Induced,
    /// In the host graph.
    Host,
}

#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    pub max_vertices: usize,
    pub witness_cap: usize,
    pub distance_scope: DistanceScope,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { max_vertices: 20, witness_cap: 64, distance_scope: DistanceScope::Induced }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    /// Optimal objective, `None` when no subset is feasible.
    pub optimum: Option<usize>,
    /// Optimal vertex sets in enumeration order, at most `witness_cap`.
    pub witnesses: Vec<Vec<Vertex>>,
    /// Total number of optimal vertex sets.
    pub count: u64,
    /// Smallest diameter over all optimal sets (max-degree-under-diameter
    /// variant only).
    pub opt_min_diameter_among_witnesses: Option<usize>,
}

impl OracleResult {
    pub fn feasible(&self) -> bool {
        self.optimum.is_some()
    }
}

pub fn oracle_solve(g: &Graph, qs: &QuerySet, spec: &ProblemSpec) -> Result<OracleResult> {
    oracle_solve_with(g, qs, spec, &OracleConfig::default())
}

pub fn oracle_solve_with(g: &Graph, qs: &QuerySet, spec: &ProblemSpec, cfg: &OracleConfig) -> Result<OracleResult> {
    let n = g.n();
    if n > cfg.max_vertices || n >= 64 {
        return Err(Error::OracleGuard { n, limit: cfg.max_vertices.min(63) });
    }
    spec.validate()?;
    let adj: Vec<u64> = g.vertices().map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | 1 << w)).collect();
    let qmask = qs.vertices().iter().fold(0u64, |m, &q| m | 1 << q);
    let host_dist = (cfg.distance_scope == DistanceScope::Host).then(|| all_pairs(&adj, full_mask(n)));
    let required = qs.required() as u32;
    let p = spec.parameter;

    let mut best: Option<usize> = None;
    let mut witnesses = Vec::new();
    let mut count = 0u64;
    let mut min_diam_of_best: Option<usize> = None;

    for s in 1..=full_mask(n) {
        if (s & qmask).count_ones() < required || !connected(&adj, s) {
            continue;
        }
        let (objective, diameter) = match spec.variant {
            Variant::MinDiamMinDeg => {
                if min_degree(&adj, s) < p {
                    continue;
                }
                (diameter(&adj, s), None)
            }
            Variant::MaxMinDegDiam => {
                let d = diameter(&adj, s);
                if d > p {
                    continue;
                }
                (min_degree(&adj, s), Some(d))
            }
            Variant::MaxMinDegDist => {
                let far = match &host_dist {
                    None => distances_from(&adj, s, s & qmask).into_iter().any(|d| d > p),
                    Some(apsp) => ones(s).any(|v| ones(s & qmask).map(|q| apsp[q][v]).min().unwrap_or(usize::MAX) > p),
                };
                if far {
                    continue;
                }
                (min_degree(&adj, s), None)
            }
        };
        let better = match best {
            None => true,
            Some(b) => match spec.variant {
                Variant::MinDiamMinDeg => objective < b,
                _ => objective > b,
            },
        };
        if better {
            best = Some(objective);
            witnesses.clear();
            count = 0;
            min_diam_of_best = None;
        }
        if best == Some(objective) {
            count += 1;
            if witnesses.len() < cfg.witness_cap {
                witnesses.push(ones(s).collect());
            }
            if let Some(d) = diameter {
                min_diam_of_best = Some(min_diam_of_best.map_or(d, |m| m.min(d)));
            }
        }
    }

    Ok(OracleResult { optimum: best, witnesses, count, opt_min_diameter_among_witnesses: min_diam_of_best })
}

fn full_mask(n: usize) -> u64 {
    if n == 0 {
        0
    } else {
        u64::MAX >> (64 - n)
    }
}

fn ones(mut s: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (s != 0).then(|| {
            let v = s.trailing_zeros() as usize;
            s &= s - 1;
            v
        })
    })
}

fn expand(adj: &[u64], frontier: u64, within: u64) -> u64 {
    ones(frontier).fold(0, |acc, v| acc | adj[v]) & within
}

fn connected(adj: &[u64], s: u64) -> bool {
    let mut reached = s & s.wrapping_neg();
    let mut frontier = reached;
    while frontier != 0 {
        frontier = expand(adj, frontier, s) & !reached;
        reached |= frontier;
    }
    reached == s
}

fn min_degree(adj: &[u64], s: u64) -> usize {
    ones(s).map(|v| (adj[v] & s).count_ones() as usize).min().unwrap_or(0)
}

/// Distance inside `s` from the source set to every vertex of `s`,
/// `usize::MAX` where unreachable. Indexed by position in `ones(s)`.
fn distances_from(adj: &[u64], s: u64, sources: u64) -> Vec<usize> {
    let mut level = vec![usize::MAX; 64];
    let mut reached = sources & s;
    let mut frontier = reached;
    let mut d = 0;
    while frontier != 0 {
        for v in ones(frontier) {
            level[v] = d;
        }
        frontier = expand(adj, frontier, s) & !reached;
        reached |= frontier;
        d += 1;
    }
    ones(s).map(|v| level[v]).collect()
}

/// Diameter of the induced subgraph on `s`, assumed connected.
fn diameter(adj: &[u64], s: u64) -> usize {
    ones(s)
        .map(|v| {
            let mut reached = 1u64 << v;
            let mut frontier = reached;
            let mut ecc = 0;
            loop {
                frontier = expand(adj, frontier, s) & !reached;
                if frontier == 0 {
                    break ecc;
                }
                reached |= frontier;
                ecc += 1;
            }
        })
        .max()
        .unwrap_or(0)
}

fn all_pairs(adj: &[u64], s: u64) -> Vec<Vec<usize>> {
    (0..adj.len())
        .map(|v| {
            let row = distances_from(adj, s, 1 << v);
            let mut full = vec![usize::MAX; adj.len()];
            for (i, u) in ones(s).enumerate() {
                full[u] = row[i];
            }
            full
        })
        .collect()
}
