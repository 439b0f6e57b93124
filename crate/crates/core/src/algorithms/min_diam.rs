//! Minimum-diameter community under a minimum-degree floor.
//!
//! One peel per start vertex `q`: degree violators go first (in batch, with
//! cascades); otherwise the vertex farthest from `q` goes. Deleting a
//! farthest vertex never shortens or lengthens any other distance from `q`,
//! and neither does deleting a vertex of degree at most one, so BFS from `q`
//! is only rerun after a violator of degree two or more inside `q`'s
//! component has been deleted. With `delta_min <= 2` that never happens and
//! a single BFS per start suffices.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::state::PeelState;
use super::{
    component_at, CandidateRecord, DriverConfig, PeelOptions, PeelOutcome, PeelTrace, QuerySet, RemovalReason,
    Solution, Variant,
};
use crate::error::{Error, Result};
use crate::graph::{diameter_exact, induced_subgraph, masked_bfs, Distance, Graph, Vertex, INFINITE};

/// Distances from the start vertex, with the alive vertices ordered
/// unreachable-first, then by decreasing distance, then by id.
struct FarthestOrder {
    dist: Vec<Distance>,
    order: Vec<Vertex>,
    cursor: usize,
    finite_cursor: usize,
    comp_size: usize,
    comp_hits: usize,
}

impl FarthestOrder {
    fn build(st: &PeelState<'_>, q: Vertex) -> Self {
        let dist = masked_bfs(st.g, &[q], Some(&st.alive));
        let mut order: Vec<Vertex> = st.g.vertices().filter(|&v| st.alive[v]).collect();
        order.sort_by_key(|&v| (Reverse(dist[v]), v));
        let finite_cursor = order.partition_point(|&v| dist[v] == INFINITE);
        let comp_size = order.len() - finite_cursor;
        let comp_hits = order[finite_cursor..].iter().filter(|&&v| st.is_query[v]).count();
        Self { dist, order, cursor: 0, finite_cursor, comp_size, comp_hits }
    }

    fn farthest(&mut self, alive: &[bool]) -> Vertex {
        while !alive[self.order[self.cursor]] {
            self.cursor += 1;
        }
        self.order[self.cursor]
    }

    fn eccentricity(&mut self, alive: &[bool]) -> Distance {
        while !alive[self.order[self.finite_cursor]] {
            self.finite_cursor += 1;
        }
        self.dist[self.order[self.finite_cursor]]
    }

    fn forget(&mut self, v: Vertex, is_query: bool) {
        if self.dist[v] != INFINITE {
            self.comp_size -= 1;
            if is_query {
                self.comp_hits -= 1;
            }
        }
    }
}

type Key = (usize, Reverse<usize>, usize);

/// Single-start peel from query vertex `q`. The returned solution is the
/// feasible snapshot of `q`'s component with the smallest eccentricity from
/// `q` (then most query vertices, then fewest vertices); its objective is
/// the exact diameter of that community.
pub fn peel_min_diam(g: &Graph, qs: &QuerySet, delta_min: usize, q: Vertex) -> Result<PeelOutcome> {
    peel_min_diam_with(g, qs, delta_min, q, &PeelOptions::default())
}

pub fn peel_min_diam_with(
    g: &Graph,
    qs: &QuerySet,
    delta_min: usize,
    q: Vertex,
    opts: &PeelOptions,
) -> Result<PeelOutcome> {
    if !qs.contains(q) {
        return Err(Error::Domain(format!("start vertex {q} is not a query vertex")));
    }
    let required = qs.required();
    let mut st = PeelState::new(g, qs.mask(g.n()), false);
    let mut violators: BinaryHeap<Reverse<Vertex>> =
        g.vertices().filter(|&v| st.degree[v] < delta_min).map(Reverse).collect();
    let mut far = FarthestOrder::build(&st, q);
    let mut stale = false;
    let mut candidates = Vec::new();
    let mut best: Option<(Key, usize)> = None;
    let mut broke_on_q = false;

    let mut consider = |st: &PeelState<'_>, far: &FarthestOrder, ecc: Distance| {
        let key = (ecc as usize, Reverse(far.comp_hits), far.comp_size);
        if best.as_ref().is_none_or(|(b, _)| key < *b) {
            best = Some((key, st.step()));
        }
        let vertices = opts
            .record_candidate_sets
            .then(|| g.vertices().filter(|&v| st.alive[v] && far.dist[v] != INFINITE).collect());
        candidates.push(CandidateRecord {
            step: st.step(),
            score: ecc as usize,
            query_hits: far.comp_hits,
            size: far.comp_size,
            vertices,
        });
    };

    loop {
        if st.edge_count == 0 || st.alive_queries < required {
            break;
        }
        let violator = loop {
            match violators.pop() {
                Some(Reverse(v)) if st.alive[v] => break Some(v),
                Some(_) => continue,
                None => break None,
            }
        };
        if let Some(v) = violator {
            if v == q {
                broke_on_q = true;
                break;
            }
            let removed_degree = st.remove_with(v, RemovalReason::DegreeViolation, |w, dw| {
                if dw + 1 == delta_min {
                    violators.push(Reverse(w));
                }
            });
            if !stale {
                if far.dist[v] != INFINITE && removed_degree >= 2 {
                    stale = true;
                } else {
                    far.forget(v, st.is_query[v]);
                }
            }
            continue;
        }

        // No degree violator left: G_t is a candidate if q's component keeps
        // enough query vertices.
        if stale {
            far = FarthestOrder::build(&st, q);
            stale = false;
        }
        if far.comp_hits >= required {
            let ecc = far.eccentricity(&st.alive);
            consider(&st, &far, ecc);
        }
        let v = far.farthest(&st.alive);
        st.remove_with(v, RemovalReason::MaxDistanceFromQ, |w, dw| {
            if dw + 1 == delta_min {
                violators.push(Reverse(w));
            }
        });
        far.forget(v, st.is_query[v]);
    }

    if !broke_on_q {
        // The loop stopped on an exhausted edge set or query budget; the
        // final graph still gets evaluated, degree floor included.
        if stale {
            far = FarthestOrder::build(&st, q);
        }
        let degree_ok = g.vertices().all(|v| !st.alive[v] || far.dist[v] == INFINITE || st.degree[v] >= delta_min);
        if degree_ok && far.comp_hits >= required {
            let ecc = far.eccentricity(&st.alive);
            consider(&st, &far, ecc);
        }
    }

    let trace = PeelTrace { removals: st.removals, candidates };
    let (solution, score) = match best {
        None => (Solution::unfeasible(Variant::MinDiamMinDeg), None),
        Some(((ecc, Reverse(hits), _), step)) => {
            let vertices = component_at(g, &trace, step, q);
            let diameter = diameter_exact(&induced_subgraph(g, &vertices)?.graph);
            (Solution::found(Variant::MinDiamMinDeg, vertices, diameter as usize, hits), Some(ecc))
        }
    };
    Ok(PeelOutcome { solution, score, trace })
}

/// Multi-start driver: peels from the `k + 1` smallest query ids (every
/// query vertex with `all_starts`) and keeps the result of smallest exact
/// diameter, then most query vertices, then fewest vertices, then the
/// lexicographically smallest vertex set. At least one start lies in any
/// optimum community, which gives the factor-2 guarantee.
pub fn solve_min_diam(g: &Graph, qs: &QuerySet, delta_min: usize) -> Result<Solution> {
    solve_min_diam_with(g, qs, delta_min, &DriverConfig::default())
}

pub fn solve_min_diam_with(g: &Graph, qs: &QuerySet, delta_min: usize, cfg: &DriverConfig) -> Result<Solution> {
    let runs = qs
        .starts(cfg.all_starts)
        .par_iter()
        .map(|&q| peel_min_diam(g, qs, delta_min, q).map(|o| o.solution))
        .collect::<Result<Vec<_>>>()?;
    let best = runs.into_iter().filter(|s| s.feasible).min_by(|a, b| {
        (a.objective, Reverse(a.query_hits), a.size(), &a.vertices).cmp(&(
            b.objective,
            Reverse(b.query_hits),
            b.size(),
            &b.vertices,
        ))
    });
    Ok(best.unwrap_or_else(|| Solution::unfeasible(Variant::MinDiamMinDeg)))
}
