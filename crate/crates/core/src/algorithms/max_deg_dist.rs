//! Exact maximum minimum-degree community under a distance-to-query bound.
//!
//! The peel deletes, in batch, every vertex whose component holds fewer than
//! `|Q| - k` query vertices or that lies farther than `d_max` from the query
//! vertices of its component. When none is left, every component is a
//! feasible community and gets scored; then a minimum-degree vertex goes.
//! The first optimum vertex to be deleted is deleted as a minimum-degree
//! vertex of the component containing the whole optimum, so that component
//! scores at least as well as the optimum.

use std::cmp::Reverse;

use super::state::PeelState;
use super::{CandidateRecord, PeelOptions, PeelTrace, QuerySet, RemovalReason, Solution, Variant};
use crate::error::{Error, Result};
use crate::graph::{
    induced_subgraph, masked_bfs, masked_components, multi_source_distances, Distance, Graph, Subgraph, Vertex,
    INFINITE,
};

/// Drops every vertex farther than `d_max` from all query vertices. No such
/// vertex can belong to a feasible community, since distances only grow in
/// subgraphs.
pub fn prune_by_distance(g: &Graph, qs: &QuerySet, d_max: usize) -> Result<Subgraph> {
    let dist = multi_source_distances(g, qs.vertices())?;
    let keep: Vec<Vertex> = g.vertices().filter(|&v| dist[v] != INFINITE && (dist[v] as usize) <= d_max).collect();
    induced_subgraph(g, &keep)
}

/// Solves the distance-bounded problem exactly, optionally pruning first.
/// Vertex ids in the result refer to `g` either way.
pub fn solve_max_min_deg_dist(g: &Graph, qs: &QuerySet, d_max: usize, use_pruning: bool) -> Result<Solution> {
    if !use_pruning {
        return Ok(peel_max_min_deg_dist(g, qs, d_max, &PeelOptions::default())?.0);
    }
    let sub = prune_by_distance(g, qs, d_max)?;
    let local_qs = qs.relabel(&sub).expect("query vertices are at distance 0 and survive pruning");
    let (mut sol, _) = peel_max_min_deg_dist(&sub.graph, &local_qs, d_max, &PeelOptions::default())?;
    for v in &mut sol.vertices {
        *v = sub.to_old(*v);
    }
    Ok(sol)
}

/// Per-component summary at a quiescent step.
#[derive(Clone, Copy)]
struct ComponentScore {
    min_degree: usize,
    hits: usize,
    size: usize,
}

type Key = (Reverse<usize>, Reverse<usize>, usize);

impl ComponentScore {
    fn key(&self) -> Key {
        (Reverse(self.min_degree), Reverse(self.hits), self.size)
    }
}

/// The peel itself, on the graph as given. Returns the best feasible
/// component (max minimum degree, then most query vertices, then fewest
/// vertices, then lexicographically smallest) and the trace.
pub fn peel_max_min_deg_dist(
    g: &Graph,
    qs: &QuerySet,
    d_max: usize,
    opts: &PeelOptions,
) -> Result<(Solution, PeelTrace)> {
    if d_max == 0 {
        return Err(Error::InvalidParameter("d_max must be at least 1".into()));
    }
    for &q in qs.vertices() {
        g.check_vertex(q)?;
    }
    let bound = Distance::try_from(d_max).unwrap_or(Distance::MAX - 1);
    let required = qs.required();
    let mut st = PeelState::new(g, qs.mask(g.n()), true);
    let mut candidates = Vec::new();
    let mut best: Option<(Key, Vec<Vertex>)> = None;

    let mut label = Vec::new();
    let mut comp_count = 0;
    let mut dist = Vec::new();
    let mut need_recompute = true;

    while st.alive_count > 0 {
        if need_recompute {
            (label, comp_count) = masked_components(g, Some(&st.alive));
            let alive_queries: Vec<Vertex> = qs.vertices().iter().copied().filter(|&q| st.alive[q]).collect();
            dist = masked_bfs(g, &alive_queries, Some(&st.alive));
        }
        let mut comp_hits = vec![0usize; comp_count];
        for &q in qs.vertices() {
            if st.alive[q] {
                comp_hits[label[q]] += 1;
            }
        }

        let mut removed_any = false;
        for v in g.vertices() {
            if !st.alive[v] {
                continue;
            }
            let reason = if comp_hits[label[v]] < required {
                RemovalReason::QueryShortfall
            } else if dist[v] > bound {
                RemovalReason::DistanceViolation
            } else {
                continue;
            };
            st.remove(v, reason);
            removed_any = true;
        }
        if removed_any {
            need_recompute = true;
            continue;
        }

        // Quiescent: every component is a feasible community.
        let mut scores = vec![ComponentScore { min_degree: usize::MAX, hits: 0, size: 0 }; comp_count];
        for v in g.vertices().filter(|&v| st.alive[v]) {
            let s = &mut scores[label[v]];
            s.min_degree = s.min_degree.min(st.degree[v]);
            s.size += 1;
        }
        for (c, s) in scores.iter_mut().enumerate() {
            s.hits = comp_hits[c];
        }
        let members_of = |c: usize| -> Vec<Vertex> { g.vertices().filter(|&v| st.alive[v] && label[v] == c).collect() };
        for (c, s) in scores.iter().enumerate() {
            if s.size == 0 {
                continue;
            }
            let key = s.key();
            let replace = match &best {
                None => true,
                Some((bk, _)) if key < *bk => true,
                Some((bk, bset)) if key == *bk => members_of(c) < *bset,
                _ => false,
            };
            if replace {
                best = Some((key, members_of(c)));
            }
            candidates.push(CandidateRecord {
                step: st.step(),
                score: s.min_degree,
                query_hits: s.hits,
                size: s.size,
                vertices: opts.record_candidate_sets.then(|| members_of(c)),
            });
        }

        let v = st.min_degree_vertex().expect("alive vertices remain");
        let was_query = st.is_query[v];
        let d = st.remove(v, RemovalReason::MinDegree);
        // Deleting an isolated vertex, or a non-query leaf, changes neither
        // the components' query sets nor anyone else's distance to them.
        need_recompute = !(d == 0 || (d == 1 && !was_query));
    }

    let trace = PeelTrace { removals: st.removals, candidates };
    let solution = match best {
        None => Solution::unfeasible(Variant::MaxMinDegDist),
        Some(((Reverse(min_degree), Reverse(hits), _), vertices)) => {
            Solution::found(Variant::MaxMinDegDist, vertices, min_degree, hits)
        }
    };
    Ok((solution, trace))
}
