//! Maximum minimum-degree community under a diameter bound (bicriteria).
//!
//! A peel from start vertex `q` keeps every vertex within `diam_max` of `q`,
//! so each candidate has eccentricity at most `diam_max` from `q` and hence
//! diameter at most `2 * diam_max`. Among such graphs the min-degree peel
//! finds one whose minimum degree is at least the optimum's.

use std::cmp::Reverse;

use rayon::prelude::*;

use super::state::PeelState;
use super::{
    component_at, CandidateRecord, DriverConfig, PeelOptions, PeelOutcome, PeelTrace, QuerySet, RemovalReason,
    Solution, Variant,
};
use crate::error::{Error, Result};
use crate::graph::{diameter_exact, induced_subgraph, masked_bfs, Distance, Graph, Vertex, INFINITE};

type Key = (Reverse<usize>, Reverse<usize>, usize);

pub fn peel_max_min_deg_diam(g: &Graph, qs: &QuerySet, diam_max: usize, q: Vertex) -> Result<PeelOutcome> {
    peel_max_min_deg_diam_with(g, qs, diam_max, q, &PeelOptions::default())
}

/// Single-start peel from `q`. Returns the feasible snapshot of `q`'s
/// component with the largest minimum degree (then most query vertices,
/// then fewest vertices).
pub fn peel_max_min_deg_diam_with(
    g: &Graph,
    qs: &QuerySet,
    diam_max: usize,
    q: Vertex,
    opts: &PeelOptions,
) -> Result<PeelOutcome> {
    if !qs.contains(q) {
        return Err(Error::Domain(format!("start vertex {q} is not a query vertex")));
    }
    if diam_max == 0 {
        return Err(Error::InvalidParameter("diam_max must be at least 1".into()));
    }
    let bound = Distance::try_from(diam_max).unwrap_or(INFINITE - 1);
    let required = qs.required();
    let mut st = PeelState::new(g, qs.mask(g.n()), true);
    let mut dist = masked_bfs(g, &[q], Some(&st.alive));
    let mut stale = false;
    let mut candidates = Vec::new();
    let mut best: Option<(Key, usize)> = None;
    let mut broke_on_q = false;

    let mut consider = |st: &PeelState<'_>, members: &[Vertex]| {
        let min_deg = members.iter().map(|&v| st.degree[v]).min().unwrap_or(0);
        let hits = members.iter().filter(|&&v| st.is_query[v]).count();
        let key = (Reverse(min_deg), Reverse(hits), members.len());
        if best.as_ref().is_none_or(|(b, _)| key < *b) {
            best = Some((key, st.step()));
        }
        candidates.push(CandidateRecord {
            step: st.step(),
            score: min_deg,
            query_hits: hits,
            size: members.len(),
            vertices: opts.record_candidate_sets.then(|| members.to_vec()),
        });
    };
    let alive_members = |st: &PeelState<'_>| -> Vec<Vertex> { g.vertices().filter(|&v| st.alive[v]).collect() };

    'peel: loop {
        if st.edge_count == 0 || st.alive_queries < required {
            break;
        }
        if stale {
            dist = masked_bfs(g, &[q], Some(&st.alive));
            stale = false;
        }
        // Vertices beyond the bound never lie on a shortest path to a vertex
        // within it, so deleting them leaves the remaining distances intact.
        let far: Vec<Vertex> = g.vertices().filter(|&v| st.alive[v] && dist[v] > bound).collect();
        if !far.is_empty() {
            for v in far {
                if st.edge_count == 0 || st.alive_queries < required {
                    break 'peel;
                }
                st.remove(v, RemovalReason::DistanceViolation);
            }
            continue;
        }

        // Every alive vertex is within the bound of q, so G_t is q's component.
        consider(&st, &alive_members(&st));
        let v = st.min_degree_vertex().expect("edges remain");
        if v == q {
            broke_on_q = true;
            break;
        }
        stale = st.remove(v, RemovalReason::MinDegree) >= 2;
    }

    if !broke_on_q {
        if stale {
            dist = masked_bfs(g, &[q], Some(&st.alive));
        }
        let members: Vec<Vertex> = g.vertices().filter(|&v| st.alive[v] && dist[v] != INFINITE).collect();
        let hits = members.iter().filter(|&&v| st.is_query[v]).count();
        if hits >= required && members.iter().all(|&v| dist[v] <= bound) {
            consider(&st, &members);
        }
    }

    let trace = PeelTrace { removals: st.removals, candidates };
    let (solution, score) = match best {
        None => (Solution::unfeasible(Variant::MaxMinDegDiam), None),
        Some(((Reverse(min_deg), Reverse(hits), _), step)) => {
            let vertices = component_at(g, &trace, step, q);
            (Solution::found(Variant::MaxMinDegDiam, vertices, min_deg, hits), Some(min_deg))
        }
    };
    Ok(PeelOutcome { solution, score, trace })
}

/// Multi-start driver. Keeps the result with the largest minimum degree,
/// then most query vertices, then smallest exact diameter, then the
/// lexicographically smallest vertex set.
pub fn solve_max_min_deg_diam(g: &Graph, qs: &QuerySet, diam_max: usize) -> Result<Solution> {
    solve_max_min_deg_diam_with(g, qs, diam_max, &DriverConfig::default())
}

pub fn solve_max_min_deg_diam_with(g: &Graph, qs: &QuerySet, diam_max: usize, cfg: &DriverConfig) -> Result<Solution> {
    let runs = qs
        .starts(cfg.all_starts)
        .par_iter()
        .map(|&q| peel_max_min_deg_diam(g, qs, diam_max, q).map(|o| o.solution))
        .collect::<Result<Vec<_>>>()?;
    let mut feasible: Vec<Solution> = runs.into_iter().filter(|s| s.feasible).collect();
    let Some(top) = feasible.iter().map(|s| (s.objective, s.query_hits)).max() else {
        return Ok(Solution::unfeasible(Variant::MaxMinDegDiam));
    };
    // Diameters are only needed to separate runs tied on degree and hits.
    feasible.retain(|s| (s.objective, s.query_hits) == top);
    if feasible.len() == 1 {
        return Ok(feasible.pop().expect("one left"));
    }
    let mut scored = feasible
        .into_iter()
        .map(|s| Ok((diameter_exact(&induced_subgraph(g, &s.vertices)?.graph), s)))
        .collect::<Result<Vec<_>>>()?;
    scored.sort_by(|(da, a), (db, b)| (da, &a.vertices).cmp(&(db, &b.vertices)));
    Ok(scored.swap_remove(0).1)
}
