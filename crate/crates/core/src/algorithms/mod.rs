//! Peeling algorithms for community search with outliers.
//!
//! All three variants share the same skeleton: repeatedly delete a vertex
//! from a working copy of the graph, and at the steps where no hard
//! constraint is violated record the surviving community as a candidate.
//!
//! * [`solve_min_diam`]: minimise the diameter under a minimum-degree
//!   floor. Peels by distance from a start query vertex; 2-approximate.
//! * [`solve_max_min_deg_diam`]: maximise the minimum degree under a
//!   diameter bound. Optimal degree, diameter within twice the bound.
//! * [`solve_max_min_deg_dist`]: maximise the minimum degree under a bound
//!   on every vertex's distance to the retained query vertices. Exact.

mod max_deg_diam;
mod max_deg_dist;
mod min_diam;
mod state;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{self, induced_subgraph, masked_bfs, Graph, Vertex, INFINITE};

pub use max_deg_diam::{
    peel_max_min_deg_diam, peel_max_min_deg_diam_with, solve_max_min_deg_diam, solve_max_min_deg_diam_with,
};
pub use max_deg_dist::{peel_max_min_deg_dist, prune_by_distance, solve_max_min_deg_dist};
pub use min_diam::{peel_min_diam, peel_min_diam_with, solve_min_diam, solve_min_diam_with};

/// Query vertices `Q` and the outlier budget `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuerySet {
    vertices: Vec<Vertex>,
    k: usize,
}

impl QuerySet {
    /// Validates `Q` against `g`: non-empty, ids in range, `k <= |Q| - 1`.
    /// Duplicate ids collapse.
    pub fn new(g: &Graph, vertices: impl IntoIterator<Item = Vertex>, k: usize) -> Result<Self> {
        let mut vertices: Vec<Vertex> = vertices.into_iter().collect();
        vertices.sort_unstable();
        vertices.dedup();
        if vertices.is_empty() {
            return Err(Error::InvalidQuery("query set is empty".into()));
        }
        for &v in &vertices {
            g.check_vertex(v)?;
        }
        if k >= vertices.len() {
            return Err(Error::InvalidQuery(format!(
                "outlier budget k = {k} must be at most |Q| - 1 = {}",
                vertices.len() - 1
            )));
        }
        Ok(Self { vertices, k })
    }

    /// Sorted, distinct query vertices.
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Minimum number of query vertices a solution must keep, `|Q| - k`.
    pub fn required(&self) -> usize {
        self.vertices.len() - self.k
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub(crate) fn mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &q in &self.vertices {
            mask[q] = true;
        }
        mask
    }

    /// Start vertices for the multi-start drivers: the `k + 1` smallest ids,
    /// or all of `Q`.
    pub(crate) fn starts(&self, all: bool) -> &[Vertex] {
        if all {
            &self.vertices
        } else {
            &self.vertices[..self.k + 1]
        }
    }

    /// Same query set expressed in the ids of an induced subgraph. Every
    /// query vertex must survive in `sub`.
    pub(crate) fn relabel(&self, sub: &graph::Subgraph) -> Option<Self> {
        let vertices = self.vertices.iter().map(|&q| sub.to_new(q)).collect::<Option<Vec<_>>>()?;
        Some(Self { vertices, k: self.k })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// Minimise diameter subject to a minimum-degree floor.
    MinDiamMinDeg,
    /// Maximise minimum degree subject to a diameter bound.
    MaxMinDegDiam,
    /// Maximise minimum degree subject to a distance-to-query bound.
    MaxMinDegDist,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::MinDiamMinDeg => "min-diam",
            Variant::MaxMinDegDiam => "max-deg-diam",
            Variant::MaxMinDegDist => "max-deg-dist",
        }
    }

    pub fn parameter_name(self) -> &'static str {
        match self {
            Variant::MinDiamMinDeg => "delta_min",
            Variant::MaxMinDegDiam => "diam_max",
            Variant::MaxMinDegDist => "d_max",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min-diam" | "MinDiamMinDeg" => Ok(Variant::MinDiamMinDeg),
            "max-deg-diam" | "MaxMinDegDiam" => Ok(Variant::MaxMinDegDiam),
            "max-deg-dist" | "MaxMinDegDist" => Ok(Variant::MaxMinDegDist),
            other => Err(Error::InvalidParameter(format!("unknown variant {other:?}"))),
        }
    }
}

/// A problem variant together with its constraint parameter
/// (`delta_min`, `diam_max` or `d_max`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub variant: Variant,
    pub parameter: usize,
}

impl ProblemSpec {
    pub fn new(variant: Variant, parameter: usize) -> Result<Self> {
        let spec = Self { variant, parameter };
        spec.validate()?;
        Ok(spec)
    }

    pub fn min_diam(delta_min: usize) -> Self {
        Self { variant: Variant::MinDiamMinDeg, parameter: delta_min }
    }

    pub fn max_deg_diam(diam_max: usize) -> Self {
        Self { variant: Variant::MaxMinDegDiam, parameter: diam_max }
    }

    pub fn max_deg_dist(d_max: usize) -> Self {
        Self { variant: Variant::MaxMinDegDist, parameter: d_max }
    }

    pub fn validate(&self) -> Result<()> {
        if self.variant != Variant::MinDiamMinDeg && self.parameter == 0 {
            return Err(Error::InvalidParameter(format!("{} must be at least 1", self.variant.parameter_name())));
        }
        Ok(())
    }
}

/// Outcome of a solver. When `feasible` is false, `vertices` is empty and
/// `objective` is `None`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub variant: Variant,
    /// Sorted vertex ids of the community `H`, in the ids of the graph the
    /// solver was given.
    pub vertices: Vec<Vertex>,
    /// Diameter of `H` for `MinDiamMinDeg`, minimum degree otherwise.
    pub objective: Option<usize>,
    pub query_hits: usize,
    pub feasible: bool,
}

impl Solution {
    pub fn unfeasible(variant: Variant) -> Self {
        Self { variant, vertices: Vec::new(), objective: None, query_hits: 0, feasible: false }
    }

    pub(crate) fn found(variant: Variant, vertices: Vec<Vertex>, objective: usize, query_hits: usize) -> Self {
        Self { variant, vertices, objective: Some(objective), query_hits, feasible: true }
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RemovalReason {
    /// Degree below `delta_min`.
    DegreeViolation,
    /// Too far from the start vertex, or from the query vertices of its
    /// component.
    DistanceViolation,
    /// Its component holds fewer than `|Q| - k` query vertices.
    QueryShortfall,
    /// Farthest remaining vertex from the start vertex.
    MaxDistanceFromQ,
    /// A minimum-degree vertex.
    MinDegree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Removal {
    /// 1-based; removal `t` turns `G_{t-1}` into `G_t`.
    pub step: usize,
    pub vertex: Vertex,
    pub reason: RemovalReason,
}

/// A feasible community seen during peeling, taken from `G_step`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub step: usize,
    /// Eccentricity from the start vertex for the min-diameter peel,
    /// minimum degree for the others.
    pub score: usize,
    pub query_hits: usize,
    pub size: usize,
    /// Present only when [`PeelOptions::record_candidate_sets`] is set.
    pub vertices: Option<Vec<Vertex>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeelTrace {
    pub removals: Vec<Removal>,
    pub candidates: Vec<CandidateRecord>,
}

impl PeelTrace {
    /// Alive mask of `G_step`, obtained by replaying the first `step`
    /// removals on `g`.
    pub fn alive_at(&self, g: &Graph, step: usize) -> Vec<bool> {
        let mut alive = vec![true; g.n()];
        for r in self.removals.iter().take_while(|r| r.step <= step) {
            alive[r.vertex] = false;
        }
        alive
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PeelOptions {
    /// Materialise the vertex set of every candidate in the trace. Costs
    /// memory quadratic in the graph size; meant for audits and tests.
    pub record_candidate_sets: bool,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DriverConfig {
    /// Start a peel from every query vertex instead of the `k + 1`
    /// smallest ids.
    pub all_starts: bool,
}

/// Options for [`solve`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveConfig {
    pub all_starts: bool,
    /// Distance pruning before the exact `d_max` peel.
    pub use_pruning: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self { all_starts: false, use_pruning: true }
    }
}

/// Dispatches to the solver for `spec.variant`.
pub fn solve(g: &Graph, qs: &QuerySet, spec: &ProblemSpec, cfg: &SolveConfig) -> Result<Solution> {
    spec.validate()?;
    let driver = DriverConfig { all_starts: cfg.all_starts };
    match spec.variant {
        Variant::MinDiamMinDeg => solve_min_diam_with(g, qs, spec.parameter, &driver),
        Variant::MaxMinDegDiam => solve_max_min_deg_diam_with(g, qs, spec.parameter, &driver),
        Variant::MaxMinDegDist => solve_max_min_deg_dist(g, qs, spec.parameter, cfg.use_pruning),
    }
}

/// Result of a single-start peel.
#[derive(Clone, Debug)]
pub struct PeelOutcome {
    pub solution: Solution,
    /// Score the peel ranked its candidates by (see [`CandidateRecord::score`]).
    pub score: Option<usize>,
    pub trace: PeelTrace,
}

/// Sorted vertex set of the component of `root` in `G_step`.
pub(crate) fn component_at(g: &Graph, trace: &PeelTrace, step: usize, root: Vertex) -> Vec<Vertex> {
    let alive = trace.alive_at(g, step);
    masked_bfs(g, &[root], Some(&alive)).iter().enumerate().filter_map(|(v, &d)| (d != INFINITE).then_some(v)).collect()
}

/// Checks that `component` is a connected vertex set satisfying the query
/// count and the variant's constraint, with every quantity measured in the
/// subgraph it induces.
pub fn check_feasible(g: &Graph, component: &[Vertex], qs: &QuerySet, spec: &ProblemSpec) -> bool {
    let Ok(sub) = induced_subgraph(g, component) else {
        return false;
    };
    let h = &sub.graph;
    if h.n() == 0 {
        return false;
    }
    if graph::connected_components(h).iter().any(|&c| c != 0) {
        return false;
    }
    let local_queries: Vec<Vertex> = qs.vertices().iter().filter_map(|&q| sub.to_new(q)).collect();
    if local_queries.len() < qs.required() {
        return false;
    }
    let p = spec.parameter;
    match spec.variant {
        Variant::MinDiamMinDeg => h.vertices().all(|v| h.degree(v) >= p),
        Variant::MaxMinDegDiam => (graph::diameter_exact(h) as usize) <= p,
        Variant::MaxMinDegDist => {
            let dist = masked_bfs(h, &local_queries, None);
            dist.iter().all(|&d| d != INFINITE && d as usize <= p)
        }
    }
}
