//! Experiment harness: community files, seeded query generation, solution
//! metrics and parameter sweeps written as CSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algorithms::{solve, ProblemSpec, QuerySet, Solution, SolveConfig, Variant};
use crate::error::{Error, Result};
use crate::graph::{self, diameter_exact, induced_subgraph, LabeledGraph, Vertex};

/// One community label per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommunityMembership {
    pub labels: Vec<u64>,
}

impl CommunityMembership {
    /// Members of each community, keyed by label, members ascending.
    pub fn communities(&self) -> BTreeMap<u64, Vec<Vertex>> {
        let mut out: BTreeMap<u64, Vec<Vertex>> = BTreeMap::new();
        for (v, &c) in self.labels.iter().enumerate() {
            out.entry(c).or_default().push(v);
        }
        out
    }
}

/// Reads `vertex_id community_id` lines with dense vertex ids. Vertices
/// absent from the file form singleton communities labelled by their own id;
/// a repeated vertex keeps its last label.
pub fn load_communities<R: BufRead>(reader: R, n: usize) -> Result<CommunityMembership> {
    load_communities_by(reader, n, |id| usize::try_from(id).ok().filter(|&v| v < n))
}

/// Like [`load_communities`], with vertex ids given as the original ids of a
/// loaded graph.
pub fn load_communities_for<R: BufRead>(reader: R, lg: &LabeledGraph) -> Result<CommunityMembership> {
    load_communities_by(reader, lg.graph.n(), |id| lg.dense_id(id))
}

fn load_communities_by<R: BufRead>(
    reader: R,
    n: usize,
    resolve: impl Fn(u64) -> Option<Vertex>,
) -> Result<CommunityMembership> {
    let mut labels: Vec<u64> = (0..n as u64).collect();
    let mut seen = vec![false; n];
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        let parse = |tok: &str| {
            tok.parse::<u64>().map_err(|_| Error::Parse { line: lineno, message: format!("invalid id {tok:?}") })
        };
        let [vertex, community] = fields[..] else {
            return Err(Error::Parse { line: lineno, message: "expected `vertex_id community_id`".into() });
        };
        let (vertex, community) = (parse(vertex)?, parse(community)?);
        let v = resolve(vertex)
            .ok_or_else(|| Error::Domain(format!("line {lineno}: vertex {vertex} is not in the graph")))?;
        if seen[v] {
            log::warn!("line {lineno}: vertex {vertex} assigned twice, keeping community {community}");
        }
        seen[v] = true;
        labels[v] = community;
    }
    Ok(CommunityMembership { labels })
}

/// Parameters of the query generator: `n_same` vertices from one random
/// community plus `m_other` vertices spread over `span` other communities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QueryGenParams {
    pub n_same: usize,
    pub m_other: usize,
    pub span: usize,
    pub seed: u64,
}

/// Draws a query set. Deterministic in `(membership, params)`.
///
/// The seed community is uniform among those with at least `n_same`
/// members (and, when `m_other > 0`, enough other communities to span).
/// Each of the `span` other communities contributes one vertex so the query
/// set really spans them; the remaining `m_other - span` vertices are drawn
/// uniformly from the union of those communities.
pub fn generate_query(n: usize, membership: &CommunityMembership, p: &QueryGenParams) -> Result<Vec<Vertex>> {
    if membership.labels.len() != n {
        return Err(Error::Domain(format!("membership covers {} vertices, graph has {n}", membership.labels.len())));
    }
    if p.n_same + p.m_other == 0 {
        return Err(Error::Unsatisfiable("asked for an empty query set".into()));
    }
    if p.m_other > 0 && (p.span == 0 || p.span > p.m_other) {
        return Err(Error::Unsatisfiable(format!("cannot spread {} vertices over {} communities", p.m_other, p.span)));
    }
    let communities = membership.communities();
    let span = if p.m_other > 0 { p.span } else { 0 };
    if communities.len() < span + 1 {
        return Err(Error::Unsatisfiable(format!(
            "need {} communities, membership has {}",
            span + 1,
            communities.len()
        )));
    }
    let eligible: Vec<u64> =
        communities.iter().filter(|(_, members)| members.len() >= p.n_same).map(|(&c, _)| c).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let &seed_comm = eligible
        .choose(&mut rng)
        .ok_or_else(|| Error::Unsatisfiable(format!("no community has {} members", p.n_same)))?;

    let mut query: Vec<Vertex> = communities[&seed_comm].choose_multiple(&mut rng, p.n_same).copied().collect();

    if p.m_other > 0 {
        let others: Vec<u64> = communities.keys().copied().filter(|&c| c != seed_comm).collect();
        let mut chosen: Vec<u64> = others.choose_multiple(&mut rng, span).copied().collect();
        chosen.sort_unstable();
        let mut pool = Vec::new();
        for c in &chosen {
            let members = &communities[c];
            let pick = *members.choose(&mut rng).expect("communities are non-empty");
            query.push(pick);
            pool.extend(members.iter().copied().filter(|&v| v != pick));
        }
        let rest = p.m_other - span;
        if pool.len() < rest {
            return Err(Error::Unsatisfiable(format!(
                "the {span} chosen communities hold only {} vertices, need {}",
                pool.len() + span,
                p.m_other
            )));
        }
        query.extend(pool.choose_multiple(&mut rng, rest).copied());
    }
    query.sort_unstable();
    Ok(query)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolutionMetrics {
    pub size: usize,
    pub diameter: usize,
    pub min_degree: usize,
    pub query_hits: usize,
    /// Average local clustering coefficient; vertices of degree below two
    /// contribute zero.
    pub avg_local_clustering: f64,
    /// `2m / (n (n - 1))`, and 0 for a single vertex.
    pub density: f64,
    pub runtime_ms: f64,
}

/// Metrics of the community induced by a feasible solution.
pub fn solution_metrics(g: &graph::Graph, sol: &Solution, qs: &QuerySet, runtime_ms: f64) -> Result<SolutionMetrics> {
    if !sol.feasible {
        return Err(Error::Domain("metrics requested for an unfeasible solution".into()));
    }
    let sub = induced_subgraph(g, &sol.vertices)?;
    let h = &sub.graph;
    let n = h.n();
    let diameter = diameter_exact(h);
    if diameter == graph::INFINITE {
        return Err(Error::Domain("solution is not connected".into()));
    }
    let density = if n < 2 { 0.0 } else { 2.0 * h.m() as f64 / (n as f64 * (n as f64 - 1.0)) };
    Ok(SolutionMetrics {
        size: n,
        diameter: diameter as usize,
        min_degree: graph::min_degree(h)?,
        query_hits: sol.vertices.iter().filter(|&&v| qs.contains(v)).count(),
        avg_local_clustering: average_clustering(h),
        density,
        runtime_ms,
    })
}

/// Mean over vertices of `triangles(v) / C(deg(v), 2)`.
pub fn average_clustering(h: &graph::Graph) -> f64 {
    if h.n() == 0 {
        return 0.0;
    }
    let mut mark = vec![false; h.n()];
    let mut total = 0.0;
    for v in h.vertices() {
        let nb = h.neighbors(v);
        let d = nb.len();
        if d < 2 {
            continue;
        }
        for &u in nb {
            mark[u] = true;
        }
        // Each triangle through v is seen from both of its other corners.
        let twice: usize = nb.iter().map(|&u| h.neighbors(u).iter().filter(|&&w| mark[w]).count()).sum();
        for &u in nb {
            mark[u] = false;
        }
        total += (twice / 2) as f64 / (d * (d - 1) / 2) as f64;
    }
    total / h.n() as f64
}

/// Where the query sets of a sweep come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuerySource {
    /// The same original-id query set in every repetition.
    Fixed(Vec<u64>),
    /// Drawn per repetition with seed `seed + repetition`.
    Generated { n_same: usize, m_other: usize, span: usize },
}

/// Parameter values of a sweep. `VertexCount` stands for `|V|`, the
/// unbounded setting of the distance constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamValue {
    Fixed(usize),
    VertexCount,
}

impl ParamValue {
    fn resolve(self, n: usize) -> usize {
        match self {
            ParamValue::Fixed(p) => p,
            ParamValue::VertexCount => n,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub graph: Option<PathBuf>,
    pub communities: Option<PathBuf>,
    pub variant: Variant,
    pub params: Vec<ParamValue>,
    pub ks: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub queries: QuerySource,
    pub solve: SolveConfig,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            graph: None,
            communities: None,
            variant: Variant::MaxMinDegDist,
            params: vec![ParamValue::VertexCount],
            ks: vec![0],
            reps: 10,
            seed: 42,
            queries: QuerySource::Generated { n_same: 10, m_other: 20, span: 20 },
            solve: SolveConfig::default(),
            out: None,
        }
    }
}

impl ExperimentConfig {
    /// Parses flat `key=value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                cfg.apply(line)?;
            }
        }
        Ok(cfg)
    }

    /// Applies one `key=value` setting.
    pub fn apply(&mut self, setting: &str) -> Result<()> {
        let (key, value) =
            setting.split_once('=').ok_or_else(|| Error::Config(format!("expected key=value, got {setting:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| Error::Config(format!("{key}: invalid {what} {value:?}"));
        let (mut n_same, mut m_other, mut span) = match self.queries {
            QuerySource::Generated { n_same, m_other, span } => (n_same, m_other, span),
            QuerySource::Fixed(_) => (10, 20, 20),
        };
        match key {
            "graph" => self.graph = Some(value.into()),
            "communities" => self.communities = Some(value.into()),
            "variant" => self.variant = value.parse().map_err(|_| bad("variant"))?,
            "param" => {
                self.params = parse_list(value)
                    .map_err(|_| bad("parameter list"))?
                    .into_iter()
                    .map(|p| p.map_or(ParamValue::VertexCount, ParamValue::Fixed))
                    .collect()
            }
            "k" => {
                self.ks = parse_list(value)
                    .map_err(|_| bad("k list"))?
                    .into_iter()
                    .map(|k| k.ok_or_else(|| bad("k list")))
                    .collect::<Result<_>>()?
            }
            "reps" => self.reps = value.parse().map_err(|_| bad("count"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            "queries" => {
                let ids = value
                    .split(',')
                    .map(|t| t.trim().parse::<u64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad("id list"))?;
                self.queries = QuerySource::Fixed(ids);
                return Ok(());
            }
            "n_same" => n_same = value.parse().map_err(|_| bad("count"))?,
            "m_other" => m_other = value.parse().map_err(|_| bad("count"))?,
            "span" => span = value.parse().map_err(|_| bad("count"))?,
            "all_starts" => self.solve.all_starts = value.parse().map_err(|_| bad("flag"))?,
            "prune" => self.solve.use_pruning = value.parse().map_err(|_| bad("flag"))?,
            "out" => self.out = Some(value.into()),
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        if matches!(key, "n_same" | "m_other" | "span") {
            self.queries = QuerySource::Generated { n_same, m_other, span };
        }
        Ok(())
    }
}

/// `3`, `0..5` (inclusive), `1,2,4`, or `n` for the vertex count (`None`).
fn parse_list(value: &str) -> std::result::Result<Vec<Option<usize>>, ()> {
    let mut out = Vec::new();
    for part in value.split(',') {
        let part = part.trim();
        if part == "n" {
            out.push(None);
        } else if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| ())?;
            let b: usize = b.trim().parse().map_err(|_| ())?;
            if a > b {
                return Err(());
            }
            out.extend((a..=b).map(Some));
        } else {
            out.push(Some(part.parse().map_err(|_| ())?));
        }
    }
    Ok(out)
}

/// One averaged sweep cell. Means are over feasible repetitions and are
/// `None` when none was feasible.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub variant: Variant,
    pub param: usize,
    pub k: usize,
    pub reps: usize,
    pub mean_size: Option<f64>,
    pub mean_diameter: Option<f64>,
    pub mean_min_degree: Option<f64>,
    pub mean_query_hits: Option<f64>,
    pub mean_cc: Option<f64>,
    pub mean_runtime_ms: Option<f64>,
    pub unfeasible_count: usize,
}

pub const CSV_HEADER: &str = "variant,param,k,reps,mean_size,mean_diameter,mean_min_degree,mean_query_hits,mean_cc,mean_runtime_ms,unfeasible_count";

impl SweepRow {
    pub fn to_csv(&self) -> String {
        let f = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.variant,
            self.param,
            self.k,
            self.reps,
            f(self.mean_size),
            f(self.mean_diameter),
            f(self.mean_min_degree),
            f(self.mean_query_hits),
            f(self.mean_cc),
            f(self.mean_runtime_ms),
            self.unfeasible_count
        )
    }
}

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{}", r.to_csv());
    }
    out
}

/// Loads the files named in `cfg` and runs the sweep.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let path = cfg.graph.as_ref().ok_or_else(|| Error::Config("missing graph=<path>".into()))?;
    let lg = graph::load_edge_list(BufReader::new(open(path)?))?;
    let membership = match &cfg.communities {
        Some(p) => Some(load_communities_for(BufReader::new(open(p)?), &lg)?),
        None => None,
    };
    run_sweep_on(&lg, membership.as_ref(), cfg)
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Per-repetition query vertices (dense ids), or the reason there are none.
fn queries_for(
    lg: &LabeledGraph,
    membership: Option<&CommunityMembership>,
    cfg: &ExperimentConfig,
    rep: usize,
) -> Result<Vec<Vertex>> {
    match &cfg.queries {
        QuerySource::Fixed(ids) => ids
            .iter()
            .map(|&id| lg.dense_id(id).ok_or_else(|| Error::Config(format!("query vertex {id} not in graph"))))
            .collect(),
        QuerySource::Generated { n_same, m_other, span } => {
            let membership =
                membership.ok_or_else(|| Error::Config("query generation needs communities=<path>".into()))?;
            let params = QueryGenParams {
                n_same: *n_same,
                m_other: *m_other,
                span: *span,
                seed: cfg.seed.wrapping_add(rep as u64),
            };
            generate_query(lg.graph.n(), membership, &params)
        }
    }
}

/// Runs every `(param, k, repetition)` cell and averages per `(param, k)`.
/// Rows come out ordered by parameter, then `k`.
pub fn run_sweep_on(
    lg: &LabeledGraph,
    membership: Option<&CommunityMembership>,
    cfg: &ExperimentConfig,
) -> Result<Vec<SweepRow>> {
    if cfg.reps == 0 {
        return Err(Error::Config("reps must be at least 1".into()));
    }
    let g = &lg.graph;
    let queries: Vec<Vec<Vertex>> =
        (0..cfg.reps).map(|r| queries_for(lg, membership, cfg, r)).collect::<Result<_>>()?;

    let mut cells = Vec::new();
    for &pv in &cfg.params {
        for &k in &cfg.ks {
            cells.push((pv.resolve(g.n()), k));
        }
    }
    cells.sort_unstable();
    cells.dedup();

    cells
        .par_iter()
        .map(|&(param, k)| {
            let spec = ProblemSpec::new(cfg.variant, param)?;
            let mut feasible: Vec<SolutionMetrics> = Vec::new();
            let mut unfeasible = 0;
            for (rep, q) in queries.iter().enumerate() {
                let qs = match QuerySet::new(g, q.iter().copied(), k) {
                    Ok(qs) => qs,
                    Err(e) => {
                        log::warn!("{} param={param} k={k} rep={rep}: {e}", cfg.variant);
                        unfeasible += 1;
                        continue;
                    }
                };
                let start = Instant::now();
                let sol = solve(g, &qs, &spec, &cfg.solve)?;
                let ms = start.elapsed().as_secs_f64() * 1e3;
                if sol.feasible {
                    feasible.push(solution_metrics(g, &sol, &qs, ms)?);
                } else {
                    unfeasible += 1;
                }
            }
            let mean = |f: fn(&SolutionMetrics) -> f64| {
                (!feasible.is_empty()).then(|| feasible.iter().map(f).sum::<f64>() / feasible.len() as f64)
            };
            Ok(SweepRow {
                variant: cfg.variant,
                param,
                k,
                reps: cfg.reps,
                mean_size: mean(|m| m.size as f64),
                mean_diameter: mean(|m| m.diameter as f64),
                mean_min_degree: mean(|m| m.min_degree as f64),
                mean_query_hits: mean(|m| m.query_hits as f64),
                mean_cc: mean(|m| m.avg_local_clustering),
                mean_runtime_ms: mean(|m| m.runtime_ms),
                unfeasible_count: unfeasible,
            })
        })
        .collect()
}
