//! Immutable undirected simple graph plus the traversal primitives the
//! peeling algorithms and the oracle are built on.
//!
//! Distances are unweighted hop counts. Pairs in different components are
//! at distance [`INFINITE`], which compares greater than every real distance.

use std::collections::VecDeque;
use std::io::BufRead;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub type Vertex = usize;
pub type Distance = u32;

/// Sentinel for "unreachable". Strictly larger than any hop count a graph
/// with fewer than `u32::MAX` vertices can produce.
pub const INFINITE: Distance = Distance::MAX;

/// Per-vertex distances from a BFS source (or source set).
pub type DistanceArray = Vec<Distance>;

/// Undirected simple graph over dense vertex ids `0..n`, stored as sorted
/// adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<Vertex>>,
    m: usize,
}

impl Graph {
    /// `n` isolated vertices.
    pub fn empty(n: usize) -> Self {
        Self { adjacency: vec![Vec::new(); n], m: 0 }
    }

    /// Builds a graph from an edge list. Self-loops and repeated edges are
    /// dropped; `(u, v)` and `(v, u)` are the same edge.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                continue;
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        let mut twice_m = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            twice_m += list.len();
        }
        Ok(Self { adjacency, m: twice_m / 2 })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v]
    }

    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.n()
    }

    /// Each edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub(crate) fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n() })
        }
    }

    /// Full scan of the representation invariants: symmetric, simple,
    /// sorted, in range, and `m` consistent with the adjacency lists.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let n = self.n();
        let mut total = 0;
        for (u, list) in self.adjacency.iter().enumerate() {
            total += list.len();
            for w in list.windows(2) {
                if w[0] >= w[1] {
                    return Err(format!("neighbors of {u} not strictly sorted"));
                }
            }
            for &v in list {
                if v >= n {
                    return Err(format!("neighbor {v} of {u} out of range"));
                }
                if v == u {
                    return Err(format!("self-loop at {u}"));
                }
                if !self.has_edge(v, u) {
                    return Err(format!("edge {u}-{v} not mirrored"));
                }
            }
        }
        if total != 2 * self.m {
            return Err(format!("m = {} but adjacency holds {total} endpoints", self.m));
        }
        Ok(())
    }
}

/// A graph loaded from a file, with the original (possibly sparse) ids of
/// its dense vertices. `labels` is sorted ascending, so dense order follows
/// original order.
#[derive(Clone, Debug)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: Vec<u64>,
}

impl LabeledGraph {
    pub fn dense_id(&self, original: u64) -> Option<Vertex> {
        self.labels.binary_search(&original).ok()
    }

    pub fn original_id(&self, v: Vertex) -> u64 {
        self.labels[v]
    }
}

/// Reads a whitespace-separated edge list. Lines starting with `#` or `%`
/// and blank lines are skipped; tokens after the second on a line are
/// ignored (SNAP files sometimes carry weights or timestamps).
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<LabeledGraph> {
    let mut raw = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let mut next_id = || -> Result<u64> {
            let tok = tokens
                .next()
                .ok_or_else(|| Error::Parse { line: lineno, message: "expected two vertex ids".into() })?;
            tok.parse::<u64>().map_err(|_| Error::Parse { line: lineno, message: format!("invalid vertex id {tok:?}") })
        };
        let u = next_id()?;
        let v = next_id()?;
        raw.push((u, v));
    }

    let mut labels: Vec<u64> = raw.iter().flat_map(|&(u, v)| [u, v]).collect();
    labels.sort_unstable();
    labels.dedup();
    let dense = |x: u64| labels.binary_search(&x).expect("label collected above");
    let edges: Vec<(Vertex, Vertex)> = raw.iter().map(|&(u, v)| (dense(u), dense(v))).collect();
    let graph = Graph::from_edges(labels.len(), edges)?;
    Ok(LabeledGraph { graph, labels })
}

pub fn parse_edge_list(text: &str) -> Result<LabeledGraph> {
    load_edge_list(text.as_bytes())
}

/// Single-source BFS.
pub fn bfs_distances(g: &Graph, source: Vertex) -> Result<DistanceArray> {
    g.check_vertex(source)?;
    Ok(masked_bfs(g, &[source], None))
}

/// Distance from each vertex to its nearest source, via one multi-source
/// sweep.
pub fn multi_source_distances(g: &Graph, sources: &[Vertex]) -> Result<DistanceArray> {
    if sources.is_empty() {
        return Err(Error::Domain("multi-source BFS needs at least one source".into()));
    }
    for &s in sources {
        g.check_vertex(s)?;
    }
    Ok(masked_bfs(g, sources, None))
}

/// BFS restricted to vertices with `alive[v]` (all vertices when `alive` is
/// `None`). Dead vertices and dead sources keep distance [`INFINITE`].
pub(crate) fn masked_bfs(g: &Graph, sources: &[Vertex], alive: Option<&[bool]>) -> DistanceArray {
    let mut dist = vec![INFINITE; g.n()];
    let mut queue = VecDeque::new();
    masked_bfs_into(g, sources, alive, &mut dist, &mut queue);
    dist
}

pub(crate) fn masked_bfs_into(
    g: &Graph,
    sources: &[Vertex],
    alive: Option<&[bool]>,
    dist: &mut [Distance],
    queue: &mut VecDeque<Vertex>,
) {
    let is_alive = |v: Vertex| alive.is_none_or(|a| a[v]);
    dist.fill(INFINITE);
    queue.clear();
    for &s in sources {
        if is_alive(s) && dist[s] != 0 {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let du = dist[u] + 1;
        for &v in g.neighbors(u) {
            if dist[v] == INFINITE && is_alive(v) {
                dist[v] = du;
                queue.push_back(v);
            }
        }
    }
}

/// Component label per vertex. Labels are dense, numbered in order of the
/// smallest vertex id they contain.
pub fn connected_components(g: &Graph) -> Vec<usize> {
    masked_components(g, None).0
}

/// Components of the subgraph induced by `alive`. Dead vertices get
/// `usize::MAX`. Returns the labels and the number of components.
pub(crate) fn masked_components(g: &Graph, alive: Option<&[bool]>) -> (Vec<usize>, usize) {
    let is_alive = |v: Vertex| alive.is_none_or(|a| a[v]);
    let mut label = vec![usize::MAX; g.n()];
    let mut stack = Vec::new();
    let mut count = 0;
    for s in g.vertices() {
        if label[s] != usize::MAX || !is_alive(s) {
            continue;
        }
        label[s] = count;
        stack.push(s);
        while let Some(u) = stack.pop() {
            for &v in g.neighbors(u) {
                if label[v] == usize::MAX && is_alive(v) {
                    label[v] = count;
                    stack.push(v);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

/// An induced subgraph together with its order-preserving relabelling.
#[derive(Clone, Debug)]
pub struct Subgraph {
    pub graph: Graph,
    /// `kept[new] = old`, ascending.
    pub kept: Vec<Vertex>,
}

impl Subgraph {
    pub fn to_new(&self, old: Vertex) -> Option<Vertex> {
        self.kept.binary_search(&old).ok()
    }

    pub fn to_old(&self, new: Vertex) -> Vertex {
        self.kept[new]
    }
}

/// Subgraph induced by `keep` (duplicates ignored), relabelled to
/// `0..|keep|` preserving the original order.
pub fn induced_subgraph(g: &Graph, keep: &[Vertex]) -> Result<Subgraph> {
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    for &v in &kept {
        g.check_vertex(v)?;
    }
    let mut new_id = vec![usize::MAX; g.n()];
    for (i, &v) in kept.iter().enumerate() {
        new_id[v] = i;
    }
    let mut m2 = 0;
    let adjacency: Vec<Vec<Vertex>> = kept
        .iter()
        .map(|&old| {
            // Already sorted: `new_id` is monotone over kept vertices.
            let list: Vec<Vertex> =
                g.neighbors(old).iter().filter_map(|&w| (new_id[w] != usize::MAX).then_some(new_id[w])).collect();
            m2 += list.len();
            list
        })
        .collect();
    Ok(Subgraph { graph: Graph { adjacency, m: m2 / 2 }, kept })
}

/// Largest finite entry of a distance array, or [`INFINITE`] if any entry is.
fn eccentricity_of(dist: &[Distance]) -> Distance {
    dist.iter().copied().max().unwrap_or(0)
}

/// Exact diameter by one BFS per vertex. `INFINITE` for a disconnected
/// graph, 0 for a single vertex and for the empty graph.
pub fn diameter_exact(g: &Graph) -> Distance {
    let n = g.n();
    if n <= 1 {
        return 0;
    }
    if connected_components(g).iter().any(|&c| c != 0) {
        return INFINITE;
    }
    let ecc = |s: Vertex| eccentricity_of(&masked_bfs(g, &[s], None));
    if n >= 512 {
        g.vertices().into_par_iter().map(ecc).max().unwrap_or(0)
    } else {
        g.vertices().map(ecc).max().unwrap_or(0)
    }
}

pub fn min_degree(g: &Graph) -> Result<usize> {
    g.vertices().map(|v| g.degree(v)).min().ok_or_else(|| Error::Domain("minimum degree of an empty graph".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, edges: &[(Vertex, Vertex)]) -> Graph {
        Graph::from_edges(n, edges.iter().copied()).unwrap()
    }

    fn triangle_pendant() -> Graph {
        g(4, &[(0, 1), (1, 2), (2, 0), (0, 3)])
    }

    #[test]
    fn load_triangle() {
        let lg = parse_edge_list("0 1\n1 2\n2 0").unwrap();
        assert_eq!((lg.graph.n(), lg.graph.m()), (3, 3));
        lg.graph.validate().unwrap();
    }

    #[test]
    fn load_dedupes_and_drops_self_loops() {
        let lg = parse_edge_list("0 1\n1 0\n0 0").unwrap();
        assert_eq!((lg.graph.n(), lg.graph.m()), (2, 1));
        assert!(lg.graph.has_edge(0, 1));
    }

    #[test]
    fn load_empty_and_comments() {
        let lg = parse_edge_list("").unwrap();
        assert_eq!((lg.graph.n(), lg.graph.m()), (0, 0));
        let lg = parse_edge_list("# header\n% other\n\n0 1\n").unwrap();
        assert_eq!(lg.graph.m(), 1);
    }

    #[test]
    fn load_compacts_sparse_ids() {
        let lg = parse_edge_list("10 30\n30 7\n").unwrap();
        assert_eq!(lg.labels, vec![7, 10, 30]);
        assert_eq!(lg.dense_id(30), Some(2));
        assert_eq!(lg.original_id(0), 7);
        assert!(lg.graph.has_edge(0, 2) && lg.graph.has_edge(1, 2));
        assert_eq!(lg.dense_id(8), None);
    }

    #[test]
    fn load_reports_bad_line() {
        let err = parse_edge_list("0 1\n# ok\n2 x\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_edge_list("5\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_edge_list("-1 2\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn bfs_examples() {
        let path = g(3, &[(0, 1), (1, 2)]);
        assert_eq!(bfs_distances(&path, 0).unwrap(), vec![0, 1, 2]);
        let split = g(3, &[(0, 1)]);
        assert_eq!(bfs_distances(&split, 0).unwrap(), vec![0, 1, INFINITE]);
        assert_eq!(bfs_distances(&triangle_pendant(), 2).unwrap(), vec![1, 1, 0, 2]);
        assert!(matches!(bfs_distances(&path, 3), Err(Error::VertexOutOfRange { .. })));
    }

    #[test]
    fn multi_source_examples() {
        let path = g(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(multi_source_distances(&path, &[0, 3]).unwrap(), vec![0, 1, 1, 0]);
        assert_eq!(multi_source_distances(&path, &[0, 1, 2, 3]).unwrap(), vec![0; 4]);
        let star = g(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        assert_eq!(multi_source_distances(&star, &[1, 2]).unwrap(), vec![1, 0, 0, 2, 2]);
        assert!(matches!(multi_source_distances(&star, &[]), Err(Error::Domain(_))));
    }

    #[test]
    fn components_examples() {
        assert_eq!(connected_components(&Graph::empty(3)), vec![0, 1, 2]);
        assert_eq!(connected_components(&g(3, &[(0, 1), (1, 2), (2, 0)])), vec![0, 0, 0]);
        assert_eq!(connected_components(&g(4, &[(0, 1), (2, 3)])), vec![0, 0, 1, 1]);
        assert_eq!(connected_components(&g(4, &[(3, 1), (2, 0)])), vec![0, 1, 0, 1]);
    }

    #[test]
    fn induced_examples() {
        let tri = g(3, &[(0, 1), (1, 2), (2, 0)]);
        let sub = induced_subgraph(&tri, &[0, 1]).unwrap();
        assert_eq!(sub.graph.m(), 1);
        assert_eq!(sub.kept, vec![0, 1]);

        let k4 = g(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        let all = induced_subgraph(&k4, &[3, 2, 1, 0]).unwrap();
        assert_eq!(all.graph, k4);
        let sub = induced_subgraph(&k4, &[1, 2, 3]).unwrap();
        assert_eq!((sub.graph.n(), sub.graph.m()), (3, 3));
        assert_eq!(sub.to_new(3), Some(2));
        assert_eq!(sub.to_new(0), None);
        sub.graph.validate().unwrap();

        assert!(induced_subgraph(&k4, &[4]).is_err());
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(diameter_exact(&g(3, &[(0, 1), (1, 2), (2, 0)])), 1);
        assert_eq!(diameter_exact(&g(5, &[(0, 1), (1, 2), (2, 3), (3, 4)])), 4);
        assert_eq!(diameter_exact(&g(4, &[(0, 1), (2, 3)])), INFINITE);
        assert_eq!(diameter_exact(&Graph::empty(1)), 0);
        assert_eq!(diameter_exact(&Graph::empty(0)), 0);
    }

    #[test]
    fn min_degree_examples() {
        assert_eq!(min_degree(&g(3, &[(0, 1), (1, 2), (2, 0)])).unwrap(), 2);
        assert_eq!(min_degree(&g(5, &[(0, 1), (0, 2), (0, 3), (0, 4)])).unwrap(), 1);
        let k4 = g(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(min_degree(&k4).unwrap(), 3);
        assert!(min_degree(&Graph::empty(0)).is_err());
    }

    #[test]
    fn masked_bfs_skips_dead_vertices() {
        let path = g(4, &[(0, 1), (1, 2), (2, 3)]);
        let alive = [true, false, true, true];
        assert_eq!(masked_bfs(&path, &[0, 3], Some(&alive)), vec![0, INFINITE, 1, 0]);
        let (labels, c) = masked_components(&path, Some(&alive));
        assert_eq!(c, 2);
        assert_eq!(labels, vec![0, usize::MAX, 1, 1]);
    }
}
