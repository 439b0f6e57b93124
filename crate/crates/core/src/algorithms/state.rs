use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{Removal, RemovalReason};
use crate::graph::{Graph, Vertex};

/// Mutable working copy of a graph during one peel: alive set, current
/// degrees, running counters and the removal log. The host graph is only
/// read.
pub(super) struct PeelState<'g> {
    pub g: &'g Graph,
    pub alive: Vec<bool>,
    pub degree: Vec<usize>,
    pub is_query: Vec<bool>,
    pub alive_count: usize,
    pub edge_count: usize,
    pub alive_queries: usize,
    pub removals: Vec<Removal>,
    /// Lazy min-heap over `(degree, id)`; entries go stale when a vertex
    /// dies or its degree drops.
    heap: Option<BinaryHeap<Reverse<(usize, Vertex)>>>,
}

impl<'g> PeelState<'g> {
    pub fn new(g: &'g Graph, is_query: Vec<bool>, with_heap: bool) -> Self {
        let degree: Vec<usize> = g.vertices().map(|v| g.degree(v)).collect();
        let alive_queries = is_query.iter().filter(|&&q| q).count();
        let heap = with_heap.then(|| degree.iter().enumerate().map(|(v, &d)| Reverse((d, v))).collect());
        Self {
            g,
            alive: vec![true; g.n()],
            degree,
            is_query,
            alive_count: g.n(),
            edge_count: g.m(),
            alive_queries,
            removals: Vec::new(),
            heap,
        }
    }

    /// Number of removals so far; the current graph is `G_step`.
    pub fn step(&self) -> usize {
        self.removals.len()
    }

    /// Deletes `v` and returns its degree at the moment of deletion.
    /// `on_drop` sees every neighbour whose degree was decremented, with
    /// its new degree.
    pub fn remove_with(&mut self, v: Vertex, reason: RemovalReason, mut on_drop: impl FnMut(Vertex, usize)) -> usize {
        debug_assert!(self.alive[v]);
        self.alive[v] = false;
        self.alive_count -= 1;
        if self.is_query[v] {
            self.alive_queries -= 1;
        }
        let d = self.degree[v];
        self.edge_count -= d;
        for &w in self.g.neighbors(v) {
            if self.alive[w] {
                self.degree[w] -= 1;
                if let Some(heap) = self.heap.as_mut() {
                    heap.push(Reverse((self.degree[w], w)));
                }
                on_drop(w, self.degree[w]);
            }
        }
        self.removals.push(Removal { step: self.removals.len() + 1, vertex: v, reason });
        d
    }

    pub fn remove(&mut self, v: Vertex, reason: RemovalReason) -> usize {
        self.remove_with(v, reason, |_, _| {})
    }

    /// Alive vertex of minimum degree, smallest id among ties.
    pub fn min_degree_vertex(&mut self) -> Option<Vertex> {
        let heap = self.heap.as_mut().expect("peel state built without degree heap");
        while let Some(&Reverse((d, v))) = heap.peek() {
            if self.alive[v] && self.degree[v] == d {
                return Some(v);
            }
            heap.pop();
        }
        None
    }
}
