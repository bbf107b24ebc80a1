//! Metric graphs: finite connected multigraphs with positive integer edge
//! lengths.
//!
//! Vertices are identified by opaque strings and stored sorted, so vertex
//! *index* order always agrees with lexicographic identifier order. Edges
//! keep their insertion order; the edge at position `i` has the stable
//! identifier `e{i}`, which the lattice-point naming scheme of
//! [`crate::model::Model`] builds on.
//!
//! Loop edges are rejected: callers subdivide them first. Parallel edges
//! are allowed.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// An edge between two vertices, with a positive integer length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    /// Index of the first endpoint.
    pub a: usize,
    /// Index of the second endpoint.
    pub b: usize,
    /// Length in abstract units, at least 1.
    pub length: u32,
}

/// A finite connected multigraph with positive integer edge lengths.
///
/// Immutable after construction; all invariants (connectivity, no loops,
/// lengths >= 1) are checked by [`MetricGraph::new`]. Equality compares
/// vertices and edges; the display name is presentation metadata.
#[derive(Debug, Clone)]
pub struct MetricGraph {
    name: Option<String>,
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

impl PartialEq for MetricGraph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}
impl Eq for MetricGraph {}

/// Girth measurement mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GirthMode {
    /// Count edges along the shortest cycle.
    Combinatorial,
    /// Sum edge lengths along the shortest cycle.
    Metric,
}

/// Shortest cycle length, or the marker for acyclic graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Girth {
    Finite(u64),
    /// The graph is a tree: no cycle exists.
    Infinite,
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(g) => write!(f, "{g}"),
            Girth::Infinite => write!(f, "infinity"),
        }
    }
}

impl MetricGraph {
    /// Build a graph from named edges `(a, b, length)` plus any isolated
    /// vertex declarations. Vertex identifiers are sorted internally.
    pub fn new<S: AsRef<str>, T: AsRef<str>>(
        name: Option<&str>,
        declared_vertices: &[S],
        edge_list: &[(T, T, u32)],
    ) -> Result<Self> {
        let mut ids: BTreeSet<&str> = declared_vertices.iter().map(|s| s.as_ref()).collect();
        for (a, b, _) in edge_list {
            ids.insert(a.as_ref());
            ids.insert(b.as_ref());
        }
        let vertices: Vec<String> = ids.into_iter().map(str::to_owned).collect();
        if vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let index = |id: &str| -> Result<usize> {
            vertices
                .binary_search_by(|v| v.as_str().cmp(id))
                .map_err(|_| Error::UnknownVertex(id.to_owned()))
        };
        let mut edges = Vec::with_capacity(edge_list.len());
        for (a, b, length) in edge_list {
            let (a, b) = (a.as_ref(), b.as_ref());
            if a == b {
                return Err(Error::LoopEdge {
                    vertex: a.to_owned(),
                });
            }
            if *length == 0 {
                return Err(Error::BadEdgeLength { got: 0 });
            }
            edges.push(Edge {
                a: index(a)?,
                b: index(b)?,
                length: *length,
            });
        }
        let graph = MetricGraph {
            name: name.map(str::to_owned),
            vertices,
            edges,
        };
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(graph)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Vertex identifiers in lexicographic (= index) order.
    pub fn vertex_ids(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_id(&self, index: usize) -> &str {
        &self.vertices[index]
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.vertices
            .binary_search_by(|v| v.as_str().cmp(id))
            .map_err(|_| Error::UnknownVertex(id.to_owned()))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Total length of all edges.
    pub fn total_length(&self) -> u64 {
        self.edges.iter().map(|e| e.length as u64).sum()
    }

    /// First Betti number `|E| - |V| + 1`.
    ///
    /// Connectivity is guaranteed by construction, so this never underflows.
    pub fn genus(&self) -> u64 {
        (self.edges.len() + 1 - self.vertices.len()) as u64
    }

    /// Number of edge endpoints at `v`, counting parallel edges.
    pub fn valence(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|e| (e.a == v) as usize + (e.b == v) as usize)
            .sum()
    }

    fn is_connected(&self) -> bool {
        let n = self.vertices.len();
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.a].push(e.b);
            adj[e.b].push(e.a);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    /// Length of the shortest cycle, or [`Girth::Infinite`] for trees.
    ///
    /// Every cycle passes through some edge, so the scan removes each edge
    /// in turn and asks for the shortest remaining path between its
    /// endpoints (Dijkstra with the mode's weights). Parallel edges give
    /// honest 2-cycles in combinatorial mode.
    pub fn girth(&self, mode: GirthMode) -> Girth {
        let n = self.vertices.len();
        let weight = |e: &Edge| -> u64 {
            match mode {
                GirthMode::Combinatorial => 1,
                GirthMode::Metric => e.length as u64,
            }
        };
        let mut best: Option<u64> = None;
        for (skip, e) in self.edges.iter().enumerate() {
            let mut dist = vec![u64::MAX; n];
            dist[e.a] = 0;
            // Dijkstra over the multigraph minus edge `skip`.
            let mut done = vec![false; n];
            loop {
                let mut u = usize::MAX;
                let mut du = u64::MAX;
                for v in 0..n {
                    if !done[v] && dist[v] < du {
                        du = dist[v];
                        u = v;
                    }
                }
                if u == usize::MAX || u == e.b {
                    break;
                }
                done[u] = true;
                for (j, f) in self.edges.iter().enumerate() {
                    if j == skip {
                        continue;
                    }
                    let other = if f.a == u {
                        f.b
                    } else if f.b == u {
                        f.a
                    } else {
                        continue;
                    };
                    let cand = du.saturating_add(weight(f));
                    if cand < dist[other] {
                        dist[other] = cand;
                    }
                }
            }
            if dist[e.b] != u64::MAX {
                let cycle = dist[e.b] + weight(e);
                best = Some(best.map_or(cycle, |b| b.min(cycle)));
            }
        }
        match best {
            Some(g) => Girth::Finite(g),
            None => Girth::Infinite,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn path3() -> MetricGraph {
        MetricGraph::new(None, &[] as &[&str], &[("a", "b", 1), ("b", "c", 1)]).unwrap()
    }

    #[test]
    fn genus_of_named_graphs() {
        assert_eq!(corpus::k33().genus(), 4);
        assert_eq!(corpus::petersen().genus(), 6);
        assert_eq!(corpus::heawood().genus(), 8);
        assert_eq!(corpus::pappus().genus(), 10);
        let single = MetricGraph::new(None, &[] as &[&str], &[("a", "b", 1)]).unwrap();
        assert_eq!(single.genus(), 0);
    }

    #[test]
    fn loops_and_zero_lengths_rejected() {
        let err = MetricGraph::new(None, &[] as &[&str], &[("a", "a", 1)]).unwrap_err();
        assert!(matches!(err, Error::LoopEdge { .. }));
        let err = MetricGraph::new(None, &[] as &[&str], &[("a", "b", 0)]).unwrap_err();
        assert!(matches!(err, Error::BadEdgeLength { .. }));
    }

    #[test]
    fn disconnected_rejected() {
        let err =
            MetricGraph::new(None, &[] as &[&str], &[("a", "b", 1), ("c", "d", 1)]).unwrap_err();
        assert!(matches!(err, Error::Disconnected));
    }

    /// Exhaustive simple-cycle enumeration, used as an independent oracle
    /// for the Dijkstra-based girth.
    fn girth_by_cycle_enumeration(g: &MetricGraph, mode: GirthMode) -> Girth {
        // Walk all simple paths from every start vertex; close a cycle when
        // an edge returns to the start. Fine for corpus-sized graphs.
        fn dfs(
            g: &MetricGraph,
            mode: GirthMode,
            start: usize,
            v: usize,
            used_edges: &mut Vec<bool>,
            on_path: &mut Vec<bool>,
            len: u64,
            best: &mut Option<u64>,
        ) {
            for (i, e) in g.edges().iter().enumerate() {
                if used_edges[i] {
                    continue;
                }
                let w = if e.a == v {
                    e.b
                } else if e.b == v {
                    e.a
                } else {
                    continue;
                };
                let step = match mode {
                    GirthMode::Combinatorial => 1,
                    GirthMode::Metric => e.length as u64,
                };
                if w == start && len > 0 {
                    let total = len + step;
                    if total >= 2 || matches!(mode, GirthMode::Metric) {
                        *best = Some(best.map_or(total, |b| b.min(total)));
                    }
                    continue;
                }
                if on_path[w] || w == start {
                    continue;
                }
                used_edges[i] = true;
                on_path[w] = true;
                dfs(g, mode, start, w, used_edges, on_path, len + step, best);
                on_path[w] = false;
                used_edges[i] = false;
            }
        }
        let mut best = None;
        for start in 0..g.vertex_count() {
            let mut used = vec![false; g.edge_count()];
            let mut on_path = vec![false; g.vertex_count()];
            dfs(g, mode, start, start, &mut used, &mut on_path, 0, &mut best);
        }
        match best {
            Some(b) => Girth::Finite(b),
            None => Girth::Infinite,
        }
    }

    #[test]
    fn girth_matches_cycle_enumeration_oracle() {
        for g in [corpus::k33(), corpus::petersen(), corpus::wheel4(1, 1, 1, 2, 3)] {
            for mode in [GirthMode::Combinatorial, GirthMode::Metric] {
                assert_eq!(g.girth(mode), girth_by_cycle_enumeration(&g, mode));
            }
        }
    }

    #[test]
    fn girth_of_named_graphs() {
        assert_eq!(corpus::k33().girth(GirthMode::Combinatorial), Girth::Finite(4));
        assert_eq!(corpus::k33().girth(GirthMode::Metric), Girth::Finite(4));
        assert_eq!(
            corpus::petersen().girth(GirthMode::Combinatorial),
            Girth::Finite(5)
        );
        assert_eq!(
            corpus::heawood().girth(GirthMode::Combinatorial),
            Girth::Finite(6)
        );
        assert_eq!(
            corpus::pappus().girth(GirthMode::Combinatorial),
            Girth::Finite(6)
        );
    }

    #[test]
    fn trees_have_infinite_girth() {
        assert_eq!(path3().girth(GirthMode::Combinatorial), Girth::Infinite);
        assert_eq!(path3().girth(GirthMode::Metric), Girth::Infinite);
    }

    #[test]
    fn parallel_edges_make_a_two_cycle() {
        let g = MetricGraph::new(None, &[] as &[&str], &[("a", "b", 1), ("a", "b", 3)]).unwrap();
        assert_eq!(g.girth(GirthMode::Combinatorial), Girth::Finite(2));
        assert_eq!(g.girth(GirthMode::Metric), Girth::Finite(4));
        assert_eq!(g.genus(), 1);
    }
}
