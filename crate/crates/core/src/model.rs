//! Unit-length discrete models of metric graphs, and the divisors that
//! live on them.
//!
//! A [`Model`] at refinement `k` replaces every edge of length `l` by a
//! path of `k*l` unit edges. Interior lattice points on the edge with
//! index `i` are named `e{i}@{j}/{k*l}` for `j = 1 .. k*l-1`; together with
//! the base vertices these are the model's vertices, kept sorted so that
//! index order is lexicographic identifier order. Divisors are dense chip
//! vectors indexed by model vertex.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::MetricGraph;

/// Where a model vertex sits on the base graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coordinate {
    /// A vertex of the base graph, by base index.
    Base(usize),
    /// Interior lattice point: `step / (k * length)` of the way along
    /// `edge` from its `a` endpoint.
    Interior { edge: usize, step: u32 },
}

/// A unit-edge-length refinement of a [`MetricGraph`].
#[derive(Debug, Clone)]
pub struct Model {
    base: MetricGraph,
    refinement: u32,
    vertices: Vec<String>,
    coordinates: Vec<Coordinate>,
    unit_edges: Vec<(u32, u32)>,
    adjacency: Vec<Vec<u32>>,
}

impl PartialEq for Model {
    fn eq(&self, other: &Self) -> bool {
        self.refinement == other.refinement && self.base == other.base
    }
}
impl Eq for Model {}

impl Model {
    /// Refine `graph` so every edge of length `l` becomes `k*l` unit edges.
    pub fn refine(graph: &MetricGraph, k: u32) -> Result<Arc<Model>> {
        if k == 0 {
            return Err(Error::BadRefinement);
        }
        let mut names: Vec<(String, Coordinate)> = Vec::new();
        for (i, id) in graph.vertex_ids().iter().enumerate() {
            names.push((id.clone(), Coordinate::Base(i)));
        }
        for (i, e) in graph.edges().iter().enumerate() {
            let segments = k * e.length;
            for j in 1..segments {
                names.push((
                    format!("e{i}@{j}/{segments}"),
                    Coordinate::Interior { edge: i, step: j },
                ));
            }
        }
        names.sort_by(|x, y| x.0.cmp(&y.0));
        let vertices: Vec<String> = names.iter().map(|(n, _)| n.clone()).collect();
        let coordinates: Vec<Coordinate> = names.iter().map(|(_, c)| *c).collect();
        let lookup = |id: &str| -> u32 {
            vertices
                .binary_search_by(|v| v.as_str().cmp(id))
                .expect("model vertex") as u32
        };
        let mut unit_edges = Vec::new();
        for (i, e) in graph.edges().iter().enumerate() {
            let segments = k * e.length;
            let mut prev = lookup(graph.vertex_id(e.a));
            for j in 1..segments {
                let here = lookup(&format!("e{i}@{j}/{segments}"));
                unit_edges.push((prev, here));
                prev = here;
            }
            unit_edges.push((prev, lookup(graph.vertex_id(e.b))));
        }
        let mut adjacency = vec![Vec::new(); vertices.len()];
        for &(a, b) in &unit_edges {
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
        }
        Ok(Arc::new(Model {
            base: graph.clone(),
            refinement: k,
            vertices,
            coordinates,
            unit_edges,
            adjacency,
        }))
    }

    pub fn base(&self) -> &MetricGraph {
        &self.base
    }

    pub fn refinement(&self) -> u32 {
        self.refinement
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

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

    /// Coordinate of every model vertex; inverse of the naming scheme.
    pub fn coordinate(&self, index: usize) -> Coordinate {
        self.coordinates[index]
    }

    /// Model index of a base-graph vertex.
    pub fn base_vertex(&self, base_index: usize) -> usize {
        self.vertex_index(self.base.vertex_id(base_index))
            .expect("base vertex present in model")
    }

    /// Indices of model vertices that are base-graph vertices.
    pub fn base_vertex_indices(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| matches!(self.coordinates[v], Coordinate::Base(_)))
            .collect()
    }

    pub fn unit_edges(&self) -> &[(u32, u32)] {
        &self.unit_edges
    }

    /// Unit-edge neighbors of a vertex, with multiplicity.
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[v]
    }

    pub fn valence(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn genus(&self) -> u64 {
        (self.unit_edges.len() + 1 - self.vertices.len()) as u64
    }

    /// Unit-edge BFS distances from `source`.
    pub fn distances_from(&self, source: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.vertices.len()];
        dist[source] = 0;
        let mut queue = std::collections::VecDeque::new();
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[v] + 1;
                    queue.push_back(w as usize);
                }
            }
        }
        dist
    }

    /// The zero divisor on this model.
    pub fn zero_divisor(self: &Arc<Self>) -> Divisor {
        Divisor {
            model: Arc::clone(self),
            chips: vec![0; self.vertices.len()],
        }
    }

    /// Build a divisor from `(vertex id, chips)` pairs; repeated ids
    /// accumulate.
    pub fn divisor<S: AsRef<str>>(self: &Arc<Self>, pairs: &[(S, i64)]) -> Result<Divisor> {
        let mut d = self.zero_divisor();
        for (id, amount) in pairs {
            let v = self.vertex_index(id.as_ref())?;
            d.chips[v] += amount;
        }
        Ok(d)
    }

    /// Divisor from a dense chip vector.
    pub fn divisor_from_chips(self: &Arc<Self>, chips: Vec<i64>) -> Divisor {
        assert_eq!(chips.len(), self.vertices.len());
        Divisor {
            model: Arc::clone(self),
            chips,
        }
    }

    /// The canonical divisor: `valence(v) - 2` chips at every vertex.
    /// Its degree is `2g - 2`.
    pub fn canonical_divisor(self: &Arc<Self>) -> Divisor {
        let chips = (0..self.vertices.len())
            .map(|v| self.adjacency[v].len() as i64 - 2)
            .collect();
        Divisor {
            model: Arc::clone(self),
            chips,
        }
    }
}

/// An integer chip count on every vertex of a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divisor {
    model: Arc<Model>,
    chips: Vec<i64>,
}

impl Divisor {
    pub fn model(&self) -> &Arc<Model> {
        &self.model
    }

    pub fn chips(&self) -> &[i64] {
        &self.chips
    }

    pub fn chips_mut(&mut self) -> &mut [i64] {
        &mut self.chips
    }

    pub fn chip_count(&self, v: usize) -> i64 {
        self.chips[v]
    }

    pub fn degree(&self) -> i64 {
        self.chips.iter().sum()
    }

    /// Vertices with nonzero chips, in index (= lexicographic) order.
    pub fn support(&self) -> Vec<usize> {
        (0..self.chips.len()).filter(|&v| self.chips[v] != 0).collect()
    }

    pub fn is_effective(&self) -> bool {
        self.chips.iter().all(|&c| c >= 0)
    }

    pub fn is_effective_away_from(&self, v: usize) -> bool {
        self.chips
            .iter()
            .enumerate()
            .all(|(w, &c)| w == v || c >= 0)
    }

    /// `self - other`, where both live on the same model.
    pub fn checked_sub(&self, other: &Divisor) -> Result<Divisor> {
        if self.model != other.model {
            return Err(Error::ModelMismatch);
        }
        let chips = self
            .chips
            .iter()
            .zip(&other.chips)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Divisor {
            model: Arc::clone(&self.model),
            chips,
        })
    }

    /// Human-readable `id:chips` support listing, mainly for messages.
    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .support()
            .into_iter()
            .map(|v| format!("{}:{}", self.model.vertex_id(v), self.chips[v]))
            .collect();
        if parts.is_empty() {
            "0".to_owned()
        } else {
            parts.join(" ")
        }
    }
}
