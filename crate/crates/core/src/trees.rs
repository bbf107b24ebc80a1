//! Graphs glued from three trees along a shared root set.
//!
//! Three trees `T1, T2, T3`, pairwise disjoint except for a common set `V`
//! of `n >= 3` root vertices, glue to a connected graph of genus `2n - 2`.
//! Placing one chip on each root yields a divisor of degree `n` and rank
//! exactly one: a fire from any point is repelled by the roots, while
//! subtracting one root chip twice empties the linear system.
//!
//! [`find_tree_decomposition`] searches for such a structure inside a
//! given graph by backtracking over edge 3-colorings; each color class
//! must stay acyclic, and every vertex must end up monochromatic (interior
//! to one tree) or incident to all three colors (a root).
//! [`conjecture_scan`] explores edge-length assignments of a fixed
//! decomposition shape, recording metric girth against gonality.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gonality::{gonality, GonalityConfig};
use crate::graph::{Girth, GirthMode, MetricGraph};
use crate::model::{Divisor, Model};
use crate::rank::has_positive_rank;

/// Three trees sharing exactly a root vertex set.
#[derive(Debug, Clone)]
pub struct TreeDecomposition {
    roots: Vec<String>,
    trees: [MetricGraph; 3],
}

impl TreeDecomposition {
    /// Validate and build. Roots are kept in the given order.
    pub fn new(roots: Vec<String>, trees: [MetricGraph; 3]) -> Result<Self> {
        if roots.len() < 3 {
            return Err(Error::BadDecomposition(
                "a decomposition needs at least 3 roots".into(),
            ));
        }
        let root_set: BTreeSet<&str> = roots.iter().map(String::as_str).collect();
        if root_set.len() != roots.len() {
            return Err(Error::BadDecomposition("duplicate root".into()));
        }
        let vertex_sets: Vec<BTreeSet<&str>> = trees
            .iter()
            .map(|t| t.vertex_ids().iter().map(String::as_str).collect())
            .collect();
        for (i, t) in trees.iter().enumerate() {
            if t.edge_count() + 1 != t.vertex_count() {
                return Err(Error::BadDecomposition(format!(
                    "piece {} is not a tree",
                    i + 1
                )));
            }
            if !root_set.iter().all(|r| vertex_sets[i].contains(r)) {
                return Err(Error::BadDecomposition(format!(
                    "piece {} is missing a root",
                    i + 1
                )));
            }
        }
        for i in 0..3 {
            for j in i + 1..3 {
                let overlap: BTreeSet<&str> =
                    vertex_sets[i].intersection(&vertex_sets[j]).copied().collect();
                if overlap != root_set {
                    return Err(Error::BadDecomposition(format!(
                        "pieces {} and {} must meet exactly in the roots",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(TreeDecomposition { roots, trees })
    }

    pub fn roots(&self) -> &[String] {
        &self.roots
    }

    pub fn trees(&self) -> &[MetricGraph; 3] {
        &self.trees
    }

    /// Number of edges across the three trees (= edges of the glued graph).
    pub fn edge_count(&self) -> usize {
        self.trees.iter().map(MetricGraph::edge_count).sum()
    }

    /// Glue the trees along the roots. Edges appear in tree order
    /// (all of T1, then T2, then T3), which fixes the glued edge ids.
    pub fn glue(&self) -> MetricGraph {
        let mut edges: Vec<(String, String, u32)> = Vec::new();
        for tree in &self.trees {
            for e in tree.edges() {
                edges.push((
                    tree.vertex_id(e.a).to_owned(),
                    tree.vertex_id(e.b).to_owned(),
                    e.length,
                ));
            }
        }
        let list: Vec<(&str, &str, u32)> = edges
            .iter()
            .map(|(a, b, l)| (a.as_str(), b.as_str(), *l))
            .collect();
        let glued = MetricGraph::new(None, &[] as &[&str], &list)
            .expect("validated decomposition glues to a connected graph");
        debug_assert_eq!(glued.genus(), 2 * self.roots.len() as u64 - 2);
        glued
    }

    /// One chip on every root, as a divisor on the glued model at
    /// refinement `k`. Degree `n`, rank one.
    pub fn root_divisor(&self, k: u32) -> Result<Divisor> {
        let model = Model::refine(&self.glue(), k)?;
        let pairs: Vec<(&str, i64)> = self.roots.iter().map(|r| (r.as_str(), 1)).collect();
        model.divisor(&pairs)
    }

    /// Same combinatorial shape with new edge lengths, given in glued
    /// edge order.
    pub fn with_lengths(&self, lengths: &[u32]) -> Result<TreeDecomposition> {
        if lengths.len() != self.edge_count() {
            return Err(Error::Invalid(format!(
                "expected {} lengths, got {}",
                self.edge_count(),
                lengths.len()
            )));
        }
        let mut offset = 0;
        let mut trees: Vec<MetricGraph> = Vec::with_capacity(3);
        for tree in &self.trees {
            let slice = &lengths[offset..offset + tree.edge_count()];
            offset += tree.edge_count();
            let edges: Vec<(&str, &str, u32)> = tree
                .edges()
                .iter()
                .zip(slice)
                .map(|(e, &l)| (tree.vertex_id(e.a), tree.vertex_id(e.b), l))
                .collect();
            trees.push(MetricGraph::new(tree.name(), &[] as &[&str], &edges)?);
        }
        TreeDecomposition::new(self.roots.clone(), [trees[0].clone(), trees[1].clone(), trees[2].clone()])
    }

    /// Current lengths in glued edge order.
    pub fn lengths(&self) -> Vec<u32> {
        self.trees
            .iter()
            .flat_map(|t| t.edges().iter().map(|e| e.length))
            .collect()
    }
}

/// Union-find with an undo log, for acyclicity pruning.
struct RewindDsu {
    parent: Vec<u32>,
    log: Vec<u32>,
}

impl RewindDsu {
    fn new(n: usize) -> Self {
        RewindDsu {
            parent: (0..n as u32).collect(),
            log: Vec::new(),
        }
    }

    fn find(&self, mut v: u32) -> u32 {
        while self.parent[v as usize] != v {
            v = self.parent[v as usize];
        }
        v
    }

    /// Returns false (and records nothing) if the endpoints were already
    /// connected.
    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra as usize] = rb;
        self.log.push(ra);
        true
    }

    fn mark(&self) -> usize {
        self.log.len()
    }

    fn rewind(&mut self, mark: usize) {
        while self.log.len() > mark {
            let v = self.log.pop().expect("log entry");
            self.parent[v as usize] = v;
        }
    }
}

/// Search for a tree decomposition of `graph` rooted on `n` vertices.
///
/// Backtracks over edge 3-colorings in edge order with colors tried in
/// ascending order, pruning on per-color acyclicity and on vertex color
/// budgets (at most `n` vertices may see two or more colors, and a fully
/// colored vertex must see exactly one or exactly three). Returns the
/// first valid decomposition in lexicographic color order, or `None`.
pub fn find_tree_decomposition(graph: &MetricGraph, n: usize) -> Result<Option<TreeDecomposition>> {
    if n < 3 {
        return Err(Error::Invalid("root count must be at least 3".into()));
    }
    // Each tree spans all `n` roots, so it has at least n-1 edges.
    if graph.edge_count() < 3 * (n - 1) {
        return Ok(None);
    }
    let vertex_count = graph.vertex_count();
    let mut search = ColoringSearch {
        graph,
        target_roots: n,
        colors: vec![u8::MAX; graph.edge_count()],
        dsu: [
            RewindDsu::new(vertex_count),
            RewindDsu::new(vertex_count),
            RewindDsu::new(vertex_count),
        ],
        seen_colors: vec![0u8; vertex_count],
        uncolored_degree: (0..vertex_count).map(|v| graph.valence(v) as u32).collect(),
        multi_color_vertices: 0,
        max_color_used: 0,
    };
    if !search.descend(0) {
        return Ok(None);
    }
    let decomposition = search.extract()?;
    Ok(Some(decomposition))
}

struct ColoringSearch<'g> {
    graph: &'g MetricGraph,
    target_roots: usize,
    colors: Vec<u8>,
    dsu: [RewindDsu; 3],
    seen_colors: Vec<u8>,
    uncolored_degree: Vec<u32>,
    multi_color_vertices: usize,
    max_color_used: u8,
}

impl ColoringSearch<'_> {
    fn descend(&mut self, edge: usize) -> bool {
        if edge == self.graph.edge_count() {
            return self.is_valid_leaf();
        }
        let e = &self.graph.edges()[edge];
        let (a, b) = (e.a, e.b);
        // Color permutations are symmetric; restricting each edge to at
        // most one fresh color still reaches the lexicographically least
        // solution first.
        let limit = (self.max_color_used + 1).min(2);
        for color in 0..=limit {
            let mark = self.dsu[color as usize].mark();
            if !self.dsu[color as usize].union(a as u32, b as u32) {
                continue;
            }
            let saved_max = self.max_color_used;
            self.max_color_used = self.max_color_used.max(color);
            let saved_seen = (self.seen_colors[a], self.seen_colors[b]);
            let saved_multi = self.multi_color_vertices;
            self.uncolored_degree[a] -= 1;
            self.uncolored_degree[b] -= 1;
            let mut feasible = true;
            for v in [a, b] {
                let before = self.seen_colors[v];
                let after = before | (1 << color);
                self.seen_colors[v] = after;
                if before.count_ones() <= 1 && after.count_ones() == 2 {
                    self.multi_color_vertices += 1;
                }
                let colors_seen = after.count_ones();
                let remaining = self.uncolored_degree[v];
                if colors_seen == 2 && remaining == 0 {
                    feasible = false;
                }
                if colors_seen == 2 && colors_seen + remaining < 3 {
                    feasible = false;
                }
            }
            if self.multi_color_vertices > self.target_roots {
                feasible = false;
            }
            if feasible {
                self.colors[edge] = color;
                if self.descend(edge + 1) {
                    return true;
                }
                self.colors[edge] = u8::MAX;
            }
            self.seen_colors[a] = saved_seen.0;
            self.seen_colors[b] = saved_seen.1;
            self.multi_color_vertices = saved_multi;
            self.max_color_used = saved_max;
            self.uncolored_degree[a] += 1;
            self.uncolored_degree[b] += 1;
            self.dsu[color as usize].rewind(mark);
        }
        false
    }

    fn is_valid_leaf(&self) -> bool {
        let roots: Vec<usize> = (0..self.graph.vertex_count())
            .filter(|&v| self.seen_colors[v].count_ones() == 3)
            .collect();
        if roots.len() != self.target_roots {
            return false;
        }
        if (0..self.graph.vertex_count()).any(|v| self.seen_colors[v].count_ones() == 2) {
            return false;
        }
        // Each color class must be one tree containing every root:
        // acyclicity is enforced incrementally, so a class with
        // |vertices| = |edges| + 1 whose roots share one component works.
        for color in 0..3u8 {
            let mut vertices = BTreeSet::new();
            let mut edge_count = 0;
            for (i, e) in self.graph.edges().iter().enumerate() {
                if self.colors[i] == color {
                    vertices.insert(e.a);
                    vertices.insert(e.b);
                    edge_count += 1;
                }
            }
            if vertices.len() != edge_count + 1 {
                return false;
            }
            let lead = roots[0] as u32;
            if !roots
                .iter()
                .all(|&r| self.dsu[color as usize].find(r as u32) == self.dsu[color as usize].find(lead))
            {
                return false;
            }
            if !roots.iter().all(|&r| vertices.contains(&r)) {
                return false;
            }
        }
        true
    }

    fn extract(&self) -> Result<TreeDecomposition> {
        let mut roots: Vec<String> = (0..self.graph.vertex_count())
            .filter(|&v| self.seen_colors[v].count_ones() == 3)
            .map(|v| self.graph.vertex_id(v).to_owned())
            .collect();
        roots.sort();
        let mut trees = Vec::new();
        for color in 0..3u8 {
            let edges: Vec<(&str, &str, u32)> = self
                .graph
                .edges()
                .iter()
                .enumerate()
                .filter(|(i, _)| self.colors[*i] == color)
                .map(|(_, e)| (self.graph.vertex_id(e.a), self.graph.vertex_id(e.b), e.length))
                .collect();
            trees.push(MetricGraph::new(None, &[] as &[&str], &edges)?);
        }
        TreeDecomposition::new(roots, [trees[0].clone(), trees[1].clone(), trees[2].clone()])
    }
}

/// A decomposition with random tree shapes, for property suites: `n`
/// roots, up to `max_tree_vertices` vertices per tree, lengths in
/// `1..=max_length`.
pub fn random_decomposition<R: Rng>(
    rng: &mut R,
    n: usize,
    max_tree_vertices: usize,
    max_length: u32,
) -> TreeDecomposition {
    assert!(n >= 3 && max_tree_vertices >= n);
    let roots: Vec<String> = (1..=n).map(|i| format!("r{i}")).collect();
    let mut trees = Vec::new();
    for t in 1..=3 {
        let extras = rng.gen_range(0..=max_tree_vertices - n);
        let mut vertices: Vec<String> = roots.clone();
        vertices.extend((1..=extras).map(|j| format!("t{t}x{j}")));
        vertices.shuffle(rng);
        // Random attachment tree over the shuffled vertex list.
        let mut edges: Vec<(String, String, u32)> = Vec::new();
        for i in 1..vertices.len() {
            let parent = rng.gen_range(0..i);
            let length = rng.gen_range(1..=max_length);
            edges.push((vertices[parent].clone(), vertices[i].clone(), length));
        }
        let list: Vec<(&str, &str, u32)> = edges
            .iter()
            .map(|(a, b, l)| (a.as_str(), b.as_str(), *l))
            .collect();
        trees.push(MetricGraph::new(None, &[] as &[&str], &list).unwrap());
    }
    TreeDecomposition::new(roots, [trees[0].clone(), trees[1].clone(), trees[2].clone()])
        .expect("randomly generated decomposition is valid")
}

/// Gonality outcome for one scanned length assignment.
#[derive(Debug, Clone)]
pub enum ScanGonality {
    /// Full search finished: the exact gonality and its witness.
    Exact { value: i64, witness: String },
    /// Search space too large; the root divisor still bounds gonality.
    AtMost { bound: i64, witness: String },
}

impl ScanGonality {
    pub fn bound(&self) -> i64 {
        match self {
            ScanGonality::Exact { value, .. } => *value,
            ScanGonality::AtMost { bound, .. } => *bound,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ScanGonality::Exact { .. })
    }

    pub fn witness(&self) -> &str {
        match self {
            ScanGonality::Exact { witness, .. } | ScanGonality::AtMost { witness, .. } => witness,
        }
    }
}

/// One row of a conjecture scan report.
#[derive(Debug, Clone)]
pub struct ScanRow {
    /// Edge lengths in glued edge order.
    pub lengths: Vec<u32>,
    /// Metric girth of the glued graph.
    pub girth: Girth,
    pub gonality: ScanGonality,
    /// Gonality (or its bound) dropped below the root count.
    pub low_gonality: bool,
    /// Girth equals the maximum over all scanned assignments.
    pub girth_maximal: bool,
}

/// Scan report over length assignments of one decomposition shape.
#[derive(Debug, Clone)]
pub struct ScanReport {
    pub root_count: usize,
    pub budget: u64,
    pub rows: Vec<ScanRow>,
}

/// Scan parameters.
#[derive(Debug, Clone)]
pub struct ScanConfig {
    /// Total length distributed over the edges; at least the edge count.
    pub budget: u64,
    /// Number of sampled assignments (ignored when `enumerate`).
    pub samples: usize,
    pub seed: u64,
    /// Enumerate all assignments instead of sampling.
    pub enumerate: bool,
    /// Candidate budget above which gonality is reported as a bound.
    pub search_limit: u64,
}

impl ScanConfig {
    pub fn new(budget: u64, samples: usize) -> Self {
        ScanConfig {
            budget,
            samples,
            seed: 0,
            enumerate: false,
            search_limit: 500_000,
        }
    }
}

/// Explore length assignments of the decomposition shape: for each
/// assignment of positive integer lengths summing to the budget, record
/// the metric girth of the glued graph and a gonality value or bound.
/// Rows are sorted by length vector and deduplicated, so the report is
/// deterministic for a fixed seed.
pub fn conjecture_scan(shape: &TreeDecomposition, config: &ScanConfig) -> Result<ScanReport> {
    let edges = shape.edge_count();
    if config.budget < edges as u64 {
        return Err(Error::Invalid(format!(
            "budget {} cannot cover {} edges",
            config.budget, edges
        )));
    }
    let n = shape.roots().len();
    let extra = (config.budget - edges as u64) as usize;

    let mut assignments: BTreeSet<Vec<u32>> = BTreeSet::new();
    if config.enumerate {
        enumerate_compositions(extra, edges, &mut Vec::new(), &mut assignments);
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        for _ in 0..config.samples {
            let mut lengths = vec![1u32; edges];
            for _ in 0..extra {
                lengths[rng.gen_range(0..edges)] += 1;
            }
            assignments.insert(lengths);
        }
    }

    let mut rows = Vec::new();
    for lengths in assignments {
        let decomposition = shape.with_lengths(&lengths)?;
        let glued = decomposition.glue();
        let girth = glued.girth(GirthMode::Metric);
        let model_vertices = glued.total_length() + glued.vertex_count() as u64
            - glued.edge_count() as u64;
        let candidates: u64 = (1..n as u64).map(|d| binomial(model_vertices + d - 1, d)).sum();
        let gonality_outcome = if candidates <= config.search_limit {
            let cert = gonality(&glued, &GonalityConfig::new(n as i64, 1))?;
            ScanGonality::Exact {
                value: cert.value,
                witness: cert.witness.describe(),
            }
        } else {
            let root = decomposition.root_divisor(1)?;
            debug_assert!(has_positive_rank(&root));
            ScanGonality::AtMost {
                bound: n as i64,
                witness: root.describe(),
            }
        };
        rows.push(ScanRow {
            lengths,
            girth,
            low_gonality: gonality_outcome.bound() < n as i64,
            gonality: gonality_outcome,
            girth_maximal: false,
        });
    }
    let max_girth = rows
        .iter()
        .filter_map(|r| match r.girth {
            Girth::Finite(g) => Some(g),
            Girth::Infinite => None,
        })
        .max();
    for row in &mut rows {
        row.girth_maximal = matches!((row.girth, max_girth), (Girth::Finite(g), Some(m)) if g == m);
    }
    Ok(ScanReport {
        root_count: n,
        budget: config.budget,
        rows,
    })
}

fn enumerate_compositions(
    extra: usize,
    slots: usize,
    prefix: &mut Vec<u32>,
    out: &mut BTreeSet<Vec<u32>>,
) {
    if prefix.len() == slots - 1 {
        let mut lengths: Vec<u32> = prefix.iter().map(|&x| x + 1).collect();
        lengths.push(extra as u32 + 1);
        out.insert(lengths);
        return;
    }
    for here in 0..=extra {
        prefix.push(here as u32);
        enumerate_compositions(extra - here, slots, prefix, out);
        prefix.pop();
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    let mut result: u64 = 1;
    for i in 0..k {
        result = result.saturating_mul(n - i) / (i + 1);
    }
    result
}
