//! Undirected simple graphs, edge-list ingestion and degree-based growth order.
//!
//! Nodes carry opaque string labels. Internally every node is addressed by a
//! dense index in order of first appearance; adjacency lists are kept sorted so
//! that membership tests and common-neighbor counts are merge operations.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("cannot read edge list {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: expected two whitespace-separated labels, got {content:?}")]
    Malformed { line: usize, content: String },
    #[error("unknown node label {0:?}")]
    UnknownLabel(String),
    #[error("graph has no nodes")]
    Empty,
    #[error("common neighbors requested for a node and itself ({0:?})")]
    SamePair(String),
}

/// What was discarded while building a graph from raw edges.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub lines: usize,
    pub self_loops: usize,
    pub duplicate_edges: usize,
}

/// Undirected simple graph.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from labelled endpoint pairs, dropping self-loops and
    /// repeated edges.
    pub fn from_edges<I, S>(edges: I) -> (Self, LoadReport)
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut builder = GraphBuilder::default();
        for (a, b) in edges {
            builder.push(a.as_ref(), b.as_ref());
        }
        builder.finish()
    }

    /// Builds a graph on nodes labelled `"1".."n"` from zero-based index pairs.
    pub fn from_index_edges(n: usize, edges: &[(usize, usize)]) -> (Self, LoadReport) {
        let mut builder = GraphBuilder::default();
        for v in 1..=n {
            builder.node(&v.to_string());
        }
        for &(a, b) in edges {
            builder.push_index(a, b);
        }
        builder.finish()
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_index(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn require(&self, label: &str) -> Result<usize, GraphError> {
        self.node_index(label)
            .ok_or_else(|| GraphError::UnknownLabel(label.to_string()))
    }

    /// Sorted neighbor indices of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn average_degree(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            2.0 * self.edge_count as f64 / self.node_count() as f64
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = if self.adjacency[u].len() <= self.adjacency[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Number of shared neighbors of two distinct nodes.
    pub fn common_neighbors(&self, u: usize, v: usize) -> usize {
        sorted_intersection_len(&self.adjacency[u], &self.adjacency[v])
    }

    pub fn common_neighbors_by_label(&self, u: &str, v: &str) -> Result<usize, GraphError> {
        if u == v {
            return Err(GraphError::SamePair(u.to_string()));
        }
        let a = self.require(u)?;
        let b = self.require(v)?;
        Ok(self.common_neighbors(a, b))
    }

    /// Each undirected edge once, as `(smaller index, larger index)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Mean local clustering coefficient; nodes of degree < 2 count as zero.
    pub fn average_clustering(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        let mut total = 0.0;
        for (v, ns) in self.adjacency.iter().enumerate() {
            let k = ns.len();
            if k < 2 {
                continue;
            }
            let mut links = 0usize;
            for &u in ns {
                // count each triangle edge once: only neighbors after u
                links += self.adjacency[u]
                    .iter()
                    .filter(|&&w| w > u && w != v && ns.binary_search(&w).is_ok())
                    .count();
            }
            total += 2.0 * links as f64 / (k * (k - 1)) as f64;
        }
        total / self.node_count() as f64
    }

    /// Node indices of the largest connected component, ascending. Among
    /// equally large components the one holding the smallest index wins.
    pub fn largest_component(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut best: Vec<usize> = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut head = 0;
            while head < comp.len() {
                let v = comp[head];
                head += 1;
                for &u in &self.adjacency[v] {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                    }
                }
            }
            if comp.len() > best.len() {
                best = comp;
            }
        }
        best.sort_unstable();
        best
    }

    /// Adds every label not yet present as an isolated node; returns how many
    /// were added.
    pub fn add_isolated<'a>(&mut self, labels: impl IntoIterator<Item = &'a str>) -> usize {
        let before = self.labels.len();
        for label in labels {
            if !self.index.contains_key(label) {
                self.index.insert(label.to_string(), self.labels.len());
                self.labels.push(label.to_string());
                self.adjacency.push(Vec::new());
            }
        }
        self.labels.len() - before
    }

    /// Writes one label per line, in index order.
    pub fn write_node_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for label in &self.labels {
            writeln!(out, "{label}")?;
        }
        Ok(())
    }

    /// Writes one `label label` line per edge, in index order.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(out, "{} {}", self.labels[u], self.labels[v])?;
        }
        Ok(())
    }
}

pub(crate) fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

#[derive(Default)]
struct GraphBuilder {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    pairs: Vec<(usize, usize)>,
    report: LoadReport,
}

impl GraphBuilder {
    fn node(&mut self, label: &str) -> usize {
        if let Some(&v) = self.index.get(label) {
            return v;
        }
        let v = self.labels.len();
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), v);
        v
    }

    fn push(&mut self, a: &str, b: &str) {
        let u = self.node(a);
        let v = self.node(b);
        self.push_index(u, v);
    }

    fn push_index(&mut self, u: usize, v: usize) {
        if u == v {
            self.report.self_loops += 1;
        } else {
            self.pairs.push((u.min(v), u.max(v)));
        }
    }

    fn finish(mut self) -> (Graph, LoadReport) {
        let raw = self.pairs.len();
        self.pairs.sort_unstable();
        self.pairs.dedup();
        self.report.duplicate_edges = raw - self.pairs.len();
        let mut adjacency = vec![Vec::new(); self.labels.len()];
        for &(u, v) in &self.pairs {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for ns in &mut adjacency {
            ns.sort_unstable();
        }
        let graph = Graph {
            labels: self.labels,
            index: self.index,
            adjacency,
            edge_count: self.pairs.len(),
        };
        (graph, self.report)
    }
}

/// Parses the edge-list text format: two whitespace-separated labels per line,
/// `#` comment lines and blank lines ignored.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<(Graph, LoadReport), GraphError> {
    let mut builder = GraphBuilder::default();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| GraphError::Io {
            path: "<reader>".into(),
            source,
        })?;
        builder.report.lines += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => builder.push(a, b),
            _ => {
                return Err(GraphError::Malformed {
                    line: n + 1,
                    content: line,
                })
            }
        }
    }
    Ok(builder.finish())
}

pub fn load_edge_list(path: impl AsRef<Path>) -> Result<(Graph, LoadReport), GraphError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| GraphError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_edge_list(BufReader::new(file)).map_err(|e| match e {
        GraphError::Io { source, .. } => GraphError::Io {
            path: path.display().to_string(),
            source,
        },
        other => other,
    })
}

/// Reads a node list: one label per line, `#` comments and blank lines ignored.
pub fn parse_node_list<R: BufRead>(reader: R) -> Result<Vec<String>, GraphError> {
    let mut labels = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| GraphError::Io {
            path: "<reader>".into(),
            source,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if trimmed.split_whitespace().nth(1).is_some() {
            return Err(GraphError::Malformed {
                line: n + 1,
                content: line,
            });
        }
        labels.push(trimmed.to_string());
    }
    Ok(labels)
}

/// Birth order inferred from degrees: rank 1 is the highest-degree node.
///
/// Equal degrees are ordered by ascending label so that repeated runs agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthSchedule {
    /// `order[r - 1]` is the node index born at rank `r`.
    order: Vec<usize>,
    /// `rank[v]` is the 1-based birth rank of node index `v`.
    rank: Vec<usize>,
}

impl GrowthSchedule {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// 1-based rank of node index `v`.
    pub fn rank_of(&self, v: usize) -> usize {
        self.rank[v]
    }

    /// Node index born at 1-based rank `r`.
    pub fn node_at(&self, r: usize) -> usize {
        self.order[r - 1]
    }

    pub fn rank_of_label(&self, g: &Graph, label: &str) -> Result<usize, GraphError> {
        Ok(self.rank[g.require(label)?])
    }

    pub fn label_of<'g>(&self, g: &'g Graph, r: usize) -> &'g str {
        g.label(self.order[r - 1])
    }

    /// Node indices in birth order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }
}

/// Adjacency re-indexed by 1-based birth rank; slot 0 is unused.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RankedAdjacency {
    neighbors: Vec<Vec<usize>>,
}

impl RankedAdjacency {
    pub fn new(g: &Graph, schedule: &GrowthSchedule) -> Self {
        let mut neighbors = vec![Vec::new(); g.node_count() + 1];
        for (r, &v) in schedule.order().iter().enumerate() {
            let mut adj: Vec<usize> = g
                .neighbors(v)
                .iter()
                .map(|&u| schedule.rank_of(u))
                .collect();
            adj.sort_unstable();
            neighbors[r + 1] = adj;
        }
        Self { neighbors }
    }

    /// Builds the adjacency of `n` ranks directly from 1-based rank pairs.
    pub fn from_rank_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut neighbors = vec![Vec::new(); n + 1];
        for &(a, b) in edges {
            if a != b {
                neighbors[a].push(b);
                neighbors[b].push(a);
            }
        }
        for adj in &mut neighbors {
            adj.sort_unstable();
            adj.dedup();
        }
        Self { neighbors }
    }

    /// Number of ranks.
    pub fn len(&self) -> usize {
        self.neighbors.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sorted neighbor ranks of rank `r`.
    pub fn neighbors(&self, r: usize) -> &[usize] {
        &self.neighbors[r]
    }

    pub fn degree(&self, r: usize) -> usize {
        self.neighbors[r].len()
    }

    pub fn linked(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].binary_search(&b).is_ok()
    }

    pub fn common_neighbors(&self, a: usize, b: usize) -> usize {
        sorted_intersection_len(&self.neighbors[a], &self.neighbors[b])
    }

    /// Neighbor ranks of `r` that are older than `r`.
    pub fn older_neighbors(&self, r: usize) -> &[usize] {
        let adj = &self.neighbors[r];
        &adj[..adj.partition_point(|&u| u < r)]
    }
}

pub fn rank_by_degree(g: &Graph) -> Result<GrowthSchedule, GraphError> {
    if g.is_empty() {
        return Err(GraphError::Empty);
    }
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by(|&a, &b| {
        g.degree(b)
            .cmp(&g.degree(a))
            .then_with(|| g.label(a).cmp(g.label(b)))
    });
    let mut rank = vec![0; order.len()];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r + 1;
    }
    Ok(GrowthSchedule { order, rank })
}
