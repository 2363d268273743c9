//! Finite simple graphs with canonical vertex and edge ordering, BFS distance
//! machinery, path validation, and the square operator.
//!
//! Vertices are bare non-negative integers. Construction canonicalizes: the
//! vertex list is ascending, every edge is stored once as `(u, v)` with
//! `u < v` in lexicographic order, so equal graphs compare equal field by
//! field and serialize identically downstream.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Vertex identifier. Ids need not be contiguous.
pub type VertexId = u32;

/// Errors raised by graph construction and lookups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphError {
    UnknownVertex(VertexId),
    DuplicateVertex(VertexId),
    SelfLoop(VertexId),
    DuplicateEdge(VertexId, VertexId),
    EmptyPath,
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::UnknownVertex(v) => write!(f, "unknown vertex id {v}"),
            GraphError::DuplicateVertex(v) => write!(f, "vertex id {v} listed twice"),
            GraphError::SelfLoop(v) => write!(f, "self-loop at vertex {v}"),
            GraphError::DuplicateEdge(u, v) => write!(f, "edge ({u}, {v}) listed twice"),
            GraphError::EmptyPath => write!(f, "path must contain at least one vertex"),
        }
    }
}

/// Immutable finite simple undirected graph.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteGraph {
    vertices: Vec<VertexId>,
    edges: Vec<(VertexId, VertexId)>,
    labels: BTreeMap<VertexId, String>,
    adj: Vec<Vec<VertexId>>,
}

impl fmt::Debug for FiniteGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FiniteGraph {{ n: {}, m: {} }}",
            self.vertices.len(),
            self.edges.len()
        )
    }
}

impl FiniteGraph {
    /// Builds a graph from arbitrary vertex and edge iterators.
    ///
    /// Input order is irrelevant; the result is canonical. Self-loops,
    /// duplicate vertices, duplicate (possibly reversed) edges and edges with
    /// unknown endpoints are rejected.
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator<Item = VertexId>,
        E: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut vs: Vec<VertexId> = vertices.into_iter().collect();
        vs.sort_unstable();
        for w in vs.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateVertex(w[0]));
            }
        }

        let mut es: Vec<(VertexId, VertexId)> = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            for v in [a, b] {
                if vs.binary_search(&v).is_err() {
                    return Err(GraphError::UnknownVertex(v));
                }
            }
            es.push(if a < b { (a, b) } else { (b, a) });
        }
        es.sort_unstable();
        for w in es.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
            }
        }

        let mut adj = alloc::vec![Vec::new(); vs.len()];
        for &(u, v) in &es {
            let ui = vs.binary_search(&u).expect("endpoint checked");
            let vi = vs.binary_search(&v).expect("endpoint checked");
            adj[ui].push(v);
            adj[vi].push(u);
        }
        for row in &mut adj {
            row.sort_unstable();
        }

        Ok(FiniteGraph {
            vertices: vs,
            edges: es,
            labels: BTreeMap::new(),
            adj,
        })
    }

    /// Attaches display labels to existing vertices.
    pub fn with_labels<L>(mut self, labels: L) -> Result<Self, GraphError>
    where
        L: IntoIterator<Item = (VertexId, String)>,
    {
        for (v, text) in labels {
            if !self.has_vertex(v) {
                return Err(GraphError::UnknownVertex(v));
            }
            self.labels.insert(v, text);
        }
        Ok(self)
    }

    /// Complete graph on vertices `0..n`.
    pub fn complete(n: u32) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        FiniteGraph::new(0..n, edges).expect("complete graph is simple")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Vertex ids in ascending order.
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    /// Edges as `(u, v)` pairs with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn labels(&self) -> &BTreeMap<VertexId, String> {
        &self.labels
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.labels.get(&v).map(String::as_str)
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        let key = if u < v { (u, v) } else { (v, u) };
        u != v && self.edges.binary_search(&key).is_ok()
    }

    /// Position of `v` in `vertices()`, if present.
    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    /// Neighbors of `v` in ascending id order.
    pub fn neighbors(&self, v: VertexId) -> Result<&[VertexId], GraphError> {
        let i = self.index_of(v).ok_or(GraphError::UnknownVertex(v))?;
        Ok(&self.adj[i])
    }

    pub fn degree(&self, v: VertexId) -> Result<usize, GraphError> {
        self.neighbors(v).map(<[VertexId]>::len)
    }

    /// BFS distances from `source`, aligned with `vertices()`. `None` marks
    /// unreachable vertices.
    pub fn bfs_distances(&self, source: VertexId) -> Result<Vec<Option<u32>>, GraphError> {
        let s = self.index_of(source).ok_or(GraphError::UnknownVertex(source))?;
        let mut dist: Vec<Option<u32>> = alloc::vec![None; self.vertices.len()];
        dist[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued vertices have distances");
            for &w in &self.adj[u] {
                let wi = self.index_of(w).expect("adjacency is closed");
                if dist[wi].is_none() {
                    dist[wi] = Some(du + 1);
                    queue.push_back(wi);
                }
            }
        }
        Ok(dist)
    }

    /// Shortest-path distance between two vertices, `None` if disconnected.
    pub fn distance(&self, u: VertexId, v: VertexId) -> Result<Option<u32>, GraphError> {
        let vi = self.index_of(v).ok_or(GraphError::UnknownVertex(v))?;
        let dist = self.bfs_distances(u)?;
        Ok(dist[vi])
    }

    /// The square: same vertices, `u ~ v` iff they sit at distance 1 or 2.
    ///
    /// Distance-2 pairs arise only through a common neighbor, so components
    /// are never joined. Labels carry over.
    pub fn square(&self) -> FiniteGraph {
        let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
        for (i, &u) in self.vertices.iter().enumerate() {
            let mut reach: BTreeSet<VertexId> = BTreeSet::new();
            for &w in &self.adj[i] {
                reach.insert(w);
                let wi = self.index_of(w).expect("adjacency is closed");
                reach.extend(self.adj[wi].iter().copied());
            }
            reach.remove(&u);
            for v in reach {
                if u < v {
                    edges.push((u, v));
                }
            }
        }
        let g = FiniteGraph::new(self.vertices.iter().copied(), edges)
            .expect("square of a simple graph is simple");
        g.with_labels(self.labels.clone()).expect("same vertex set")
    }

    /// Subgraph induced by `keep`; labels of kept vertices survive.
    pub fn induced_subgraph(&self, keep: &BTreeSet<VertexId>) -> Result<FiniteGraph, GraphError> {
        for &v in keep {
            if !self.has_vertex(v) {
                return Err(GraphError::UnknownVertex(v));
            }
        }
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(u, v)| keep.contains(&u) && keep.contains(&v));
        let g = FiniteGraph::new(keep.iter().copied(), edges)?;
        let labels = self
            .labels
            .iter()
            .filter(|(v, _)| keep.contains(v))
            .map(|(v, s)| (*v, s.clone()));
        g.with_labels(labels)
    }

    /// Connected components, each ascending, ordered by smallest member.
    pub fn connected_components(&self) -> Vec<Vec<VertexId>> {
        let mut seen = alloc::vec![false; self.vertices.len()];
        let mut out = Vec::new();
        for start in 0..self.vertices.len() {
            if seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(u) = queue.pop_front() {
                comp.push(self.vertices[u]);
                for &w in &self.adj[u] {
                    let wi = self.index_of(w).expect("adjacency is closed");
                    if !seen[wi] {
                        seen[wi] = true;
                        queue.push_back(wi);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// True iff `set` induces a connected subgraph. The empty set counts as
    /// connected.
    pub fn is_connected_set(&self, set: &BTreeSet<VertexId>) -> Result<bool, GraphError> {
        let Some(&first) = set.iter().next() else {
            return Ok(true);
        };
        for &v in set {
            if !self.has_vertex(v) {
                return Err(GraphError::UnknownVertex(v));
            }
        }
        let mut seen: BTreeSet<VertexId> = BTreeSet::from([first]);
        let mut queue = VecDeque::from([first]);
        while let Some(u) = queue.pop_front() {
            for &w in self.neighbors(u)? {
                if set.contains(&w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        Ok(seen.len() == set.len())
    }
}

/// A sequence of vertices intended as a path. Construction only rejects the
/// empty sequence; distinctness and adjacency are checked by
/// [`validate_path`], so malformed candidates can be represented and
/// diagnosed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSeq {
    vertices: Vec<VertexId>,
}

impl PathSeq {
    pub fn new<I: IntoIterator<Item = VertexId>>(vertices: I) -> Result<Self, GraphError> {
        let vertices: Vec<VertexId> = vertices.into_iter().collect();
        if vertices.is_empty() {
            return Err(GraphError::EmptyPath);
        }
        Ok(PathSeq { vertices })
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> VertexId {
        self.vertices[0]
    }

    pub fn last(&self) -> VertexId {
        *self.vertices.last().expect("paths are non-empty")
    }
}

/// What went wrong at a given position of a path candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathViolationKind {
    UnknownVertex,
    RepeatedVertex,
    NotAdjacent,
}

/// First violation found while scanning a path candidate. For a missing edge
/// the index names the earlier endpoint of the offending pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathViolation {
    pub index: usize,
    pub kind: PathViolationKind,
}

impl fmt::Display for PathViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PathViolationKind::UnknownVertex => {
                write!(f, "unknown vertex at position {}", self.index)
            }
            PathViolationKind::RepeatedVertex => {
                write!(f, "repeated vertex at position {}", self.index)
            }
            PathViolationKind::NotAdjacent => {
                write!(f, "no edge between positions {} and {}", self.index, self.index + 1)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathValidity {
    Valid,
    Invalid(PathViolation),
}

impl PathValidity {
    pub fn is_valid(&self) -> bool {
        matches!(self, PathValidity::Valid)
    }
}

/// Checks that `p` is a genuine path in `g`: all vertices known and distinct,
/// consecutive pairs adjacent. Returns the first violation in scan order.
pub fn validate_path(g: &FiniteGraph, p: &PathSeq) -> PathValidity {
    let vs = p.vertices();
    let mut seen: BTreeSet<VertexId> = BTreeSet::new();
    for (i, &v) in vs.iter().enumerate() {
        if !g.has_vertex(v) {
            return PathValidity::Invalid(PathViolation {
                index: i,
                kind: PathViolationKind::UnknownVertex,
            });
        }
        if !seen.insert(v) {
            return PathValidity::Invalid(PathViolation {
                index: i,
                kind: PathViolationKind::RepeatedVertex,
            });
        }
        if i > 0 && !g.has_edge(vs[i - 1], v) {
            return PathValidity::Invalid(PathViolation {
                index: i - 1,
                kind: PathViolationKind::NotAdjacent,
            });
        }
    }
    PathValidity::Valid
}
