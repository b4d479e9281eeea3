//! Finite connected multigraphs, spanning trees and the rank of `π₁`.

use std::collections::VecDeque;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub src: VertexId,
    pub dst: VertexId,
}

/// A finite multigraph; parallel edges and self-loops are allowed.
///
/// The on-disk form is `{"vertices": N, "edges": [{"id":0,"src":0,"dst":1}, ...]}`.
/// Deserialization does not validate; call [`validate_graph`] or use
/// [`MultiGraph::new`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiGraph {
    vertices: usize,
    edges: Vec<Edge>,
}

impl MultiGraph {
    /// Builds and validates a graph from `(src, dst)` pairs; edge `i` gets id `i`.
    pub fn new(vertices: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let g = Self::from_parts(
            vertices,
            edges
                .iter()
                .enumerate()
                .map(|(i, &(s, d))| Edge { id: EdgeId(i), src: VertexId(s), dst: VertexId(d) })
                .collect(),
        );
        validate_graph(&g)?;
        Ok(g)
    }

    /// No validation.
    pub fn from_parts(vertices: usize, edges: Vec<Edge>) -> Self {
        Self { vertices, edges }
    }

    /// One vertex with `k` self-loops.
    pub fn rose(k: usize) -> Self {
        Self::new(1, &vec![(0, 0); k]).expect("rose is valid")
    }

    /// Cycle `0 → 1 → … → n-1 → 0`; `cycle(1)` is the rose with one loop.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 1);
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, &edges).expect("cycle is valid")
    }

    /// Two vertices joined by `k` parallel edges, all oriented `0 → 1`.
    pub fn dipole(k: usize) -> Self {
        Self::new(2, &vec![(0, 1); k]).expect("dipole is valid")
    }

    /// Path `0 - 1 - … - n-1`.
    pub fn path(n: usize) -> Self {
        assert!(n >= 1);
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges).expect("path is valid")
    }

    /// A random connected multigraph: a random tree on `vertices` vertices
    /// plus extra random edges (loops and parallels allowed) up to `edges`.
    pub fn random_connected<R: Rng + ?Sized>(rng: &mut R, vertices: usize, edges: usize) -> Self {
        assert!(vertices >= 1 && edges + 1 >= vertices);
        let mut list = Vec::with_capacity(edges);
        for v in 1..vertices {
            let u = rng.gen_range(0..v);
            if rng.gen_bool(0.5) {
                list.push((u, v));
            } else {
                list.push((v, u));
            }
        }
        while list.len() < edges {
            list.push((rng.gen_range(0..vertices), rng.gen_range(0..vertices)));
        }
        // shuffle ids so tree edges are not always the low ones
        for i in (1..list.len()).rev() {
            let j = rng.gen_range(0..=i);
            list.swap(i, j);
        }
        Self::new(vertices, &list).expect("random graph is connected by construction")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertices).map(VertexId)
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.0 < self.vertices
    }

    /// True for `C_n` up to edge orientation and labelling: as many edges as
    /// vertices, connected, every vertex of degree two (a loop counts twice).
    pub fn is_cycle(&self) -> bool {
        if self.edges.len() != self.vertices || self.vertices == 0 {
            return false;
        }
        let mut degree = vec![0usize; self.vertices];
        for e in &self.edges {
            degree[e.src.0] += 1;
            degree[e.dst.0] += 1;
        }
        degree.iter().all(|&d| d == 2)
    }

    /// True when edge `i` is `i → i+1 mod n`, the labelling [`MultiGraph::cycle`] produces.
    pub fn is_standard_cycle(&self) -> bool {
        let n = self.vertices;
        n >= 1
            && self.edges.len() == n
            && self.edges.iter().enumerate().all(|(i, e)| e.src.0 == i && e.dst.0 == (i + 1) % n)
    }
}

/// Succeeds iff `g` is nonempty, index-consistent and connected.
pub fn validate_graph(g: &MultiGraph) -> Result<()> {
    if g.vertices == 0 {
        return Err(Error::EmptyGraph);
    }
    for (position, e) in g.edges.iter().enumerate() {
        if e.id.0 != position {
            return Err(Error::BadEdgeId { position, id: e.id.0 });
        }
        for v in [e.src, e.dst] {
            if v.0 >= g.vertices {
                return Err(Error::DanglingEdge { edge: e.id, vertex: v.0, vertices: g.vertices });
            }
        }
    }
    let mut adjacency = vec![Vec::new(); g.vertices];
    for e in &g.edges {
        adjacency[e.src.0].push(e.dst.0);
        adjacency[e.dst.0].push(e.src.0);
    }
    let mut seen = vec![false; g.vertices];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for &w in &adjacency[u] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    match seen.iter().position(|s| !s) {
        Some(v) => Err(Error::Disconnected(VertexId(v))),
        None => Ok(()),
    }
}

/// Link from a vertex to its parent in a rooted spanning tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParentLink {
    pub parent: VertexId,
    pub edge: EdgeId,
    /// `true` when the edge is oriented parent → child.
    pub from_parent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    root: VertexId,
    tree_edges: Vec<EdgeId>,
    parent: Vec<Option<ParentLink>>,
    depth: Vec<usize>,
}

impl SpanningTree {
    pub fn root(&self) -> VertexId {
        self.root
    }

    /// Sorted ascending.
    pub fn tree_edges(&self) -> &[EdgeId] {
        &self.tree_edges
    }

    pub fn contains_edge(&self, e: EdgeId) -> bool {
        self.tree_edges.binary_search(&e).is_ok()
    }

    pub fn parent(&self, v: VertexId) -> Option<ParentLink> {
        self.parent[v.0]
    }

    pub fn depth(&self, v: VertexId) -> usize {
        self.depth[v.0]
    }

    pub fn max_depth(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0)
    }
}

/// Grows a tree from `root` one edge at a time; at every step the crossing
/// edge (one endpoint reached, the other not) with the lowest id is added.
///
/// Panics if `root` is out of range. `g` must be validated.
pub fn spanning_tree(g: &MultiGraph, root: VertexId) -> SpanningTree {
    assert!(g.contains(root), "root {root} out of range");
    let n = g.vertex_count();
    let mut parent = vec![None; n];
    let mut depth = vec![0; n];
    let mut reached = vec![false; n];
    reached[root.0] = true;
    let mut tree_edges = Vec::with_capacity(n.saturating_sub(1));
    loop {
        let crossing = g.edges.iter().find(|e| reached[e.src.0] != reached[e.dst.0]);
        let Some(e) = crossing else { break };
        let (from, to, from_parent) = if reached[e.src.0] { (e.src, e.dst, true) } else { (e.dst, e.src, false) };
        reached[to.0] = true;
        parent[to.0] = Some(ParentLink { parent: from, edge: e.id, from_parent });
        depth[to.0] = depth[from.0] + 1;
        tree_edges.push(e.id);
    }
    debug_assert!(reached.iter().all(|&r| r), "graph must be connected");
    tree_edges.sort();
    SpanningTree { root, tree_edges, parent, depth }
}

/// Rank of the free group `π₁(g)`: `E − V + 1`.
pub fn pi1_rank(g: &MultiGraph) -> usize {
    g.edge_count() + 1 - g.vertex_count()
}
