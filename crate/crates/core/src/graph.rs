//! Labeled bipartite graphs, forests, and signed cycle matrices.
//!
//! Vertices of a transportation polytope correspond to forests in the
//! complete bipartite graph `K_{m,n}`, and the edge directions of its
//! feasible cones correspond to signed incidence matrices of even cycles.
//! This module provides those combinatorial objects:
//!
//! * [`Subgraph`] — an arbitrary edge subset of `K_{m,n}` with left vertices
//!   `u_1..u_m` and right vertices `w_1..w_n`;
//! * [`LabeledForest`] — a validated acyclic subgraph (isolated vertices are
//!   allowed; "spanning" always means "on all `m + n` vertices");
//! * [`RootedTreeView`] — a spanning tree rooted at `w_n`, with parent
//!   pointers and per-subtree left-vertex counts;
//! * [`RayMatrix`] — an `m x n` matrix with entries in `{-1, 0, 1}` whose
//!   support is a single even cycle with alternating signs;
//! * [`cyc`] / [`enumerate_augmentations`] — the map from a forest plus a
//!   compatible set of augmenting edges to the signed matrix of the unique
//!   cycle they close, and the enumeration of all compatible augmentations.

use std::cmp::Ordering;
use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Errors for graph construction and cycle extraction.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge {0} lies outside the {1} bipartite shape")]
    EdgeOutOfRange(Edge, BipartiteShape),
    #[error("edge set contains a cycle; expected a forest")]
    ContainsCycle,
    #[error("subgraph is not a spanning tree")]
    NotSpanningTree,
    #[error("shapes differ: {0} vs {1}")]
    ShapeMismatch(BipartiteShape, BipartiteShape),
    #[error("augmenting edge set is empty")]
    EmptyAugmentation,
    #[error("augmenting edge {0} repeats")]
    DuplicateAugmentingEdge(Edge),
    #[error("augmenting edge {0} already belongs to the forest")]
    AugmentingEdgeInForest(Edge),
    #[error("forest plus augmenting edges contains no cycle")]
    NoCycle,
    #[error("forest plus augmenting edges contains more than one cycle")]
    MultipleCycles,
    #[error("augmenting edge {0} is not on the unique cycle")]
    AugmentingEdgeOffCycle(Edge),
    #[error("augmenting edges {0} and {1} are at odd distance along the cycle")]
    AugmentingEdgesAtOddDistance(Edge, Edge),
    #[error("matrix entries must lie in {{-1, 0, 1}}")]
    EntryOutOfRange,
    #[error("matrix support is not a single alternating even cycle")]
    SupportNotCycle,
    #[error("matrix is empty or ragged")]
    BadMatrixShape,
}

/// Size of a complete bipartite graph `K_{m,n}`: `m` left vertices
/// `u_1..u_m` and `n` right vertices `w_1..w_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BipartiteShape {
    pub m: usize,
    pub n: usize,
}

impl BipartiteShape {
    /// # Panics
    /// Panics when either side is empty.
    pub fn new(m: usize, n: usize) -> Self {
        assert!(m >= 1 && n >= 1, "bipartite shape must have m, n >= 1");
        BipartiteShape { m, n }
    }

    /// Total number of vertices `m + n`.
    pub fn vertex_count(&self) -> usize {
        self.m + self.n
    }

    /// Total number of edges of the complete graph, `m * n`.
    pub fn edge_count(&self) -> usize {
        self.m * self.n
    }

    /// All edges of `K_{m,n}` in canonical order.
    pub fn all_edges(&self) -> Vec<Edge> {
        let mut edges: Vec<Edge> = (1..=self.m)
            .flat_map(|i| (1..=self.n).map(move |j| Edge::new(i, j)))
            .collect();
        edges.sort();
        edges
    }

    fn contains(&self, e: &Edge) -> bool {
        (1..=self.m).contains(&e.i) && (1..=self.n).contains(&e.j)
    }

    /// Dense index of a vertex: `u_i -> i - 1`, `w_j -> m + j - 1`.
    fn index(&self, v: Node) -> usize {
        match v {
            Node::Left(i) => i - 1,
            Node::Right(j) => self.m + j - 1,
        }
    }

    fn node_at(&self, idx: usize) -> Node {
        if idx < self.m {
            Node::Left(idx + 1)
        } else {
            Node::Right(idx - self.m + 1)
        }
    }
}

impl fmt::Display for BipartiteShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} x {}", self.m, self.n)
    }
}

/// A vertex of `K_{m,n}`: `Left(i)` is `u_i`, `Right(j)` is `w_j`
/// (both 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Left(usize),
    Right(usize),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Left(i) => write!(f, "u{i}"),
            Node::Right(j) => write!(f, "w{j}"),
        }
    }
}

/// Edge `(u_i, w_j)` of `K_{m,n}`, with 1-based endpoints.
///
/// The canonical edge order is lexicographic on `(j, i)` — column-major on
/// the matrix positions — and every edge list in this crate is kept in that
/// order. Serialized form is the two-element array `[i, j]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
}

impl Edge {
    /// # Panics
    /// Panics when an endpoint index is zero (indices are 1-based).
    pub fn new(i: usize, j: usize) -> Self {
        assert!(i >= 1 && j >= 1, "edge endpoints are 1-based");
        Edge { i, j }
    }

    /// Endpoints as nodes: `(u_i, w_j)`.
    pub fn endpoints(&self) -> (Node, Node) {
        (Node::Left(self.i), Node::Right(self.j))
    }

    /// 0-based matrix position `(i - 1, j - 1)`.
    pub fn position(&self) -> (usize, usize) {
        (self.i - 1, self.j - 1)
    }
}

impl Ord for Edge {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.j, self.i).cmp(&(other.j, other.i))
    }
}

impl PartialOrd for Edge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(u{}, w{})", self.i, self.j)
    }
}

impl Serialize for Edge {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        (self.i, self.j).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Edge {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let (i, j) = <(usize, usize)>::deserialize(de)?;
        Ok(Edge { i, j })
    }
}

/// An arbitrary set of edges of `K_{m,n}`.
///
/// Edges are stored deduplicated in canonical order, so equal subgraphs
/// compare equal and ordering is total and stable. Serialized form is
/// `{"m": m, "n": n, "edges": [[i, j], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subgraph {
    shape: BipartiteShape,
    edges: Vec<Edge>,
}

impl Subgraph {
    /// Builds a subgraph, validating that every edge fits the shape.
    /// Duplicate edges collapse.
    pub fn new(shape: BipartiteShape, edges: Vec<Edge>) -> Result<Self, GraphError> {
        for e in &edges {
            if !shape.contains(e) {
                return Err(GraphError::EdgeOutOfRange(*e, shape));
            }
        }
        let mut edges = edges;
        edges.sort();
        edges.dedup();
        Ok(Subgraph { shape, edges })
    }

    pub fn shape(&self) -> BipartiteShape {
        self.shape
    }

    /// Edges in canonical order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.edges.binary_search(e).is_ok()
    }

    /// True when every edge of `self` is an edge of `other`.
    pub fn is_subgraph_of(&self, other: &Subgraph) -> bool {
        self.shape == other.shape && self.edges.iter().all(|e| other.contains_edge(e))
    }

    /// Edge-set union of two subgraphs over the same shape.
    pub fn union(&self, other: &Subgraph) -> Result<Subgraph, GraphError> {
        if self.shape != other.shape {
            return Err(GraphError::ShapeMismatch(self.shape, other.shape));
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Subgraph::new(self.shape, edges)
    }

    /// Degree of every right vertex, as the vector `(deg w_1, ..., deg w_n)`.
    ///
    /// # Example
    /// ```
    /// use transpoly::graph::{BipartiteShape, Edge, Subgraph};
    /// let shape = BipartiteShape::new(3, 3);
    /// let diag = Subgraph::new(
    ///     shape,
    ///     vec![Edge::new(1, 1), Edge::new(2, 2), Edge::new(3, 3)],
    /// )
    /// .unwrap();
    /// assert_eq!(diag.right_degree_sequence(), vec![1, 1, 1]);
    /// ```
    pub fn right_degree_sequence(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.shape.n];
        for e in &self.edges {
            deg[e.j - 1] += 1;
        }
        deg
    }

    /// Number of connected components, counting isolated vertices.
    pub fn component_count(&self) -> usize {
        let mut dsu = DisjointSets::new(self.shape.vertex_count());
        for e in &self.edges {
            let (a, b) = e.endpoints();
            dsu.union(self.shape.index(a), self.shape.index(b));
        }
        dsu.component_count()
    }

    /// Connected components as sorted vertex lists (isolated vertices give
    /// singleton components), in order of their smallest dense vertex index.
    pub fn components(&self) -> Vec<Vec<Node>> {
        let mut dsu = DisjointSets::new(self.shape.vertex_count());
        for e in &self.edges {
            let (a, b) = e.endpoints();
            dsu.union(self.shape.index(a), self.shape.index(b));
        }
        let mut groups: Vec<Vec<Node>> = Vec::new();
        let mut slot = vec![usize::MAX; self.shape.vertex_count()];
        for idx in 0..self.shape.vertex_count() {
            let root = dsu.find(idx);
            if slot[root] == usize::MAX {
                slot[root] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[root]].push(self.shape.node_at(idx));
        }
        groups
    }

    /// True when the edge set is acyclic.
    pub fn is_acyclic(&self) -> bool {
        // For any graph, |E| = |V| - components + (cycle space dimension).
        self.edges.len() + self.component_count() == self.shape.vertex_count()
    }

    /// Dimension of the cycle space, `|E| - |V| + components`.
    fn cycle_space_dim(&self) -> usize {
        self.edges.len() + self.component_count() - self.shape.vertex_count()
    }
}

#[derive(Serialize, Deserialize)]
struct SubgraphRepr {
    m: usize,
    n: usize,
    edges: Vec<Edge>,
}

impl Serialize for Subgraph {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        SubgraphRepr {
            m: self.shape.m,
            n: self.shape.n,
            edges: self.edges.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Subgraph {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let repr = SubgraphRepr::deserialize(de)?;
        if repr.m == 0 || repr.n == 0 {
            return Err(serde::de::Error::custom(
                "bipartite shape must have m, n >= 1",
            ));
        }
        Subgraph::new(BipartiteShape::new(repr.m, repr.n), repr.edges)
            .map_err(serde::de::Error::custom)
    }
}

/// An acyclic subgraph of `K_{m,n}` on all `m + n` vertices.
///
/// Serializes exactly like [`Subgraph`]; deserialization re-validates
/// acyclicity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct LabeledForest(Subgraph);

impl LabeledForest {
    pub fn new(shape: BipartiteShape, edges: Vec<Edge>) -> Result<Self, GraphError> {
        Subgraph::new(shape, edges).and_then(LabeledForest::from_subgraph)
    }

    pub fn from_subgraph(g: Subgraph) -> Result<Self, GraphError> {
        if !g.is_acyclic() {
            return Err(GraphError::ContainsCycle);
        }
        Ok(LabeledForest(g))
    }

    pub fn as_subgraph(&self) -> &Subgraph {
        &self.0
    }

    pub fn shape(&self) -> BipartiteShape {
        self.0.shape
    }

    pub fn edges(&self) -> &[Edge] {
        &self.0.edges
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.0.contains_edge(e)
    }

    pub fn component_count(&self) -> usize {
        self.0.component_count()
    }

    pub fn components(&self) -> Vec<Vec<Node>> {
        self.0.components()
    }

    pub fn right_degree_sequence(&self) -> Vec<usize> {
        self.0.right_degree_sequence()
    }

    /// True when the forest is a spanning tree (connected, all vertices).
    pub fn is_spanning_tree(&self) -> bool {
        self.0.component_count() == 1
    }
}

impl<'de> Deserialize<'de> for LabeledForest {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let g = Subgraph::deserialize(de)?;
        LabeledForest::from_subgraph(g).map_err(serde::de::Error::custom)
    }
}

/// Which endpoint of a tree edge is the parent, in a tree rooted at `w_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParentSide {
    /// `w_j` is the parent of `u_i`.
    Right,
    /// `u_i` is the parent of `w_j`.
    Left,
}

/// A spanning tree of `K_{m,n}` rooted at `w_n`, with parent pointers and
/// the number of left vertices in every subtree.
#[derive(Debug, Clone)]
pub struct RootedTreeView {
    tree: LabeledForest,
    parent: Vec<Option<Node>>,
    left_count: Vec<usize>,
}

/// Roots a spanning tree at `w_n`.
///
/// Errors with [`GraphError::NotSpanningTree`] when the forest is not
/// connected.
///
/// # Example
/// ```
/// use transpoly::graph::{root_at_wn, BipartiteShape, Edge, LabeledForest, Node};
/// let tree = LabeledForest::new(
///     BipartiteShape::new(1, 1),
///     vec![Edge::new(1, 1)],
/// )
/// .unwrap();
/// let view = root_at_wn(&tree).unwrap();
/// assert_eq!(view.parent(Node::Left(1)), Some(Node::Right(1)));
/// assert_eq!(view.left_subtree_count(Node::Right(1)), 1);
/// ```
pub fn root_at_wn(tree: &LabeledForest) -> Result<RootedTreeView, GraphError> {
    if !tree.is_spanning_tree() {
        return Err(GraphError::NotSpanningTree);
    }
    let shape = tree.shape();
    let total = shape.vertex_count();
    let mut adj: Vec<Vec<Node>> = vec![Vec::new(); total];
    for e in tree.edges() {
        let (a, b) = e.endpoints();
        adj[shape.index(a)].push(b);
        adj[shape.index(b)].push(a);
    }

    let root = Node::Right(shape.n);
    let mut parent: Vec<Option<Node>> = vec![None; total];
    let mut order: Vec<Node> = Vec::with_capacity(total);
    let mut seen = vec![false; total];
    let mut stack = vec![root];
    seen[shape.index(root)] = true;
    while let Some(v) = stack.pop() {
        order.push(v);
        for &next in &adj[shape.index(v)] {
            let idx = shape.index(next);
            if !seen[idx] {
                seen[idx] = true;
                parent[idx] = Some(v);
                stack.push(next);
            }
        }
    }
    debug_assert_eq!(order.len(), total, "spanning tree reaches every vertex");

    // Accumulate subtree left-vertex counts bottom-up: children appear
    // after their parent in DFS discovery order.
    let mut left_count = vec![0usize; total];
    for &v in order.iter().rev() {
        let idx = shape.index(v);
        if matches!(v, Node::Left(_)) {
            left_count[idx] += 1;
        }
        if let Some(p) = parent[idx] {
            left_count[shape.index(p)] += left_count[idx];
        }
    }

    Ok(RootedTreeView {
        tree: tree.clone(),
        parent,
        left_count,
    })
}

impl RootedTreeView {
    pub fn tree(&self) -> &LabeledForest {
        &self.tree
    }

    pub fn shape(&self) -> BipartiteShape {
        self.tree.shape()
    }

    /// Root vertex, always `w_n`.
    pub fn root(&self) -> Node {
        Node::Right(self.shape().n)
    }

    /// Parent of a vertex; `None` exactly at the root.
    pub fn parent(&self, v: Node) -> Option<Node> {
        self.parent[self.shape().index(v)]
    }

    /// Number of left vertices in the subtree rooted at `v` (including `v`
    /// itself when `v` is a left vertex).
    pub fn left_subtree_count(&self, v: Node) -> usize {
        self.left_count[self.shape().index(v)]
    }

    /// Children of `v`, sorted left vertices first, each side by index.
    pub fn children(&self, v: Node) -> Vec<Node> {
        let shape = self.shape();
        let mut out: Vec<Node> = (0..shape.vertex_count())
            .filter(|&idx| self.parent[idx] == Some(v))
            .map(|idx| shape.node_at(idx))
            .collect();
        out.sort();
        out
    }

    /// Which endpoint of tree edge `e` is the parent.
    ///
    /// # Panics
    /// Panics when `e` is not a tree edge.
    pub fn parent_side(&self, e: &Edge) -> ParentSide {
        let (u, w) = e.endpoints();
        if self.parent(u) == Some(w) {
            ParentSide::Right
        } else if self.parent(w) == Some(u) {
            ParentSide::Left
        } else {
            panic!("{e} is not an edge of the rooted tree");
        }
    }
}

/// An `m x n` matrix with entries in `{-1, 0, 1}` whose support is a single
/// even cycle of `K_{m,n}` with signs alternating along the cycle. These
/// matrices generate the feasible cones of transportation polytopes and all
/// have zero row and column sums.
///
/// Serialized form is the plain row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct RayMatrix {
    entries: Vec<Vec<i64>>,
}

impl RayMatrix {
    /// Validates entries in `{-1, 0, 1}`, zero row/column sums, and
    /// single-alternating-cycle support.
    pub fn new(entries: Vec<Vec<i64>>) -> Result<Self, GraphError> {
        let m = entries.len();
        if m == 0 || entries[0].is_empty() {
            return Err(GraphError::BadMatrixShape);
        }
        let n = entries[0].len();
        if entries.iter().any(|row| row.len() != n) {
            return Err(GraphError::BadMatrixShape);
        }
        if entries.iter().flatten().any(|&x| !(-1..=1).contains(&x)) {
            return Err(GraphError::EntryOutOfRange);
        }
        let ray = RayMatrix { entries };
        let support_edges: Vec<Edge> = ray
            .signed_entries()
            .map(|(i, j, _)| Edge::new(i + 1, j + 1))
            .collect();
        let shape = BipartiteShape::new(m, n);
        let support = Subgraph::new(shape, support_edges).expect("support edges fit the shape");
        // A single alternating even cycle: exactly one closed walk covering
        // all support edges (degrees all two), flipping sign at every step.
        if !alternates_along_cycle(&ray, &support) {
            return Err(GraphError::SupportNotCycle);
        }
        Ok(ray)
    }

    fn from_cycle_unchecked(m: usize, n: usize, signed: &[(Edge, i64)]) -> Self {
        let mut entries = vec![vec![0i64; n]; m];
        for (e, s) in signed {
            let (i, j) = e.position();
            entries[i][j] = *s;
        }
        RayMatrix { entries }
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries[0].len()
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Vec<i64>] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i][j]
    }

    /// Nonzero entries as `(row, col, sign)` with 0-based positions, in
    /// row-major order.
    pub fn signed_entries(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.entries.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(move |(j, &x)| (i, j, x))
        })
    }
}

impl<'de> Deserialize<'de> for RayMatrix {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let entries = Vec::<Vec<i64>>::deserialize(de)?;
        RayMatrix::new(entries).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for RayMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Checks that all support edges form one closed walk flipping sign at
/// every step (which forces a single even cycle).
fn alternates_along_cycle(ray: &RayMatrix, support: &Subgraph) -> bool {
    match traverse_cycle(support, support.edges().to_vec()) {
        None => false,
        Some(walk) => {
            let len = walk.len();
            len % 2 == 0
                && (0..len).all(|s| {
                    let (i, j) = walk[s].edge.position();
                    let (i2, j2) = walk[(s + 1) % len].edge.position();
                    ray.entry(i, j) == -ray.entry(i2, j2)
                })
        }
    }
}

/// One step of a cycle traversal: the edge crossed and the direction.
#[derive(Debug, Clone, Copy)]
struct CycleStep {
    edge: Edge,
    /// True when the step goes from the left endpoint to the right one.
    left_to_right: bool,
}

/// Extracts the edges of the unique cycle of `g`, unordered.
/// Returns `None` unless the cycle space has dimension exactly one.
fn unique_cycle_edges(g: &Subgraph) -> Option<Vec<Edge>> {
    if g.cycle_space_dim() != 1 {
        return None;
    }
    // With one independent cycle, iteratively stripping leaves exposes it.
    let shape = g.shape();
    let mut degree = vec![0usize; shape.vertex_count()];
    let mut alive: Vec<bool> = vec![true; g.edges().len()];
    for e in g.edges() {
        let (a, b) = e.endpoints();
        degree[shape.index(a)] += 1;
        degree[shape.index(b)] += 1;
    }
    loop {
        let mut stripped = false;
        for (k, e) in g.edges().iter().enumerate() {
            if !alive[k] {
                continue;
            }
            let (a, b) = e.endpoints();
            let (ia, ib) = (shape.index(a), shape.index(b));
            if degree[ia] == 1 || degree[ib] == 1 {
                alive[k] = false;
                degree[ia] -= 1;
                degree[ib] -= 1;
                stripped = true;
            }
        }
        if !stripped {
            break;
        }
    }
    let cycle: Vec<Edge> = g
        .edges()
        .iter()
        .zip(&alive)
        .filter(|(_, &a)| a)
        .map(|(e, _)| *e)
        .collect();
    debug_assert!(cycle.len() >= 4, "bipartite cycles have length >= 4");
    Some(cycle)
}

/// Orders the edges of a single cycle into a closed walk. The walk starts by
/// crossing the canonically smallest cycle edge from its left endpoint, so
/// odd steps (1-based) go left-to-right.
fn traverse_cycle(g: &Subgraph, cycle: Vec<Edge>) -> Option<Vec<CycleStep>> {
    let first = *cycle.iter().min()?;
    traverse_cycle_from(g.shape(), &cycle, first)
}

/// Same as [`traverse_cycle`], but starting at a chosen cycle edge.
fn traverse_cycle_from(
    shape: BipartiteShape,
    cycle: &[Edge],
    first: Edge,
) -> Option<Vec<CycleStep>> {
    let mut incident: Vec<Vec<Edge>> = vec![Vec::new(); shape.vertex_count()];
    for e in cycle {
        let (a, b) = e.endpoints();
        incident[shape.index(a)].push(*e);
        incident[shape.index(b)].push(*e);
    }
    if incident.iter().any(|v| !(v.is_empty() || v.len() == 2)) {
        return None; // not a disjoint union of cycles
    }

    let mut walk = Vec::with_capacity(cycle.len());
    let start = Node::Left(first.i);
    let mut at = start;
    let mut via = first;
    loop {
        let left_to_right = matches!(at, Node::Left(_));
        walk.push(CycleStep {
            edge: via,
            left_to_right,
        });
        let (u, w) = via.endpoints();
        at = if left_to_right { w } else { u };
        if at == start {
            break;
        }
        via = *incident[shape.index(at)]
            .iter()
            .find(|e| **e != via)
            .expect("cycle vertices have two incident cycle edges");
    }
    if walk.len() != cycle.len() {
        return None; // the cycle edges split into several disjoint cycles
    }
    Some(walk)
}

/// Signed matrix of the unique cycle closed by adding the augmenting edges
/// `ee` to the forest `T`.
///
/// The augmentation is valid when (a) `T ∪ ee` has exactly one cycle,
/// (b) every augmenting edge lies on that cycle, and (c) the augmenting
/// edges sit at pairwise even distances along it. The resulting matrix has
/// `+1` on the cycle edges traversed left-to-right (all of `ee` among them)
/// and `-1` on the edges traversed right-to-left; the orientation starts at
/// the canonically smallest augmenting edge, crossed from its left endpoint.
/// The matrix does not depend on which augmenting edge starts the traversal.
///
/// # Example
/// ```
/// use transpoly::graph::{cyc, BipartiteShape, Edge, LabeledForest};
/// let diag = LabeledForest::new(
///     BipartiteShape::new(3, 3),
///     vec![Edge::new(1, 1), Edge::new(2, 2), Edge::new(3, 3)],
/// )
/// .unwrap();
/// let ray = cyc(&diag, &[Edge::new(1, 2), Edge::new(2, 1)]).unwrap();
/// assert_eq!(
///     ray.entries(),
///     &[vec![-1, 1, 0], vec![1, -1, 0], vec![0, 0, 0]],
/// );
/// ```
pub fn cyc(tree: &LabeledForest, ee: &[Edge]) -> Result<RayMatrix, GraphError> {
    let (walk, _) = cyc_walk(tree, ee, None)?;
    let shape = tree.shape();
    let signed: Vec<(Edge, i64)> = walk
        .iter()
        .map(|step| (step.edge, if step.left_to_right { 1 } else { -1 }))
        .collect();
    Ok(RayMatrix::from_cycle_unchecked(shape.m, shape.n, &signed))
}

/// Shared validation and traversal for [`cyc`]; `start` overrides the
/// canonical starting augmenting edge (used to check start-independence).
fn cyc_walk(
    tree: &LabeledForest,
    ee: &[Edge],
    start: Option<Edge>,
) -> Result<(Vec<CycleStep>, Vec<Edge>), GraphError> {
    if ee.is_empty() {
        return Err(GraphError::EmptyAugmentation);
    }
    let shape = tree.shape();
    let mut aug = ee.to_vec();
    aug.sort();
    for k in 1..aug.len() {
        if aug[k] == aug[k - 1] {
            return Err(GraphError::DuplicateAugmentingEdge(aug[k]));
        }
    }
    for e in &aug {
        if !shape.contains(e) {
            return Err(GraphError::EdgeOutOfRange(*e, shape));
        }
        if tree.contains_edge(e) {
            return Err(GraphError::AugmentingEdgeInForest(*e));
        }
    }

    let mut union_edges = tree.edges().to_vec();
    union_edges.extend_from_slice(&aug);
    let union = Subgraph::new(shape, union_edges)?;
    let cycle = match union.cycle_space_dim() {
        0 => return Err(GraphError::NoCycle),
        1 => unique_cycle_edges(&union).expect("dimension checked"),
        _ => return Err(GraphError::MultipleCycles),
    };
    for e in &aug {
        if !cycle.contains(e) {
            return Err(GraphError::AugmentingEdgeOffCycle(*e));
        }
    }

    let first = start.unwrap_or(aug[0]);
    debug_assert!(cycle.contains(&first));
    let walk =
        traverse_cycle_from(shape, &cycle, first).expect("unique cycle traverses as one walk");
    // Walk starts at a left endpoint, so odd (1-based) steps go
    // left-to-right; every augmenting edge must land on an odd step.
    for (s, step) in walk.iter().enumerate() {
        if s % 2 == 1 && aug.contains(&step.edge) {
            return Err(GraphError::AugmentingEdgesAtOddDistance(first, step.edge));
        }
    }
    Ok((walk, cycle))
}

/// All valid augmentations of a forest, with their signed cycle matrices.
///
/// For a spanning tree these are exactly the single non-tree edges, giving
/// `m*n - (m + n - 1)` matrices; for a forest with `c` components the
/// augmenting sets have size at most `c`. Results are sorted by augmenting
/// edge list, sizes ascending.
pub fn enumerate_augmentations(tree: &LabeledForest) -> Vec<(Vec<Edge>, RayMatrix)> {
    let shape = tree.shape();
    let candidates: Vec<Edge> = shape
        .all_edges()
        .into_iter()
        .filter(|e| !tree.contains_edge(e))
        .collect();
    let max_size = tree.component_count();
    let mut out = Vec::new();
    for size in 1..=max_size.min(candidates.len()) {
        for combo in candidates.iter().copied().combinations(size) {
            if let Ok(ray) = cyc(tree, &combo) {
                out.push((combo, ray));
            }
        }
    }
    debug_assert!(
        out.iter().map(|(_, r)| r).all_unique(),
        "distinct augmentations give distinct cycle matrices"
    );
    out
}

/// Union-find over dense vertex indices.
#[derive(Debug, Clone)]
struct DisjointSets {
    parent: Vec<usize>,
    components: usize,
}

impl DisjointSets {
    fn new(size: usize) -> Self {
        DisjointSets {
            parent: (0..size).collect(),
            components: size,
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    /// Merges the sets of `a` and `b`; returns false when already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        self.components -= 1;
        true
    }

    fn component_count(&self) -> usize {
        self.components
    }
}

/// Edge list of the unique cycle of `G1 ∪ G2` in traversal order, or `None`
/// when the union is acyclic or has several cycles. Two vertices of a
/// transportation polytope are adjacent exactly when the union of their
/// support forests has a unique cycle.
pub fn unique_cycle_of_union(g1: &LabeledForest, g2: &LabeledForest) -> Option<Vec<Edge>> {
    let union = g1.as_subgraph().union(g2.as_subgraph()).ok()?;
    let cycle = unique_cycle_edges(&union)?;
    let walk = traverse_cycle(&union, cycle)?;
    Some(walk.into_iter().map(|s| s.edge).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e(i: usize, j: usize) -> Edge {
        Edge::new(i, j)
    }

    fn forest(m: usize, n: usize, edges: &[(usize, usize)]) -> LabeledForest {
        LabeledForest::new(
            BipartiteShape::new(m, n),
            edges.iter().map(|&(i, j)| e(i, j)).collect(),
        )
        .unwrap()
    }

    /// Diagonal forest of `K_{3,3}`: support of the vertex with margins
    /// pattern (1,1,2) studied throughout the crate tests.
    fn diag3() -> LabeledForest {
        forest(3, 3, &[(1, 1), (2, 2), (3, 3)])
    }

    #[test]
    fn edges_sort_column_major() {
        let mut edges = vec![e(2, 2), e(1, 1), e(3, 1), e(1, 2)];
        edges.sort();
        assert_eq!(edges, vec![e(1, 1), e(3, 1), e(1, 2), e(2, 2)]);
    }

    #[test]
    fn subgraph_rejects_out_of_range_edges() {
        let err = Subgraph::new(BipartiteShape::new(2, 2), vec![e(3, 1)]).unwrap_err();
        assert!(matches!(err, GraphError::EdgeOutOfRange(_, _)));
    }

    #[test]
    fn subgraph_dedupes_and_canonicalizes() {
        let g = Subgraph::new(BipartiteShape::new(2, 2), vec![e(2, 1), e(1, 1), e(2, 1)]).unwrap();
        assert_eq!(g.edges(), &[e(1, 1), e(2, 1)]);
    }

    #[test]
    fn right_degree_sequence_examples() {
        assert_eq!(diag3().right_degree_sequence(), vec![1, 1, 1]);
        let empty = Subgraph::new(BipartiteShape::new(2, 2), vec![]).unwrap();
        assert_eq!(empty.right_degree_sequence(), vec![0, 0]);
    }

    #[test]
    fn forest_rejects_cycles() {
        let err = LabeledForest::new(
            BipartiteShape::new(2, 2),
            vec![e(1, 1), e(1, 2), e(2, 1), e(2, 2)],
        )
        .unwrap_err();
        assert_eq!(err, GraphError::ContainsCycle);
    }

    #[test]
    fn components_include_isolated_vertices() {
        let g = diag3();
        assert_eq!(g.component_count(), 3);
        let comps = g.components();
        assert_eq!(
            comps,
            vec![
                vec![Node::Left(1), Node::Right(1)],
                vec![Node::Left(2), Node::Right(2)],
                vec![Node::Left(3), Node::Right(3)],
            ]
        );
        let with_isolated = forest(2, 2, &[(1, 1)]);
        assert_eq!(with_isolated.component_count(), 3);
    }

    #[test]
    fn root_at_wn_single_edge() {
        let view = root_at_wn(&forest(1, 1, &[(1, 1)])).unwrap();
        assert_eq!(view.root(), Node::Right(1));
        assert_eq!(view.parent(Node::Left(1)), Some(Node::Right(1)));
        assert_eq!(view.parent(Node::Right(1)), None);
        assert_eq!(view.left_subtree_count(Node::Right(1)), 1);
        assert_eq!(view.left_subtree_count(Node::Left(1)), 1);
        assert_eq!(view.parent_side(&e(1, 1)), ParentSide::Right);
    }

    #[test]
    fn root_at_wn_path_tree() {
        // w3 - u3 - w1 - u1 - w2 - u2, rooted at w3.
        let tree = forest(3, 3, &[(1, 1), (1, 2), (2, 2), (3, 1), (3, 3)]);
        let view = root_at_wn(&tree).unwrap();
        assert_eq!(view.parent(Node::Left(3)), Some(Node::Right(3)));
        assert_eq!(view.parent(Node::Right(1)), Some(Node::Left(3)));
        assert_eq!(view.parent(Node::Left(1)), Some(Node::Right(1)));
        assert_eq!(view.parent(Node::Right(2)), Some(Node::Left(1)));
        assert_eq!(view.parent(Node::Left(2)), Some(Node::Right(2)));

        assert_eq!(view.left_subtree_count(Node::Right(3)), 3);
        assert_eq!(view.left_subtree_count(Node::Left(3)), 3);
        assert_eq!(view.left_subtree_count(Node::Right(1)), 2);
        assert_eq!(view.left_subtree_count(Node::Left(1)), 2);
        assert_eq!(view.left_subtree_count(Node::Right(2)), 1);
        assert_eq!(view.left_subtree_count(Node::Left(2)), 1);

        assert_eq!(view.parent_side(&e(3, 3)), ParentSide::Right);
        assert_eq!(view.parent_side(&e(3, 1)), ParentSide::Left);
        assert_eq!(view.children(Node::Right(1)), vec![Node::Left(1)]);
    }

    #[test]
    fn root_at_wn_rejects_disconnected_forests() {
        assert_eq!(
            root_at_wn(&diag3()).unwrap_err(),
            GraphError::NotSpanningTree
        );
    }

    #[test]
    fn cyc_two_edge_augmentation_of_diagonal() {
        let ray = cyc(&diag3(), &[e(1, 2), e(2, 1)]).unwrap();
        assert_eq!(
            ray.entries(),
            &[vec![-1, 1, 0], vec![1, -1, 0], vec![0, 0, 0]]
        );
    }

    #[test]
    fn cyc_three_edge_augmentations_of_diagonal() {
        let r4 = cyc(&diag3(), &[e(1, 2), e(2, 3), e(3, 1)]).unwrap();
        assert_eq!(
            r4.entries(),
            &[vec![-1, 1, 0], vec![0, -1, 1], vec![1, 0, -1]]
        );
        let r5 = cyc(&diag3(), &[e(1, 3), e(2, 1), e(3, 2)]).unwrap();
        assert_eq!(
            r5.entries(),
            &[vec![-1, 0, 1], vec![1, -1, 0], vec![0, 1, -1]]
        );
    }

    #[test]
    fn cyc_result_is_independent_of_starting_edge() {
        let cases: Vec<(LabeledForest, Vec<Edge>)> = vec![
            (diag3(), vec![e(1, 2), e(2, 1)]),
            (diag3(), vec![e(1, 2), e(2, 3), e(3, 1)]),
            (diag3(), vec![e(1, 3), e(2, 1), e(3, 2)]),
            (
                forest(3, 3, &[(1, 3), (2, 3), (3, 1), (3, 2)]),
                vec![e(1, 1), e(3, 3)],
            ),
        ];
        for (tree, ee) in cases {
            let canonical = cyc(&tree, &ee).unwrap();
            for start in &ee {
                let (walk, _) = cyc_walk(&tree, &ee, Some(*start)).unwrap();
                let signed: Vec<(Edge, i64)> = walk
                    .iter()
                    .map(|s| (s.edge, if s.left_to_right { 1 } else { -1 }))
                    .collect();
                let shape = tree.shape();
                let ray = RayMatrix::from_cycle_unchecked(shape.m, shape.n, &signed);
                assert_eq!(ray, canonical, "start {start} changes cyc output");
            }
        }
    }

    #[test]
    fn cyc_rejects_invalid_augmentations() {
        let t = diag3();
        assert_eq!(
            cyc(&t, &[e(2, 2)]).unwrap_err(),
            GraphError::AugmentingEdgeInForest(e(2, 2))
        );
        assert_eq!(cyc(&t, &[]).unwrap_err(), GraphError::EmptyAugmentation);
        assert_eq!(cyc(&t, &[e(1, 2)]).unwrap_err(), GraphError::NoCycle);
        assert_eq!(
            cyc(&t, &[e(1, 2), e(2, 1), e(1, 3), e(3, 1)]).unwrap_err(),
            GraphError::MultipleCycles
        );
        assert_eq!(
            cyc(&t, &[e(1, 2), e(1, 2)]).unwrap_err(),
            GraphError::DuplicateAugmentingEdge(e(1, 2))
        );

        // Unique cycle, but one augmenting edge dangles in another component.
        let path = forest(3, 3, &[(1, 1), (1, 2), (2, 2)]);
        assert_eq!(
            cyc(&path, &[e(2, 1), e(3, 3)]).unwrap_err(),
            GraphError::AugmentingEdgeOffCycle(e(3, 3))
        );

        // Unique cycle, all augmenting edges on it, but at odd distance.
        let double_star = forest(3, 3, &[(1, 3), (2, 3), (3, 1), (3, 2)]);
        assert!(matches!(
            cyc(&double_star, &[e(1, 1), e(2, 2)]).unwrap_err(),
            GraphError::AugmentingEdgesAtOddDistance(_, _)
        ));
    }

    #[test]
    fn enumerate_augmentations_of_diagonal_gives_five_rays() {
        let augs = enumerate_augmentations(&diag3());
        let got: Vec<(Vec<Edge>, Vec<Vec<i64>>)> = augs
            .iter()
            .map(|(ee, r)| (ee.clone(), r.entries().to_vec()))
            .collect();
        let expect: Vec<(Vec<Edge>, Vec<Vec<i64>>)> = vec![
            (
                vec![e(2, 1), e(1, 2)],
                vec![vec![-1, 1, 0], vec![1, -1, 0], vec![0, 0, 0]],
            ),
            (
                vec![e(3, 1), e(1, 3)],
                vec![vec![-1, 0, 1], vec![0, 0, 0], vec![1, 0, -1]],
            ),
            (
                vec![e(3, 2), e(2, 3)],
                vec![vec![0, 0, 0], vec![0, -1, 1], vec![0, 1, -1]],
            ),
            (
                vec![e(2, 1), e(3, 2), e(1, 3)],
                vec![vec![-1, 0, 1], vec![1, -1, 0], vec![0, 1, -1]],
            ),
            (
                vec![e(3, 1), e(1, 2), e(2, 3)],
                vec![vec![-1, 1, 0], vec![0, -1, 1], vec![1, 0, -1]],
            ),
        ];
        assert_eq!(got, expect);
    }

    #[test]
    fn enumerate_augmentations_of_spanning_tree_counts_non_tree_edges() {
        let tree = forest(3, 3, &[(1, 1), (1, 2), (2, 2), (3, 1), (3, 3)]);
        let augs = enumerate_augmentations(&tree);
        assert_eq!(augs.len(), 3 * 3 - (3 + 3 - 1));
        assert!(augs.iter().all(|(ee, _)| ee.len() == 1));
    }

    /// Brute-force validity check used as an independent reference for
    /// `cyc`: enumerate all sub-edge-sets of the union and demand exactly
    /// one of them is a single cycle containing `ee` with even spacing.
    fn naive_augmentation_is_valid(tree: &LabeledForest, ee: &[Edge]) -> bool {
        let shape = tree.shape();
        if ee.iter().any(|e| tree.contains_edge(e)) {
            return false;
        }
        let mut union = tree.edges().to_vec();
        union.extend_from_slice(ee);
        let mut cycles: Vec<Vec<Edge>> = Vec::new();
        for size in 4..=union.len() {
            for combo in union.iter().copied().combinations(size) {
                let g = Subgraph::new(shape, combo.clone()).unwrap();
                let mut deg = std::collections::BTreeMap::new();
                for edge in g.edges() {
                    let (a, b) = edge.endpoints();
                    *deg.entry(a).or_insert(0usize) += 1;
                    *deg.entry(b).or_insert(0usize) += 1;
                }
                let all_two = deg.values().all(|&d| d == 2);
                let connected = {
                    let touched = deg.len();
                    g.component_count() == shape.vertex_count() - touched + 1
                };
                if all_two && connected {
                    cycles.push(g.edges().to_vec());
                }
            }
        }
        if cycles.len() != 1 {
            return false;
        }
        let cycle = &cycles[0];
        if !ee.iter().all(|e| cycle.contains(e)) {
            return false;
        }
        let union_graph = Subgraph::new(shape, cycle.clone()).unwrap();
        let walk = traverse_cycle(&union_graph, cycle.clone()).unwrap();
        // Even pairwise distance == all augmenting edges on steps of equal
        // parity; the walk starts left-to-right, and augmenting edges must
        // be the left-to-right ones once any of them anchors the parity.
        let positions: Vec<usize> = walk
            .iter()
            .enumerate()
            .filter(|(_, s)| ee.contains(&s.edge))
            .map(|(idx, _)| idx)
            .collect();
        positions.iter().all(|p| p % 2 == positions[0] % 2)
    }

    #[test]
    fn enumerate_augmentations_matches_naive_filter() {
        for tree in [
            diag3(),
            forest(3, 3, &[(1, 3), (2, 3), (3, 1), (3, 2)]),
            forest(2, 3, &[(1, 1), (2, 2)]),
            forest(3, 2, &[(1, 1), (2, 1), (3, 2)]),
        ] {
            let fast: Vec<Vec<Edge>> = enumerate_augmentations(&tree)
                .into_iter()
                .map(|(ee, _)| ee)
                .collect();
            let candidates: Vec<Edge> = tree
                .shape()
                .all_edges()
                .into_iter()
                .filter(|e| !tree.contains_edge(e))
                .collect();
            let mut naive = Vec::new();
            for size in 1..=tree.component_count().min(candidates.len()) {
                for combo in candidates.iter().copied().combinations(size) {
                    if naive_augmentation_is_valid(&tree, &combo) {
                        naive.push(combo);
                    }
                }
            }
            assert_eq!(fast, naive, "augmentations of {:?}", tree.edges());
        }
    }

    #[test]
    fn unique_cycle_of_union_detects_adjacency_cycles() {
        let t0 = diag3();
        let t1 = forest(3, 3, &[(1, 2), (2, 1), (3, 3)]);
        let cycle = unique_cycle_of_union(&t0, &t1).unwrap();
        assert_eq!(cycle, vec![e(1, 1), e(2, 1), e(2, 2), e(1, 2)]);

        let t6 = forest(3, 3, &[(1, 3), (2, 3), (3, 1), (3, 2)]);
        assert_eq!(unique_cycle_of_union(&t0, &t6), None);
        assert_eq!(unique_cycle_of_union(&t0, &t0), None);
    }

    #[test]
    fn ray_matrix_validates_support() {
        assert!(RayMatrix::new(vec![vec![-1, 1, 0], vec![1, -1, 0], vec![0, 0, 0]]).is_ok());
        assert_eq!(
            RayMatrix::new(vec![vec![2, 0], vec![0, 0]]).unwrap_err(),
            GraphError::EntryOutOfRange
        );
        assert_eq!(
            RayMatrix::new(vec![vec![1, -1], vec![0, 0]]).unwrap_err(),
            GraphError::SupportNotCycle
        );
        assert_eq!(
            RayMatrix::new(vec![vec![1, 1], vec![-1, -1]]).unwrap_err(),
            GraphError::SupportNotCycle
        );
        assert!(RayMatrix::new(vec![vec![1, -1], vec![-1, 1]]).is_ok());
    }

    #[test]
    fn serde_round_trips() {
        let tree = forest(3, 3, &[(1, 1), (1, 2), (2, 2), (3, 1), (3, 3)]);
        let json = serde_json::to_string(&tree).unwrap();
        assert_eq!(
            json,
            r#"{"m":3,"n":3,"edges":[[1,1],[3,1],[1,2],[2,2],[3,3]]}"#
        );
        let back: LabeledForest = serde_json::from_str(&json).unwrap();
        assert_eq!(back, tree);

        let cyclic = r#"{"m":2,"n":2,"edges":[[1,1],[1,2],[2,1],[2,2]]}"#;
        assert!(serde_json::from_str::<LabeledForest>(cyclic).is_err());
        assert!(serde_json::from_str::<Subgraph>(cyclic).is_ok());

        let ray = cyc(&diag3(), &[e(1, 2), e(2, 1)]).unwrap();
        let ray_json = serde_json::to_string(&ray).unwrap();
        assert_eq!(ray_json, "[[-1,1,0],[1,-1,0],[0,0,0]]");
        assert_eq!(serde_json::from_str::<RayMatrix>(&ray_json).unwrap(), ray);
    }

    /// Strategy: a random forest inside `K_{m,n}` for small shapes, built by
    /// a greedy acyclic pass over a shuffled edge subset.
    fn arb_forest() -> impl Strategy<Value = LabeledForest> {
        ((1usize..=4), (1usize..=4), any::<u64>(), 0usize..=12).prop_map(|(m, n, seed, keep)| {
            let shape = BipartiteShape::new(m, n);
            let mut edges = shape.all_edges();
            // Cheap deterministic shuffle driven by the seed.
            let mut state = seed | 1;
            for k in (1..edges.len()).rev() {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                edges.swap(k, (state >> 33) as usize % (k + 1));
            }
            let mut kept: Vec<Edge> = Vec::new();
            for e in edges.into_iter().take(keep) {
                let mut attempt = kept.clone();
                attempt.push(e);
                if Subgraph::new(shape, attempt).unwrap().is_acyclic() {
                    kept.push(e);
                }
            }
            LabeledForest::new(shape, kept).unwrap()
        })
    }

    proptest! {
        #[test]
        fn augmentation_rays_have_zero_margins_and_positive_augmenting_entries(
            tree in arb_forest()
        ) {
            for (ee, ray) in enumerate_augmentations(&tree) {
                for row in ray.entries() {
                    prop_assert_eq!(row.iter().sum::<i64>(), 0);
                }
                for jcol in 0..ray.cols() {
                    let col_sum: i64 = (0..ray.rows()).map(|i| ray.entry(i, jcol)).sum();
                    prop_assert_eq!(col_sum, 0);
                }
                for edge in &ee {
                    let (i, j) = edge.position();
                    prop_assert_eq!(ray.entry(i, j), 1);
                }
                // Support must be a valid alternating cycle in its own right.
                prop_assert!(RayMatrix::new(ray.entries().to_vec()).is_ok());
            }
        }

        #[test]
        fn spanning_trees_have_exactly_complement_many_augmentations(
            tree in arb_forest().prop_filter("spanning", |t| t.is_spanning_tree())
        ) {
            let shape = tree.shape();
            let augs = enumerate_augmentations(&tree);
            prop_assert_eq!(
                augs.len(),
                shape.edge_count() - (shape.m + shape.n - 1)
            );
            prop_assert!(augs.iter().all(|(ee, _)| ee.len() == 1));
        }

        #[test]
        fn rooted_views_count_all_left_vertices_at_the_root(
            tree in arb_forest().prop_filter("spanning", |t| t.is_spanning_tree())
        ) {
            let view = root_at_wn(&tree).unwrap();
            prop_assert_eq!(view.left_subtree_count(view.root()), tree.shape().m);
            // Every non-root vertex points at a neighbor in the tree.
            for edge in tree.edges() {
                let side = view.parent_side(edge);
                prop_assert!(matches!(side, ParentSide::Left | ParentSide::Right));
            }
        }
    }
}
