//! Central transportation polytopes `T((a,...,a), (ka,...,ka))` of shape
//! `kn x n` — the polytopes attaining the maximum vertex count for their
//! shape — handled combinatorially, without pivoting.
//!
//! Vertices correspond to partitions of the `kn` rows into `n` blocks of
//! size `k` (the block assigned to a column carries its whole margin). The
//! support trees of the perturbed vertices are exactly the spanning trees
//! of `K_{kn,n}` whose right degrees are `k + 1` everywhere except `k` at
//! `w_n`, and they factor as triples
//!
//! ```text
//!   (block partition) x (tree on the n columns) x (branch choice in [k]^(n-1))
//! ```
//!
//! via an explicit bijection: start from the partition's matching edges,
//! then hang each non-root column `w_p` off the `b_p`-th block member of
//! its parent column. The perturbed vertex on such a tree has a closed
//! form, so vertices, perturbed matrices, and the full generating function
//! come straight from the combinatorics.

use std::collections::BTreeSet;

use num::{BigInt, BigRational, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::graph::{cyc, BipartiteShape, Edge, GraphError, LabeledForest};
use crate::mgf::{MgfExpression, MgfTerm};
use crate::polytope::{Margins, PolytopeError, TransportMatrix};
use crate::rat;

/// Errors for the combinatorial central-polytope routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CentralError {
    #[error("central parameters must be positive, got k = {k}, n = {n}, a = {a}")]
    BadParameters { k: usize, n: usize, a: u64 },
    #[error("tree is not a perturbed support tree of a central polytope: {0}")]
    NotInTreeFamily(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

fn check_params(k: usize, n: usize, a: u64) -> Result<(), CentralError> {
    if k == 0 || n == 0 || a == 0 {
        return Err(CentralError::BadParameters { k, n, a });
    }
    Ok(())
}

/// Margins of the central polytope: `kn` rows of `a`, `n` columns of `ka`.
pub fn central_margins(k: usize, n: usize, a: u64) -> Result<Margins, CentralError> {
    check_params(k, n, a)?;
    let a = rat::int(a as i64);
    let ka = &a * rat::int(k as i64);
    Ok(Margins::new(vec![a; k * n], vec![ka; n])?)
}

/// Number of vertices of the central polytope of shape `kn x n`:
/// `(kn)! / (k!)^n`. Each vertex partitions the `kn` rows into `n` blocks
/// of `k`, one block per column.
pub fn central_vertex_count(k: usize, n: usize) -> BigInt {
    let kn_fact = rat::factorial(k * n);
    let k_fact = rat::factorial(k);
    kn_fact / num::pow::pow(k_fact, n)
}

/// Number of vertices of the perturbed central polytope of shape `kn x n`:
/// `(kn)! / (k!)^n * n^(n-2) * k^(n-1)`. This is the maximum vertex count
/// over all non-degenerate polytopes of that shape.
pub fn max_perturbed_vertex_count(k: usize, n: usize) -> BigInt {
    let trees_per_matching = if n >= 2 {
        num::pow::pow(BigInt::from(n), n - 2)
    } else {
        BigInt::from(1)
    };
    let branch_choices = num::pow::pow(BigInt::from(k), n - 1);
    central_vertex_count(k, n) * trees_per_matching * branch_choices
}

/// Both closed-form counts: `(vertices, perturbed vertices)`.
pub fn central_counts(k: usize, n: usize) -> (BigInt, BigInt) {
    (central_vertex_count(k, n), max_perturbed_vertex_count(k, n))
}

/// A partition of the `kn` rows into `n` ordered blocks of size `k`;
/// `block_of[i]` is the 1-based column owning row `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct BlockPartition {
    k: usize,
    n: usize,
    block_of: Vec<usize>,
}

impl BlockPartition {
    pub fn new(k: usize, n: usize, block_of: Vec<usize>) -> Result<Self, CentralError> {
        check_params(k, n, 1)?;
        if block_of.len() != k * n {
            return Err(CentralError::NotInTreeFamily(format!(
                "partition assigns {} rows, expected {}",
                block_of.len(),
                k * n
            )));
        }
        let mut counts = vec![0usize; n];
        for &j in &block_of {
            if j == 0 || j > n {
                return Err(CentralError::NotInTreeFamily(format!(
                    "block index {j} out of range 1..={n}"
                )));
            }
            counts[j - 1] += 1;
        }
        if counts.iter().any(|&c| c != k) {
            return Err(CentralError::NotInTreeFamily(format!(
                "block sizes {counts:?} are not all {k}"
            )));
        }
        Ok(BlockPartition { k, n, block_of })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 1-based column owning the 1-based row `i`.
    pub fn block_of(&self, i: usize) -> usize {
        self.block_of[i - 1]
    }

    /// Sorted 1-based rows of the 1-based block `j`.
    pub fn members(&self, j: usize) -> Vec<usize> {
        (1..=self.k * self.n)
            .filter(|&i| self.block_of(i) == j)
            .collect()
    }

    /// The vertex of the central polytope for this partition: `a` at
    /// `(i, block_of(i))`, zero elsewhere.
    pub fn vertex(&self, a: u64) -> Result<TransportMatrix, CentralError> {
        let margins = central_margins(self.k, self.n, a)?;
        let a = rat::int(a as i64);
        let mut entries = vec![vec![BigRational::zero(); self.n]; self.k * self.n];
        for i in 1..=self.k * self.n {
            entries[i - 1][self.block_of(i) - 1] = a.clone();
        }
        Ok(TransportMatrix::new(&margins, entries)?)
    }
}

/// All block partitions, ordered lexicographically by assignment vector.
pub fn enumerate_partitions(k: usize, n: usize) -> Vec<BlockPartition> {
    let mut out = Vec::new();
    let mut counts = vec![0usize; n];
    let mut assignment = Vec::with_capacity(k * n);
    fn rec(
        k: usize,
        n: usize,
        counts: &mut Vec<usize>,
        assignment: &mut Vec<usize>,
        out: &mut Vec<BlockPartition>,
    ) {
        if assignment.len() == k * n {
            out.push(BlockPartition {
                k,
                n,
                block_of: assignment.clone(),
            });
            return;
        }
        for j in 1..=n {
            if counts[j - 1] < k {
                counts[j - 1] += 1;
                assignment.push(j);
                rec(k, n, counts, assignment, out);
                assignment.pop();
                counts[j - 1] -= 1;
            }
        }
    }
    rec(k, n, &mut counts, &mut assignment, &mut out);
    out
}

/// A labeled tree on the `n` columns `w_1, ..., w_n`, rooted at `w_n`;
/// `parent[p - 1]` is the parent column of `w_p` for `p < n`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ColumnTree {
    n: usize,
    parent: Vec<usize>,
}

impl ColumnTree {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Parent of the 1-based non-root column `p`.
    pub fn parent(&self, p: usize) -> usize {
        debug_assert!(p < self.n);
        self.parent[p - 1]
    }

    /// Number of columns in the subtree rooted at the 1-based column `p`.
    pub fn subtree_size(&self, p: usize) -> usize {
        let mut size = vec![1usize; self.n];
        // parent[p] > p is not guaranteed; accumulate bottom-up by
        // repeatedly folding leaves.
        let mut children_left = vec![0usize; self.n];
        for q in 1..self.n {
            children_left[self.parent(q) - 1] += 1;
        }
        let mut stack: Vec<usize> = (1..self.n).filter(|&q| children_left[q - 1] == 0).collect();
        while let Some(q) = stack.pop() {
            let par = self.parent(q);
            size[par - 1] += size[q - 1];
            children_left[par - 1] -= 1;
            if children_left[par - 1] == 0 && par != self.n {
                stack.push(par);
            }
        }
        size[p - 1]
    }

    /// Decodes a Pruefer sequence over `1..=n` (length `n - 2`) into a
    /// labeled tree, then roots it at `w_n`.
    pub fn from_pruefer(n: usize, seq: &[usize]) -> Result<Self, CentralError> {
        if n == 0 {
            return Err(CentralError::BadParameters { k: 1, n, a: 1 });
        }
        if seq.len() + 2 != n.max(2) {
            return Err(CentralError::NotInTreeFamily(format!(
                "Pruefer sequence length {} does not match {n} columns",
                seq.len()
            )));
        }
        if n == 1 {
            return Ok(ColumnTree {
                n,
                parent: Vec::new(),
            });
        }
        let mut degree = vec![1usize; n + 1];
        for &s in seq {
            if s == 0 || s > n {
                return Err(CentralError::NotInTreeFamily(format!(
                    "Pruefer entry {s} out of range 1..={n}"
                )));
            }
            degree[s] += 1;
        }
        let mut leaves: BTreeSet<usize> = (1..=n).filter(|&v| degree[v] == 1).collect();
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for &s in seq {
            let leaf = *leaves.iter().next().expect("a tree always has a leaf");
            leaves.remove(&leaf);
            adjacency[leaf].push(s);
            adjacency[s].push(leaf);
            degree[s] -= 1;
            if degree[s] == 1 {
                leaves.insert(s);
            }
        }
        let mut rest = leaves.into_iter();
        let (u, v) = (rest.next().unwrap(), rest.next().unwrap());
        adjacency[u].push(v);
        adjacency[v].push(u);

        // Root at n by breadth-first search.
        let mut parent = vec![0usize; n - 1];
        let mut visited = vec![false; n + 1];
        visited[n] = true;
        let mut queue = std::collections::VecDeque::from([n]);
        while let Some(q) = queue.pop_front() {
            for &next in &adjacency[q] {
                if !visited[next] {
                    visited[next] = true;
                    parent[next - 1] = q;
                    queue.push_back(next);
                }
            }
        }
        Ok(ColumnTree { n, parent })
    }
}

/// All labeled trees on the columns (rooted at `w_n`): `n^(n-2)` of them,
/// via Pruefer sequences.
pub fn enumerate_column_trees(n: usize) -> Vec<ColumnTree> {
    if n <= 2 {
        return vec![ColumnTree::from_pruefer(n, &[]).expect("small trees always decode")];
    }
    let mut out = Vec::new();
    let mut seq = vec![1usize; n - 2];
    loop {
        out.push(ColumnTree::from_pruefer(n, &seq).expect("sequence in range"));
        // Next sequence in mixed radix n.
        let mut pos = n - 2;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if seq[pos] < n {
                seq[pos] += 1;
                break;
            }
            seq[pos] = 1;
        }
    }
}

/// One choice in `[k]` per non-root column: which member of the parent
/// block the column hangs from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct BranchChoices {
    k: usize,
    choice: Vec<usize>,
}

impl BranchChoices {
    pub fn new(k: usize, n: usize, choice: Vec<usize>) -> Result<Self, CentralError> {
        if choice.len() != n - 1 || choice.iter().any(|&b| b == 0 || b > k) {
            return Err(CentralError::NotInTreeFamily(format!(
                "branch choices {choice:?} are not in [1, {k}]^{}",
                n - 1
            )));
        }
        Ok(BranchChoices { k, choice })
    }

    /// Choice for the 1-based non-root column `p`.
    pub fn choice(&self, p: usize) -> usize {
        self.choice[p - 1]
    }
}

/// All `k^(n-1)` branch choices, in lexicographic order.
pub fn enumerate_branch_choices(k: usize, n: usize) -> Vec<BranchChoices> {
    let mut out = Vec::new();
    let mut choice = vec![1usize; n - 1];
    loop {
        out.push(BranchChoices {
            k,
            choice: choice.clone(),
        });
        let mut pos = n - 1;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if choice[pos] < k {
                choice[pos] += 1;
                break;
            }
            choice[pos] = 1;
        }
    }
}

/// The spanning tree of `K_{kn,n}` built from a triple: the partition's
/// matching edges, plus for each non-root column `w_p` an edge to the
/// `b_p`-th member of its parent column's block. The result has right
/// degrees `k + 1` except `k` at `w_n`.
pub fn tree_from_triple(
    partition: &BlockPartition,
    column_tree: &ColumnTree,
    branches: &BranchChoices,
) -> Result<LabeledForest, CentralError> {
    let (k, n) = (partition.k(), partition.n());
    if column_tree.n() != n || branches.choice.len() != n - 1 || branches.k != k {
        return Err(CentralError::NotInTreeFamily(
            "triple components have mismatched parameters".into(),
        ));
    }
    let mut edges = Vec::with_capacity(k * n + n - 1);
    for i in 1..=k * n {
        edges.push(Edge::new(i, partition.block_of(i)));
    }
    for p in 1..n {
        let parent_block = partition.members(column_tree.parent(p));
        let u = parent_block[branches.choice(p) - 1];
        edges.push(Edge::new(u, p));
    }
    Ok(LabeledForest::new(BipartiteShape::new(k * n, n), edges)?)
}

/// Recovers the triple from a spanning tree with the central right degree
/// sequence: rooting at `w_n`, every row's parent column gives the
/// partition, every column's grandparent column gives the column tree, and
/// the position of the column's parent row within that block gives the
/// branch choice.
pub fn triple_from_tree(
    tree: &LabeledForest,
) -> Result<(BlockPartition, ColumnTree, BranchChoices), CentralError> {
    let shape = tree.shape();
    let n = shape.n;
    if n == 0 || !shape.m.is_multiple_of(n) {
        return Err(CentralError::NotInTreeFamily(format!(
            "shape {} x {} is not kn x n",
            shape.m, shape.n
        )));
    }
    let k = shape.m / n;
    if !tree.is_spanning_tree() {
        return Err(CentralError::NotInTreeFamily(
            "subgraph is not a spanning tree".into(),
        ));
    }
    let mut expected = vec![k + 1; n];
    expected[n - 1] = k;
    if tree.as_subgraph().right_degree_sequence() != expected {
        return Err(CentralError::NotInTreeFamily(format!(
            "right degrees {:?} differ from {:?}",
            tree.as_subgraph().right_degree_sequence(),
            expected
        )));
    }
    let view = crate::graph::root_at_wn(tree)?;

    // Partition: each row belongs to its parent column.
    let mut block_of = vec![0usize; k * n];
    for i in 1..=k * n {
        match view.parent(crate::graph::Node::Left(i)) {
            Some(crate::graph::Node::Right(j)) => block_of[i - 1] = j,
            _ => {
                return Err(CentralError::NotInTreeFamily(format!(
                    "row {i} has no column parent"
                )))
            }
        }
    }
    let partition = BlockPartition::new(k, n, block_of)?;

    // Column tree and branch choices from each non-root column's parent row.
    let mut parent = vec![0usize; n.saturating_sub(1)];
    let mut choice = vec![0usize; n.saturating_sub(1)];
    for p in 1..n {
        let u = match view.parent(crate::graph::Node::Right(p)) {
            Some(crate::graph::Node::Left(u)) => u,
            _ => {
                return Err(CentralError::NotInTreeFamily(format!(
                    "column {p} has no row parent"
                )))
            }
        };
        let q = partition.block_of(u);
        parent[p - 1] = q;
        let members = partition.members(q);
        choice[p - 1] = members
            .iter()
            .position(|&x| x == u)
            .expect("parent row is in its own block")
            + 1;
    }
    let column_tree = ColumnTree { n, parent };
    let branches = BranchChoices::new(k, n, choice)?;
    Ok((partition, column_tree, branches))
}

/// All perturbed support trees of the central polytope, sorted
/// canonically. Their number is `max_perturbed_vertex_count(k, n)`.
pub fn enumerate_trees(k: usize, n: usize) -> Result<Vec<LabeledForest>, CentralError> {
    check_params(k, n, 1)?;
    let partitions = enumerate_partitions(k, n);
    let column_trees = enumerate_column_trees(n);
    let branch_choices = enumerate_branch_choices(k, n);
    let mut out = BTreeSet::new();
    for partition in &partitions {
        for column_tree in &column_trees {
            for branches in &branch_choices {
                let tree = tree_from_triple(partition, column_tree, branches)?;
                let fresh = out.insert(tree);
                debug_assert!(fresh, "triples map to distinct trees");
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// The perturbed vertex supported on the tree of a triple, at parameter
/// `t`, in closed form: with `s_p` columns in the column subtree at `w_p`,
/// the matching entry of row `i` is `a - (1 + k * sum of s_p over child
/// columns of i) * t` and the branch entry hanging `w_p` is `k * s_p * t`.
pub fn central_perturbed_matrix(
    partition: &BlockPartition,
    column_tree: &ColumnTree,
    branches: &BranchChoices,
    a: u64,
    t: &BigRational,
) -> Result<TransportMatrix, CentralError> {
    let (k, n) = (partition.k(), partition.n());
    check_params(k, n, a)?;
    let spec = crate::perturb::make_spec(&central_margins(k, n, a)?);
    let margins_t = spec
        .margins_at(t)
        .map_err(|e| CentralError::NotInTreeFamily(format!("parameter out of range: {e}")))?;

    let a = rat::int(a as i64);
    let kq = |p: usize| rat::int((k * column_tree.subtree_size(p)) as i64);
    let mut entries = vec![vec![BigRational::zero(); n]; k * n];

    // Branch edges: column p hangs from row u with entry k * s_p * t;
    // track per-row totals to subtract from the matching entries.
    let mut hanging = vec![BigRational::zero(); k * n + 1];
    for p in 1..n {
        let members = partition.members(column_tree.parent(p));
        let u = members[branches.choice(p) - 1];
        let value = kq(p) * t;
        entries[u - 1][p - 1] = value.clone();
        hanging[u] += value;
    }
    for i in 1..=k * n {
        let j = partition.block_of(i);
        entries[i - 1][j - 1] = &a - t - &hanging[i];
    }
    Ok(TransportMatrix::new(&margins_t, entries)?)
}

/// The generating function of the central polytope, assembled from the
/// triples without any pivoting: one term per tree, apex the partition's
/// vertex, rays the tree's cycle directions. Term order matches the
/// perturbation-based construction (apex, then tree).
pub fn central_mgf(k: usize, n: usize, a: u64) -> Result<MgfExpression, CentralError> {
    check_params(k, n, a)?;
    let mut keyed: Vec<(TransportMatrix, LabeledForest)> = Vec::new();
    for partition in enumerate_partitions(k, n) {
        let apex = partition.vertex(a)?;
        for column_tree in &enumerate_column_trees(n) {
            for branches in &enumerate_branch_choices(k, n) {
                let tree = tree_from_triple(&partition, column_tree, branches)?;
                keyed.push((apex.clone(), tree));
            }
        }
    }
    keyed.sort();
    let shape = BipartiteShape::new(k * n, n);
    let mut terms = Vec::with_capacity(keyed.len());
    for (apex, tree) in keyed {
        let apex_rows: Vec<Vec<i64>> = apex
            .entries()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| {
                        i64::try_from(&x.to_integer()).expect("central apex entries are small")
                    })
                    .collect()
            })
            .collect();
        let mut rays = Vec::with_capacity(shape.m * shape.n - tree.edges().len());
        for e in shape.all_edges() {
            if !tree.contains_edge(&e) {
                rays.push(cyc(&tree, &[e])?);
            }
        }
        terms.push(MgfTerm::new(1, apex_rows, rays));
    }
    Ok(MgfExpression::new(shape, terms))
}

/// All vertices of the central polytope, sorted lexicographically.
pub fn central_vertices(k: usize, n: usize, a: u64) -> Result<Vec<TransportMatrix>, CentralError> {
    check_params(k, n, a)?;
    let mut out: Vec<TransportMatrix> = enumerate_partitions(k, n)
        .iter()
        .map(|p| p.vertex(a))
        .collect::<Result<_, _>>()?;
    out.sort();
    Ok(out)
}
