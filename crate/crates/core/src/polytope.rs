//! Transportation polytopes: margins, matrices, vertices, and cones.
//!
//! `T(r, c)` is the polytope of nonnegative `m x n` matrices whose row sums
//! are `r` and column sums are `c`. Its vertices are exactly the feasible
//! matrices whose support graph in `K_{m,n}` is a forest, and all the local
//! geometry at a vertex (feasible cone, adjacency) is read off that forest.
//!
//! The vertex enumeration here goes through the universal margin
//! perturbation of [`crate::perturb`]: perturbed margins are always
//! non-degenerate, their vertices are spanning trees found by pivoting, and
//! rounding the perturbed vertices back recovers every vertex of the
//! original polytope.

use std::fmt;

use num::{BigRational, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::graph::{
    cyc, enumerate_augmentations, unique_cycle_of_union, BipartiteShape, Edge, LabeledForest, Node,
    RayMatrix, Subgraph,
};
use crate::rat;

/// Errors for margin validation, forest solving, and vertex queries.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolytopeError {
    #[error("margins must have at least one row and one column")]
    EmptyMargins,
    #[error("margin {side}[{index}] = {value} is not positive")]
    NonPositiveMargin {
        side: &'static str,
        index: usize,
        value: BigRational,
    },
    #[error("margin totals differ: sum(r) = {r_total}, sum(c) = {c_total}")]
    MarginSumMismatch {
        r_total: BigRational,
        c_total: BigRational,
    },
    #[error("matrix shape does not match the margins shape")]
    ShapeMismatch,
    #[error("matrix entry ({i}, {j}) = {value} is negative")]
    NegativeEntry {
        i: usize,
        j: usize,
        value: BigRational,
    },
    #[error(
        "matrix does not satisfy the margins: {side} sum {index} is {actual}, expected {expected}"
    )]
    MarginViolated {
        side: &'static str,
        index: usize,
        actual: BigRational,
        expected: BigRational,
    },
    #[error("forest does not determine a unique matrix: component with left {left:?} and right {right:?} has margin sums {left_sum} vs {right_sum}")]
    NotUnique {
        left: Vec<usize>,
        right: Vec<usize>,
        left_sum: BigRational,
        right_sum: BigRational,
    },
    #[error("forest forces a negative entry at ({i}, {j}): {value}")]
    Infeasible {
        i: usize,
        j: usize,
        value: BigRational,
    },
    #[error("matrix is not a vertex: its support contains a cycle")]
    NotAVertex,
    #[error("both arguments are the same vertex")]
    SameVertex,
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Validated margins `(r, c)` of a transportation polytope: positive
/// rationals with equal totals.
///
/// Serialized form is `{"r": ["p/q", ...], "c": ["p/q", ...]}` with every
/// scalar in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Margins {
    #[serde(with = "rat::serde_rat_vec")]
    r: Vec<BigRational>,
    #[serde(with = "rat::serde_rat_vec")]
    c: Vec<BigRational>,
}

impl Margins {
    pub fn new(r: Vec<BigRational>, c: Vec<BigRational>) -> Result<Self, PolytopeError> {
        if r.is_empty() || c.is_empty() {
            return Err(PolytopeError::EmptyMargins);
        }
        for (side, vals) in [("r", &r), ("c", &c)] {
            for (index, value) in vals.iter().enumerate() {
                if !value.is_positive() {
                    return Err(PolytopeError::NonPositiveMargin {
                        side,
                        index: index + 1,
                        value: value.clone(),
                    });
                }
            }
        }
        let r_total: BigRational = r.iter().sum();
        let c_total: BigRational = c.iter().sum();
        if r_total != c_total {
            return Err(PolytopeError::MarginSumMismatch { r_total, c_total });
        }
        Ok(Margins { r, c })
    }

    /// Margins from small integers, for fixtures and examples.
    pub fn from_ints(r: &[i64], c: &[i64]) -> Result<Self, PolytopeError> {
        Margins::new(
            r.iter().map(|&x| rat::int(x)).collect(),
            c.iter().map(|&x| rat::int(x)).collect(),
        )
    }

    pub fn m(&self) -> usize {
        self.r.len()
    }

    pub fn n(&self) -> usize {
        self.c.len()
    }

    pub fn shape(&self) -> BipartiteShape {
        BipartiteShape::new(self.m(), self.n())
    }

    pub fn r(&self) -> &[BigRational] {
        &self.r
    }

    pub fn c(&self) -> &[BigRational] {
        &self.c
    }

    /// Common total `sum(r) == sum(c)`.
    pub fn total(&self) -> BigRational {
        self.r.iter().sum()
    }

    /// True when every margin is an integer.
    pub fn is_integral(&self) -> bool {
        self.r.iter().chain(self.c.iter()).all(rat::is_integer)
    }

    /// Margins of the dilated polytope `t * T(r, c)`.
    pub fn dilated(&self, t: u64) -> Margins {
        assert!(t >= 1, "dilation factor must be positive");
        let f = rat::int(t as i64);
        Margins {
            r: self.r.iter().map(|x| x * &f).collect(),
            c: self.c.iter().map(|x| x * &f).collect(),
        }
    }

    /// Dimension `(m - 1) * (n - 1)` of the polytope.
    pub fn dimension(&self) -> usize {
        (self.m() - 1) * (self.n() - 1)
    }
}

impl<'de> Deserialize<'de> for Margins {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            #[serde(with = "rat::serde_rat_vec")]
            r: Vec<BigRational>,
            #[serde(with = "rat::serde_rat_vec")]
            c: Vec<BigRational>,
        }
        let repr = Repr::deserialize(de)?;
        Margins::new(repr.r, repr.c).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Margins {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_vec = |v: &[BigRational]| v.iter().map(rat::format).collect::<Vec<_>>().join(", ");
        write!(f, "r = ({}); c = ({})", fmt_vec(&self.r), fmt_vec(&self.c))
    }
}

/// A nonnegative rational `m x n` matrix, ordered lexicographically on its
/// row-major entries (the canonical vertex order everywhere in this crate).
///
/// Serialized form is the row-major matrix of `"p/q"` strings.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct TransportMatrix {
    #[serde(with = "rat::serde_rat_matrix")]
    entries: Vec<Vec<BigRational>>,
}

impl TransportMatrix {
    /// Validates nonnegativity and both margin families.
    pub fn new(margins: &Margins, entries: Vec<Vec<BigRational>>) -> Result<Self, PolytopeError> {
        let (m, n) = (margins.m(), margins.n());
        if entries.len() != m || entries.iter().any(|row| row.len() != n) {
            return Err(PolytopeError::ShapeMismatch);
        }
        for (i, row) in entries.iter().enumerate() {
            for (j, value) in row.iter().enumerate() {
                if value.is_negative() {
                    return Err(PolytopeError::NegativeEntry {
                        i: i + 1,
                        j: j + 1,
                        value: value.clone(),
                    });
                }
            }
        }
        for (i, row) in entries.iter().enumerate() {
            let actual: BigRational = row.iter().sum();
            if actual != margins.r[i] {
                return Err(PolytopeError::MarginViolated {
                    side: "row",
                    index: i + 1,
                    actual,
                    expected: margins.r[i].clone(),
                });
            }
        }
        for j in 0..n {
            let actual: BigRational = entries.iter().map(|row| &row[j]).sum();
            if actual != margins.c[j] {
                return Err(PolytopeError::MarginViolated {
                    side: "column",
                    index: j + 1,
                    actual,
                    expected: margins.c[j].clone(),
                });
            }
        }
        Ok(TransportMatrix { entries })
    }

    /// Matrix from small integers, for fixtures and examples.
    pub fn from_ints(margins: &Margins, entries: &[&[i64]]) -> Result<Self, PolytopeError> {
        TransportMatrix::new(
            margins,
            entries
                .iter()
                .map(|row| row.iter().map(|&x| rat::int(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries[0].len()
    }

    pub fn shape(&self) -> BipartiteShape {
        BipartiteShape::new(self.rows(), self.cols())
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Vec<BigRational>] {
        &self.entries
    }

    /// Entry at 0-based position `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i][j]
    }

    /// True when every entry is an integer.
    pub fn is_integral(&self) -> bool {
        self.entries.iter().flatten().all(rat::is_integer)
    }

    /// Support graph: the edge `(u_i, w_j)` for every nonzero entry.
    /// An all-positive matrix maps to the complete bipartite edge set.
    pub fn aux(&self) -> Subgraph {
        let shape = self.shape();
        let edges: Vec<Edge> = self
            .entries
            .iter()
            .enumerate()
            .flat_map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(move |(j, _)| Edge::new(i + 1, j + 1))
            })
            .collect();
        Subgraph::new(shape, edges).expect("support edges fit the matrix shape")
    }

    /// Compact one-line key `"a,b;c,d"` in row-major order; used as a
    /// deterministic map key in serialized groupings.
    pub fn key(&self) -> String {
        self.entries
            .iter()
            .map(|row| row.iter().map(rat::format).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl fmt::Display for TransportMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            let cells: Vec<String> = row.iter().map(rat::format).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// A vertex of a transportation polytope: the matrix, its support forest,
/// and whether the vertex is degenerate (support smaller than a spanning
/// tree).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexRecord {
    matrix: TransportMatrix,
    aux: LabeledForest,
    degenerate: bool,
}

impl VertexRecord {
    /// Wraps a feasible matrix as a vertex; errors with
    /// [`PolytopeError::NotAVertex`] when the support contains a cycle.
    pub fn new(matrix: TransportMatrix) -> Result<Self, PolytopeError> {
        let shape = matrix.shape();
        let support = matrix.aux();
        let aux = LabeledForest::from_subgraph(support).map_err(|_| PolytopeError::NotAVertex)?;
        let degenerate = aux.edges().len() < shape.m + shape.n - 1;
        Ok(VertexRecord {
            matrix,
            aux,
            degenerate,
        })
    }

    pub fn matrix(&self) -> &TransportMatrix {
        &self.matrix
    }

    pub fn aux(&self) -> &LabeledForest {
        &self.aux
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }
}

/// Sorted deduplicated sums of the nonempty proper subsets of `vals`
/// (every value is positive, so these are exactly the subset sums strictly
/// between zero and the total).
fn proper_subset_sums(vals: &[BigRational]) -> Vec<BigRational> {
    let mut sums: Vec<BigRational> = vec![BigRational::zero()];
    for v in vals {
        let mut next: Vec<BigRational> = sums.iter().map(|s| s + v).collect();
        next.extend_from_slice(&sums);
        next.sort();
        next.dedup();
        sums = next;
    }
    let total: BigRational = vals.iter().sum();
    sums.retain(|s| !s.is_zero() && *s != total);
    sums
}

/// True when `T(r, c)` is non-degenerate: the only index sets `I, J` with
/// `sum(r[I]) == sum(c[J])` are the full ones. Non-degenerate polytopes are
/// simple and all their vertices have spanning-tree support.
///
/// # Example
/// ```
/// use transpoly::polytope::{is_nondegenerate, Margins};
/// let central = Margins::from_ints(&[1, 1, 2], &[1, 1, 2]).unwrap();
/// assert!(!is_nondegenerate(&central));
/// ```
pub fn is_nondegenerate(margins: &Margins) -> bool {
    // Proper nonempty subsets of one side can only match proper nonempty
    // subsets of the other (totals are equal and all margins positive), so
    // compare the two sorted proper-sum lists with a single merge pass.
    let rs = proper_subset_sums(margins.r());
    let cs = proper_subset_sums(margins.c());
    let (mut a, mut b) = (rs.iter(), cs.iter());
    let (mut x, mut y) = (a.next(), b.next());
    while let (Some(xv), Some(yv)) = (x, y) {
        match xv.cmp(yv) {
            std::cmp::Ordering::Less => x = a.next(),
            std::cmp::Ordering::Greater => y = b.next(),
            std::cmp::Ordering::Equal => return false,
        }
    }
    true
}

/// The unique matrix supported on a forest with the given margins, when it
/// exists: each leaf edge must carry the full remaining margin of its leaf
/// vertex, which forces every entry.
///
/// Zero entries are allowed in the result (the matrix is then supported on
/// a proper subforest). Errors: [`PolytopeError::NotUnique`] when some
/// connected component has unequal left/right margin sums (isolated
/// vertices included), [`PolytopeError::Infeasible`] when a forced entry is
/// negative.
pub fn solve_on_forest(
    margins: &Margins,
    forest: &LabeledForest,
) -> Result<TransportMatrix, PolytopeError> {
    let shape = margins.shape();
    if forest.shape() != shape {
        return Err(PolytopeError::ShapeMismatch);
    }

    // Determinacy check first: every component must balance.
    for component in forest.components() {
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut left_sum = BigRational::zero();
        let mut right_sum = BigRational::zero();
        for node in component {
            match node {
                Node::Left(i) => {
                    left_sum += &margins.r()[i - 1];
                    left.push(i);
                }
                Node::Right(j) => {
                    right_sum += &margins.c()[j - 1];
                    right.push(j);
                }
            }
        }
        if left_sum != right_sum {
            return Err(PolytopeError::NotUnique {
                left,
                right,
                left_sum,
                right_sum,
            });
        }
    }

    let mut entries = vec![vec![BigRational::zero(); shape.n]; shape.m];
    let mut rr = margins.r().to_vec();
    let mut cc = margins.c().to_vec();
    let mut incident: Vec<Vec<Edge>> = vec![Vec::new(); shape.vertex_count()];
    let index = |node: Node| match node {
        Node::Left(i) => i - 1,
        Node::Right(j) => shape.m + j - 1,
    };
    for e in forest.edges() {
        let (u, w) = e.endpoints();
        incident[index(u)].push(*e);
        incident[index(w)].push(*e);
    }
    let mut degree: Vec<usize> = incident.iter().map(Vec::len).collect();
    let mut removed: std::collections::BTreeSet<Edge> = std::collections::BTreeSet::new();

    // Peel leaves in deterministic (dense index) order.
    let mut queue: std::collections::BTreeSet<usize> = (0..shape.vertex_count())
        .filter(|&v| degree[v] == 1)
        .collect();
    while let Some(&v) = queue.iter().next() {
        queue.remove(&v);
        if degree[v] != 1 {
            continue;
        }
        let e = *incident[v]
            .iter()
            .find(|e| !removed.contains(e))
            .expect("a degree-one vertex has an unprocessed edge");
        let (i, j) = e.position();
        let value = if v < shape.m {
            rr[i].clone()
        } else {
            cc[j].clone()
        };
        if value.is_negative() {
            return Err(PolytopeError::Infeasible {
                i: i + 1,
                j: j + 1,
                value,
            });
        }
        entries[i][j] = value.clone();
        rr[i] -= &value;
        cc[j] -= &value;
        removed.insert(e);
        let (u, w) = e.endpoints();
        for node in [u, w] {
            let idx = index(node);
            degree[idx] -= 1;
            if degree[idx] == 1 {
                queue.insert(idx);
            }
        }
    }
    debug_assert_eq!(removed.len(), forest.edges().len());
    debug_assert!(rr.iter().all(Zero::is_zero) && cc.iter().all(Zero::is_zero));

    TransportMatrix::new(margins, entries)
}

/// All vertices of `T(r, c)`, canonically sorted (matrix-lexicographic).
///
/// Enumerates via the universal perturbation: every vertex of the perturbed
/// polytope is found by pivoting, and the vertices of the original polytope
/// are exactly the distinct limits of the perturbed ones.
pub fn enumerate_vertices(margins: &Margins) -> Result<Vec<VertexRecord>, PolytopeError> {
    let spec = crate::perturb::make_spec(margins);
    let grouping = crate::perturb::group_by_limit(&spec)
        .map_err(|e| PolytopeError::Internal(e.to_string()))?;
    let mut out = Vec::with_capacity(grouping.groups().len());
    for group in grouping.groups() {
        out.push(VertexRecord::new(group.limit().clone())?);
    }
    // Groups are already sorted by limit matrix.
    debug_assert!(out.windows(2).all(|w| w[0].matrix() < w[1].matrix()));
    Ok(out)
}

/// Generating rays of the feasible cone at a vertex: the signed matrices of
/// all valid augmentations of its support forest, canonically sorted. At a
/// non-degenerate vertex these are the `m*n - (m + n - 1)` single-edge
/// augmentations of its spanning tree.
pub fn feasible_cone_rays(vertex: &VertexRecord) -> Vec<RayMatrix> {
    let mut rays: Vec<RayMatrix> = enumerate_augmentations(vertex.aux())
        .into_iter()
        .map(|(_, ray)| ray)
        .collect();
    rays.sort();
    rays.dedup();
    rays
}

/// Tests adjacency of two distinct vertices; on success returns the signed
/// cycle matrix of the connecting edge direction (pointing from `a` toward
/// `b`). Two vertices are adjacent exactly when the union of their support
/// forests has a unique cycle.
pub fn adjacent(a: &VertexRecord, b: &VertexRecord) -> Result<Option<RayMatrix>, PolytopeError> {
    if a.matrix() == b.matrix() {
        return Err(PolytopeError::SameVertex);
    }
    let Some(cycle) = unique_cycle_of_union(a.aux(), b.aux()) else {
        return Ok(None);
    };
    let ee: Vec<Edge> = cycle
        .iter()
        .copied()
        .filter(|e| !a.aux().contains_edge(e))
        .collect();
    let ray = cyc(a.aux(), &ee)
        .map_err(|e| PolytopeError::Internal(format!("adjacency cycle is not augmenting: {e}")))?;
    Ok(Some(ray))
}
