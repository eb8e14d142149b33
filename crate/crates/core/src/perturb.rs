//! Universal margin perturbation and perturbed vertex enumeration.
//!
//! Shifting the margins to `r(t) = (r_1 - t, ..., r_m - t)` and
//! `c(t) = (c_1, ..., c_{n-1}, c_n - m t)` keeps the totals balanced and, for
//! `0 < t < 1/(K m)` with `K` the least common denominator of the margins,
//! makes the polytope non-degenerate — with a vertex set whose support trees
//! do not depend on `t`. Every vertex of `T(r(t), c(t))` is supported on a
//! spanning tree of `K_{m,n}`, and rounding it entrywise (in the lattice
//! scaled by `K`) yields a vertex of the unperturbed polytope: its limit as
//! `t -> 0`. Grouping perturbed vertices by limit partitions the spanning
//! trees among the original vertices, which is exactly the decomposition the
//! generating functions in [`crate::mgf`] are built from.
//!
//! The fixed evaluation parameter used throughout is `t0 = 1/(2 K m)`, the
//! midpoint denominator choice inside the admissible interval.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::graph::{
    cyc, root_at_wn, BipartiteShape, Edge, GraphError, LabeledForest, ParentSide, RootedTreeView,
};
use crate::polytope::{is_nondegenerate, solve_on_forest, Margins, PolytopeError, TransportMatrix};
use crate::rat;

/// Errors for perturbation and perturbed-vertex enumeration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PerturbError {
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("perturbation parameter t = {t} outside the admissible interval (0, {bound})")]
    ParameterOutOfRange { t: BigRational, bound: BigRational },
    #[error("pivot ratio test tied while entering edge {entering}; margins are degenerate")]
    PivotTie { entering: Edge },
    #[error("a perturbed tree contains {count} vertex supports, expected exactly one")]
    GroupingViolation { count: usize },
    #[error("margins are not central: {0}")]
    NotCentral(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// A margin perturbation: the base margins, the least common denominator
/// `K` of all margins, and the fixed parameter `t0 = 1/(2 K m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSpec {
    base: Margins,
    k_lcm: BigInt,
    t0: BigRational,
}

/// Builds the perturbation for the given margins.
///
/// # Example
/// ```
/// use transpoly::perturb::make_spec;
/// use transpoly::polytope::Margins;
/// use transpoly::rat;
/// let spec = make_spec(&Margins::from_ints(&[1, 1, 2], &[1, 1, 2]).unwrap());
/// assert_eq!(spec.k_lcm(), &num::BigInt::from(1));
/// assert_eq!(spec.t0(), &rat::ratio(1, 6));
/// ```
pub fn make_spec(base: &Margins) -> PerturbationSpec {
    let k_lcm = rat::lcm_of_denominators(base.r().iter().chain(base.c().iter()));
    let m = BigInt::from(base.m());
    let t0 = BigRational::new(BigInt::one(), BigInt::from(2) * &k_lcm * m);
    PerturbationSpec {
        base: base.clone(),
        k_lcm,
        t0,
    }
}

impl PerturbationSpec {
    pub fn base(&self) -> &Margins {
        &self.base
    }

    /// Least common denominator `K` of all base margins.
    pub fn k_lcm(&self) -> &BigInt {
        &self.k_lcm
    }

    /// The fixed parameter `t0 = 1/(2 K m)`.
    pub fn t0(&self) -> &BigRational {
        &self.t0
    }

    /// Upper end `1/(K m)` of the admissible open interval for `t`.
    pub fn admissible_bound(&self) -> BigRational {
        BigRational::new(BigInt::one(), &self.k_lcm * BigInt::from(self.base.m()))
    }

    /// Perturbed margins `(r(t), c(t))`; `t` must lie in `(0, 1/(K m))`.
    pub fn margins_at(&self, t: &BigRational) -> Result<Margins, PerturbError> {
        if !t.is_positive() || *t >= self.admissible_bound() {
            return Err(PerturbError::ParameterOutOfRange {
                t: t.clone(),
                bound: self.admissible_bound(),
            });
        }
        let r: Vec<BigRational> = self.base.r().iter().map(|x| x - t).collect();
        let mut c: Vec<BigRational> = self.base.c().to_vec();
        let m = rat::int(self.base.m() as i64);
        let last = c.len() - 1;
        c[last] = &c[last] - m * t;
        Ok(Margins::new(r, c)?)
    }
}

impl Serialize for PerturbationSpec {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut s = ser.serialize_struct("PerturbationSpec", 3)?;
        s.serialize_field("base", &self.base)?;
        s.serialize_field("k_lcm", &self.k_lcm.to_string())?;
        s.serialize_field("t0", &rat::format(&self.t0))?;
        s.end()
    }
}

/// A vertex of the perturbed polytope: its spanning tree, its matrix at
/// `t0`, and its entrywise limit as `t -> 0` (a vertex of the base
/// polytope).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbedVertex {
    tree: LabeledForest,
    matrix_at_t0: TransportMatrix,
    limit: TransportMatrix,
}

impl PerturbedVertex {
    pub fn tree(&self) -> &LabeledForest {
        &self.tree
    }

    pub fn matrix_at_t0(&self) -> &TransportMatrix {
        &self.matrix_at_t0
    }

    /// The vertex of the base polytope this perturbed vertex collapses to.
    pub fn limit(&self) -> &TransportMatrix {
        &self.limit
    }
}

/// Northwest-corner rule: fills the matrix greedily from the top-left,
/// exhausting one margin per step. On non-degenerate margins the visited
/// cells form a spanning tree supporting a feasible basic solution.
fn northwest_tree(margins: &Margins) -> Result<LabeledForest, PerturbError> {
    let (m, n) = (margins.m(), margins.n());
    let mut rr = margins.r().to_vec();
    let mut cc = margins.c().to_vec();
    let (mut i, mut j) = (0usize, 0usize);
    let mut edges = Vec::with_capacity(m + n - 1);
    loop {
        edges.push(Edge::new(i + 1, j + 1));
        let at_last_cell = i == m - 1 && j == n - 1;
        match rr[i].cmp(&cc[j]) {
            std::cmp::Ordering::Less => {
                cc[j] -= rr[i].clone();
                rr[i] = BigRational::zero();
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                rr[i] -= cc[j].clone();
                cc[j] = BigRational::zero();
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                if !at_last_cell {
                    // Both margins exhaust at once away from the corner:
                    // only possible for degenerate margins.
                    return Err(PerturbError::PivotTie {
                        entering: Edge::new(i + 1, j + 1),
                    });
                }
                break;
            }
        }
        if at_last_cell {
            break;
        }
    }
    LabeledForest::new(BipartiteShape::new(m, n), edges)
        .map_err(|e| PerturbError::Internal(format!("northwest cells form a cycle: {e}")))
}

/// Enumerates the support trees of all vertices of a non-degenerate
/// polytope by breadth-first pivoting from the northwest-corner tree:
/// entering a non-tree edge moves along its cycle direction until the
/// unique minimal entry among the decreasing positions hits zero, and that
/// position leaves the tree. Returns canonically sorted trees.
fn pivot_enumerate(margins: &Margins) -> Result<Vec<LabeledForest>, PerturbError> {
    debug_assert!(
        is_nondegenerate(margins),
        "pivot enumeration requires non-degenerate margins"
    );
    let shape = margins.shape();
    let start = northwest_tree(margins)?;
    let mut seen: BTreeSet<LabeledForest> = BTreeSet::new();
    let mut queue: VecDeque<LabeledForest> = VecDeque::new();
    seen.insert(start.clone());
    queue.push_back(start);

    while let Some(tree) = queue.pop_front() {
        let matrix = solve_on_forest(margins, &tree)?;
        debug_assert!(
            tree.edges()
                .iter()
                .all(|e| matrix.entry(e.position().0, e.position().1).is_positive()),
            "non-degenerate vertices are strictly positive on their tree"
        );
        for entering in shape.all_edges() {
            if tree.contains_edge(&entering) {
                continue;
            }
            let ray = cyc(&tree, &[entering])?;
            // Ratio test over the decreasing (sign -1) positions.
            let mut best: Option<(&BigRational, Edge)> = None;
            let mut tied = false;
            for (i, j, sign) in ray.signed_entries() {
                if sign != -1 {
                    continue;
                }
                let value = matrix.entry(i, j);
                match best {
                    None => best = Some((value, Edge::new(i + 1, j + 1))),
                    Some((current, _)) => {
                        if value < current {
                            best = Some((value, Edge::new(i + 1, j + 1)));
                            tied = false;
                        } else if value == current {
                            tied = true;
                        }
                    }
                }
            }
            let (_, leaving) = best.ok_or_else(|| {
                PerturbError::Internal("pivot cycle has no decreasing position".into())
            })?;
            if tied {
                return Err(PerturbError::PivotTie { entering });
            }
            let next_edges: Vec<Edge> = tree
                .edges()
                .iter()
                .copied()
                .filter(|e| *e != leaving)
                .chain([entering])
                .collect();
            let next = LabeledForest::new(shape, next_edges)
                .map_err(|e| PerturbError::Internal(format!("pivot produced a cycle: {e}")))?;
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// Support trees of the perturbed vertices at parameter `t`. By the
/// perturbation's key property this set does not depend on `t` inside the
/// admissible interval, which makes it a property of the base margins.
pub fn perturbed_trees_at(
    spec: &PerturbationSpec,
    t: &BigRational,
) -> Result<Vec<LabeledForest>, PerturbError> {
    pivot_enumerate(&spec.margins_at(t)?)
}

/// The limit, as `t -> 0`, of the perturbed vertex supported on `tree`:
/// on an edge whose parent (in the tree rooted at `w_n`) is the right
/// endpoint the perturbed entry rises to the next multiple of `1/K`, on an
/// edge whose parent is the left endpoint it falls to the previous one.
/// The result is a vertex of the base polytope.
pub fn limit_vertex(
    spec: &PerturbationSpec,
    tree: &LabeledForest,
) -> Result<TransportMatrix, PerturbError> {
    let margins_t0 = spec.margins_at(&spec.t0)?;
    let matrix = solve_on_forest(&margins_t0, tree)?;
    let view = root_at_wn(tree)?;
    limit_of_solved(spec, &view, &matrix)
}

fn limit_of_solved(
    spec: &PerturbationSpec,
    view: &RootedTreeView,
    matrix_at_t0: &TransportMatrix,
) -> Result<TransportMatrix, PerturbError> {
    let shape = view.shape();
    let k = BigRational::from_integer(spec.k_lcm.clone());
    let mut entries = vec![vec![BigRational::zero(); shape.n]; shape.m];
    for edge in view.tree().edges() {
        let (i, j) = edge.position();
        let scaled = matrix_at_t0.entry(i, j) * &k;
        let rounded = match view.parent_side(edge) {
            ParentSide::Right => scaled.ceil(),
            ParentSide::Left => scaled.floor(),
        };
        entries[i][j] = rounded / &k;
    }
    TransportMatrix::new(spec.base(), entries)
        .map_err(|e| PerturbError::Internal(format!("limit matrix violates the base margins: {e}")))
}

/// Recomputes the perturbed vertex matrix at parameter `t` from its limit:
/// entries fall by (left vertices below) * t on edges into a right parent
/// and rise by (left vertices below) * t on edges into a left parent. This
/// is the exact `t`-dependence of every perturbed vertex, and inverts
/// [`limit_vertex`].
pub fn matrix_from_limit_at(
    spec: &PerturbationSpec,
    tree: &LabeledForest,
    limit: &TransportMatrix,
    t: &BigRational,
) -> Result<TransportMatrix, PerturbError> {
    let margins_t = spec.margins_at(t)?;
    let view = root_at_wn(tree)?;
    let shape = view.shape();
    let mut entries = vec![vec![BigRational::zero(); shape.n]; shape.m];
    for edge in tree.edges() {
        let (i, j) = edge.position();
        let (u, w) = edge.endpoints();
        entries[i][j] = match view.parent_side(edge) {
            ParentSide::Right => {
                limit.entry(i, j) - rat::int(view.left_subtree_count(u) as i64) * t
            }
            ParentSide::Left => limit.entry(i, j) + rat::int(view.left_subtree_count(w) as i64) * t,
        };
    }
    Ok(TransportMatrix::new(&margins_t, entries)?)
}

/// All vertices of the perturbed polytope at `t0`, sorted by support tree.
pub fn enumerate_perturbed_vertices(
    spec: &PerturbationSpec,
) -> Result<Vec<PerturbedVertex>, PerturbError> {
    let margins_t0 = spec.margins_at(&spec.t0)?;
    let trees = pivot_enumerate(&margins_t0)?;
    let mut out = Vec::with_capacity(trees.len());
    for tree in trees {
        let matrix_at_t0 = solve_on_forest(&margins_t0, &tree)?;
        let view = root_at_wn(&tree)?;
        let limit = limit_of_solved(spec, &view, &matrix_at_t0)?;
        out.push(PerturbedVertex {
            tree,
            matrix_at_t0,
            limit,
        });
    }
    Ok(out)
}

/// One vertex of the base polytope together with the perturbed vertices
/// (indices into the enumeration) that collapse to it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitGroup {
    limit: TransportMatrix,
    members: Vec<usize>,
}

impl LimitGroup {
    pub fn limit(&self) -> &TransportMatrix {
        &self.limit
    }

    /// Indices into [`PerturbationGrouping::perturbed`], ascending.
    pub fn members(&self) -> &[usize] {
        &self.members
    }
}

/// The perturbed vertices partitioned by their limits. The groups, read as
/// {limit vertex -> set of spanning trees}, say that a spanning tree `T`
/// belongs to vertex `M` exactly when `T` contains the support of `M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationGrouping {
    perturbed: Vec<PerturbedVertex>,
    groups: Vec<LimitGroup>,
}

impl PerturbationGrouping {
    pub fn perturbed(&self) -> &[PerturbedVertex] {
        &self.perturbed
    }

    /// Groups sorted by limit matrix; their member lists partition
    /// `0..perturbed.len()`.
    pub fn groups(&self) -> &[LimitGroup] {
        &self.groups
    }

    /// The group whose limit has the given support forest members, if any.
    pub fn group_of_limit(&self, limit: &TransportMatrix) -> Option<&LimitGroup> {
        self.groups.iter().find(|g| g.limit() == limit)
    }
}

/// Enumerates perturbed vertices and groups them by limit, validating that
/// every spanning tree contains the support of exactly one limit vertex.
pub fn group_by_limit(spec: &PerturbationSpec) -> Result<PerturbationGrouping, PerturbError> {
    let perturbed = enumerate_perturbed_vertices(spec)?;
    let mut by_limit: BTreeMap<TransportMatrix, Vec<usize>> = BTreeMap::new();
    for (idx, pv) in perturbed.iter().enumerate() {
        by_limit.entry(pv.limit.clone()).or_default().push(idx);
    }

    // Containment cross-check: each tree must contain exactly one limit
    // support, and it must be the support of that tree's own limit.
    let limits: Vec<&TransportMatrix> = by_limit.keys().collect();
    for pv in &perturbed {
        let containing: Vec<&&TransportMatrix> = limits
            .iter()
            .filter(|l| l.aux().is_subgraph_of(pv.tree.as_subgraph()))
            .collect();
        if containing.len() != 1 || **containing[0] != pv.limit {
            return Err(PerturbError::GroupingViolation {
                count: containing.len(),
            });
        }
    }

    let groups = by_limit
        .into_iter()
        .map(|(limit, members)| LimitGroup { limit, members })
        .collect();
    Ok(PerturbationGrouping { perturbed, groups })
}

/// Result of comparing the perturbed vertex count against the closed-form
/// maximum for central polytopes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum MaxVertexCheck {
    /// The shape is `kn x n`: the count is compared with
    /// `(kn)! / (k!)^n * n^(n-2) * k^(n-1)`.
    Formula {
        count: String,
        formula: String,
        matches: bool,
    },
    /// The shape is not `kn x n`; only the raw count is reported.
    CountOnly { count: String },
}

/// For central margins (all row margins equal, all column margins equal),
/// counts the perturbed vertices and — when the shape is `kn x n` — checks
/// the count against the closed-form maximum, which central polytopes
/// attain.
pub fn max_vertex_count_check(spec: &PerturbationSpec) -> Result<MaxVertexCheck, PerturbError> {
    let base = spec.base();
    let all_equal = |v: &[BigRational]| v.iter().all(|x| x == &v[0]);
    if !all_equal(base.r()) || !all_equal(base.c()) {
        return Err(PerturbError::NotCentral(
            "row and column margins must each be constant".into(),
        ));
    }
    let count = BigInt::from(enumerate_perturbed_vertices(spec)?.len());
    let (m, n) = (base.m(), base.n());
    if m % n == 0 {
        let k = m / n;
        let formula = crate::central::max_perturbed_vertex_count(k, n);
        let matches = count == formula;
        Ok(MaxVertexCheck::Formula {
            count: count.to_string(),
            formula: formula.to_string(),
            matches,
        })
    } else {
        Ok(MaxVertexCheck::CountOnly {
            count: count.to_string(),
        })
    }
}
