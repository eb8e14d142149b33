//! Multivariate generating functions of transportation polytopes.
//!
//! The generating function of an integral polytope `P` is the sum of the
//! monomials `z^M = prod z_ij^(M_ij)` over its lattice points, written as a
//! short sum of rational-function terms
//!
//! ```text
//!   sum_T  z^(apex_T) * prod_k 1 / (1 - z^(ray_{T,k}))
//! ```
//!
//! with one term per support tree `T` of the perturbed polytope: the apex is
//! the limit vertex that `T` collapses to, and the rays are the cycle
//! directions `cyc(T, e)` over the non-tree edges `e`. Grouping terms by
//! apex refines the classical vertex-cone decomposition, and for
//! non-degenerate margins (one tree per vertex) it coincides with it.

use std::fmt;

use num::{BigRational, One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::graph::{cyc, BipartiteShape, GraphError, RayMatrix};
use crate::perturb::{group_by_limit, make_spec, PerturbError};
use crate::polytope::{
    enumerate_vertices, is_nondegenerate, Margins, PolytopeError, TransportMatrix, VertexRecord,
};
use crate::rat;

/// Errors for generating-function construction and evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MgfError {
    #[error("generating functions require integral margins")]
    IntegralRequired,
    #[error("margins are degenerate; use the perturbation-based construction")]
    Degenerate,
    #[error("evaluation point is {got_m} x {got_n}, expected {m} x {n}")]
    ShapeMismatch {
        m: usize,
        n: usize,
        got_m: usize,
        got_n: usize,
    },
    #[error("evaluation point has a zero entry at ({i}, {j})")]
    ZeroPointEntry { i: usize, j: usize },
    #[error("evaluation point lies on a pole: z^ray = 1 for ray {ray}")]
    PoleAt { ray: RayMatrix },
    #[error("matrix is not a vertex of the polytope of its own margins")]
    VertexNotFound,
    #[error(transparent)]
    Perturb(#[from] PerturbError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// One term `sign * z^apex * prod 1/(1 - z^ray)` of a generating function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MgfTerm {
    sign: i8,
    apex: Vec<Vec<i64>>,
    rays: Vec<RayMatrix>,
}

impl MgfTerm {
    pub fn new(sign: i8, apex: Vec<Vec<i64>>, rays: Vec<RayMatrix>) -> Self {
        assert!(sign == 1 || sign == -1, "sign must be +1 or -1");
        MgfTerm { sign, apex, rays }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// The lattice apex of the term's shifted unimodular cone.
    pub fn apex(&self) -> &[Vec<i64>] {
        &self.apex
    }

    pub fn rays(&self) -> &[RayMatrix] {
        &self.rays
    }
}

/// A generating function as a sum of unimodular-cone terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MgfExpression {
    m: usize,
    n: usize,
    terms: Vec<MgfTerm>,
}

impl MgfExpression {
    pub fn new(shape: BipartiteShape, terms: Vec<MgfTerm>) -> Self {
        MgfExpression {
            m: shape.m,
            n: shape.n,
            terms,
        }
    }

    pub fn shape(&self) -> BipartiteShape {
        BipartiteShape::new(self.m, self.n)
    }

    pub fn terms(&self) -> &[MgfTerm] {
        &self.terms
    }

    /// Evaluates the rational function at a matrix of nonzero rationals.
    /// Fails on a pole, i.e. whenever some `z^ray = 1`.
    pub fn evaluate(&self, z: &[Vec<BigRational>]) -> Result<BigRational, MgfError> {
        self.check_point(z)?;
        let mut total = BigRational::zero();
        for term in &self.terms {
            let mut value = monomial_i64(z, &term.apex);
            for ray in &term.rays {
                let factor = BigRational::one() - monomial_i64(z, ray.entries());
                if factor.is_zero() {
                    return Err(MgfError::PoleAt { ray: ray.clone() });
                }
                value /= factor;
            }
            if term.sign < 0 {
                value = -value;
            }
            total += value;
        }
        Ok(total)
    }

    /// The generating function of the dilation `t * P`: same cones, apexes
    /// scaled by `t`.
    pub fn dilate(&self, t: u64) -> MgfExpression {
        assert!(t >= 1, "dilation factor must be positive");
        let t = t as i64;
        let terms = self
            .terms
            .iter()
            .map(|term| MgfTerm {
                sign: term.sign,
                apex: term
                    .apex
                    .iter()
                    .map(|row| row.iter().map(|x| x * t).collect())
                    .collect(),
                rays: term.rays.clone(),
            })
            .collect();
        MgfExpression {
            m: self.m,
            n: self.n,
            terms,
        }
    }

    fn check_point(&self, z: &[Vec<BigRational>]) -> Result<(), MgfError> {
        if z.len() != self.m || z.iter().any(|row| row.len() != self.n) {
            return Err(MgfError::ShapeMismatch {
                m: self.m,
                n: self.n,
                got_m: z.len(),
                got_n: z.first().map_or(0, Vec::len),
            });
        }
        for (i, row) in z.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                if entry.is_zero() {
                    return Err(MgfError::ZeroPointEntry { i, j });
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for MgfExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, term) in self.terms.iter().enumerate() {
            if idx > 0 {
                write!(f, " ")?;
            }
            write!(
                f,
                "{} z^{:?}",
                if term.sign > 0 { "+" } else { "-" },
                term.apex
            )?;
            for ray in &term.rays {
                write!(f, " / (1 - z^{ray})")?;
            }
        }
        Ok(())
    }
}

fn monomial_i64<R: AsRef<[i64]>>(z: &[Vec<BigRational>], exponents: &[R]) -> BigRational {
    let mut value = BigRational::one();
    for (row, exps) in z.iter().zip(exponents) {
        for (entry, &e) in row.iter().zip(exps.as_ref()) {
            if e != 0 {
                value *= rat::pow(entry, e);
            }
        }
    }
    value
}

fn apex_entries(matrix: &TransportMatrix) -> Result<Vec<Vec<i64>>, MgfError> {
    matrix
        .entries()
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    if !rat::is_integer(x) {
                        return Err(MgfError::IntegralRequired);
                    }
                    i64::try_from(&x.to_integer()).map_err(|_| MgfError::IntegralRequired)
                })
                .collect()
        })
        .collect()
}

fn rays_of_tree(tree: &crate::graph::LabeledForest) -> Result<Vec<RayMatrix>, MgfError> {
    let shape = tree.shape();
    let mut rays = Vec::with_capacity(shape.m * shape.n - tree.edges().len());
    for e in shape.all_edges() {
        if !tree.contains_edge(&e) {
            rays.push(cyc(tree, &[e])?);
        }
    }
    Ok(rays)
}

/// The generating function of `T(r, c)` for integral margins, degenerate or
/// not, via the margin perturbation: one positive term per perturbed
/// support tree, grouped by the vertex the tree collapses to. Terms are
/// ordered by apex (lexicographically), then by tree.
pub fn polytope_mgf(margins: &Margins) -> Result<MgfExpression, MgfError> {
    if !margins.is_integral() {
        return Err(MgfError::IntegralRequired);
    }
    let spec = make_spec(margins);
    let grouping = group_by_limit(&spec)?;
    let mut terms = Vec::with_capacity(grouping.perturbed().len());
    for group in grouping.groups() {
        let apex = apex_entries(group.limit())?;
        for &idx in group.members() {
            let tree = grouping.perturbed()[idx].tree();
            terms.push(MgfTerm {
                sign: 1,
                apex: apex.clone(),
                rays: rays_of_tree(tree)?,
            });
        }
    }
    Ok(MgfExpression {
        m: margins.m(),
        n: margins.n(),
        terms,
    })
}

/// The generating function of a non-degenerate integral polytope straight
/// from its vertices: every vertex is supported on a spanning tree, whose
/// cycle directions generate the vertex cone. Returns
/// [`MgfError::Degenerate`] when the margins are degenerate.
pub fn polytope_mgf_nondegenerate(margins: &Margins) -> Result<MgfExpression, MgfError> {
    if !margins.is_integral() {
        return Err(MgfError::IntegralRequired);
    }
    if !is_nondegenerate(margins) {
        return Err(MgfError::Degenerate);
    }
    let mut terms = Vec::new();
    for vertex in enumerate_vertices(margins)? {
        terms.push(MgfTerm {
            sign: 1,
            apex: apex_entries(vertex.matrix())?,
            rays: rays_of_tree(vertex.aux())?,
        });
    }
    Ok(MgfExpression {
        m: margins.m(),
        n: margins.n(),
        terms,
    })
}

/// The generating function of the feasible cone at a vertex: the vertex's
/// contribution to the polytope's generating function, shifted to the
/// origin. One term per perturbed support tree containing the vertex's
/// support, apexes all zero. The margins are read off the vertex matrix
/// itself and need not be integral.
pub fn feasible_cone_mgf(vertex: &VertexRecord) -> Result<MgfExpression, MgfError> {
    let matrix = vertex.matrix();
    let margins = Margins::new(
        matrix
            .entries()
            .iter()
            .map(|row| row.iter().sum())
            .collect(),
        (0..matrix.cols())
            .map(|j| matrix.entries().iter().map(|row| &row[j]).sum())
            .collect(),
    )?;
    let spec = make_spec(&margins);
    let grouping = group_by_limit(&spec)?;
    let group = grouping
        .group_of_limit(matrix)
        .ok_or(MgfError::VertexNotFound)?;
    let zero_apex = vec![vec![0i64; margins.n()]; margins.m()];
    let mut terms = Vec::with_capacity(group.members().len());
    for &idx in group.members() {
        let tree = grouping.perturbed()[idx].tree();
        terms.push(MgfTerm {
            sign: 1,
            apex: zero_apex.clone(),
            rays: rays_of_tree(tree)?,
        });
    }
    Ok(MgfExpression {
        m: margins.m(),
        n: margins.n(),
        terms,
    })
}
