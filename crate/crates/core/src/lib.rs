//! Exact combinatorics of transportation polytopes.
//!
//! A transportation polytope `T(r, c)` is the set of nonnegative `m x n`
//! matrices with prescribed positive row sums `r` and column sums `c`
//! (with `sum(r) == sum(c)`). This crate computes, in exact rational
//! arithmetic:
//!
//! * the vertices of `T(r, c)`, through the bijection between vertices and
//!   their support forests in the complete bipartite graph `K_{m,n}`
//!   ([`polytope`]);
//! * the feasible cone at each vertex, generated by signed even-cycle
//!   matrices ([`graph`]);
//! * a universal margin perturbation that makes every `T(r, c)`
//!   non-degenerate while keeping the combinatorics independent of the
//!   perturbation parameter, plus the limit map sending perturbed vertices
//!   back to vertices of the original polytope ([`perturb`]);
//! * the multivariate rational generating function of the lattice points of
//!   `T(r, c)` as a sum of unimodular-cone terms, one per perturbed support
//!   tree ([`mgf`]);
//! * the Ehrhart polynomial and normalized volume, by specializing the
//!   generating function along a generic direction and extracting Todd-series
//!   coefficients ([`ehrhart`]);
//! * a direct combinatorial description of the perturbed vertices of the
//!   central polytopes `T(a..a, ak..ak)` of size `kn x n`, via matchings,
//!   rooted trees, and branch choices ([`central`]).
//!
//! Everything is cross-checkable against small brute-force enumerations in
//! [`oracle`]. All public enumerations return canonically sorted results, so
//! outputs are byte-stable across runs.

#![forbid(unsafe_code)]
// Error enums carry the offending rational values for diagnostics; they
// only travel on cold paths, so their size is not worth boxing away.
#![allow(clippy::result_large_err)]

pub mod central;
pub mod ehrhart;
pub mod graph;
pub mod mgf;
pub mod oracle;
pub mod perturb;
pub mod polytope;
pub mod rat;
