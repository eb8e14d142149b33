//! Brute-force reference implementations, independent of the pivoting and
//! generating-function machinery, for cross-checking on small instances:
//! direct lattice-point enumeration, exhaustive vertex enumeration over all
//! spanning trees, monomial sums, and polynomial interpolation.
//!
//! Everything here is exponential and guarded by a hard size limit; these
//! functions exist to validate the fast paths, not to be fast.

use std::collections::BTreeSet;

use itertools::Itertools;
use num::{BigInt, BigRational, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::BipartiteShape;
use crate::polytope::{solve_on_forest, Margins, PolytopeError, TransportMatrix, VertexRecord};
use crate::rat;

/// Hard cap on `m * n` for the brute-force routines.
pub const MAX_CELLS: usize = 20;

/// Errors for the brute-force reference routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("instance has {cells} cells, brute force is capped at {max}")]
    TooLarge { cells: usize, max: usize },
    #[error("lattice point enumeration requires integral margins")]
    NonIntegral,
    #[error("value table is inconsistent with a degree-{degree} polynomial at {at}")]
    InconsistentTable { degree: usize, at: BigRational },
    #[error("interpolation needs {needed} values for degree {degree}, got {got}")]
    NotEnoughValues {
        degree: usize,
        needed: usize,
        got: usize,
    },
    #[error("interpolation nodes must be distinct")]
    RepeatedNode,
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

fn check_size(margins: &Margins) -> Result<(), OracleError> {
    let cells = margins.m() * margins.n();
    if cells > MAX_CELLS {
        return Err(OracleError::TooLarge {
            cells,
            max: MAX_CELLS,
        });
    }
    Ok(())
}

/// All nonnegative integer matrices with the given margins, in row-major
/// lexicographic order. Margins must be integral.
pub fn brute_lattice_points(margins: &Margins) -> Result<Vec<TransportMatrix>, OracleError> {
    check_size(margins)?;
    if !margins.is_integral() {
        return Err(OracleError::NonIntegral);
    }
    let m = margins.m();
    let n = margins.n();
    let r: Vec<BigInt> = margins.r().iter().map(|x| x.to_integer()).collect();
    let mut cols: Vec<BigInt> = margins.c().iter().map(|x| x.to_integer()).collect();
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(m);
    let mut out = Vec::new();
    fill_rows(&r, &mut cols, 0, m, n, &mut rows, &mut out);
    Ok(out)
}

/// Extends a partial matrix row by row; within a row, entry by entry.
/// The recursion order yields row-major lexicographic output directly.
fn fill_rows(
    r: &[BigInt],
    cols: &mut Vec<BigInt>,
    i: usize,
    m: usize,
    n: usize,
    rows: &mut Vec<Vec<BigInt>>,
    out: &mut Vec<TransportMatrix>,
) {
    if i == m {
        debug_assert!(cols.iter().all(|c| c.is_zero()));
        let entries = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| BigRational::from_integer(x.clone()))
                    .collect()
            })
            .collect();
        // Reconstruct margins from the completed grid; validation cannot
        // fail here by construction.
        let margins = Margins::new(
            rows.iter()
                .map(|row| BigRational::from_integer(row.iter().sum::<BigInt>()))
                .collect(),
            (0..n)
                .map(|j| BigRational::from_integer(rows.iter().map(|row| &row[j]).sum::<BigInt>()))
                .collect(),
        )
        .expect("completed grid has the target margins");
        out.push(TransportMatrix::new(&margins, entries).expect("entries match margins"));
        return;
    }
    let mut row = vec![BigInt::zero(); n];
    fill_entries(r, cols, i, 0, m, n, r[i].clone(), &mut row, rows, out);
}

#[allow(clippy::too_many_arguments)]
fn fill_entries(
    r: &[BigInt],
    cols: &mut Vec<BigInt>,
    i: usize,
    j: usize,
    m: usize,
    n: usize,
    remaining: BigInt,
    row: &mut Vec<BigInt>,
    rows: &mut Vec<Vec<BigInt>>,
    out: &mut Vec<TransportMatrix>,
) {
    if j == n - 1 {
        // Last entry is forced; check the column can absorb it.
        if remaining > cols[j] {
            return;
        }
        row[j] = remaining.clone();
        cols[j] -= &remaining;
        rows.push(row.clone());
        fill_rows(r, cols, i + 1, m, n, rows, out);
        rows.pop();
        cols[j] += &remaining;
        row[j] = BigInt::zero();
        return;
    }
    // Feasibility prune: the rest of this row can hold at most the sum of
    // the remaining column capacities.
    let capacity: BigInt = cols[j + 1..].iter().sum();
    let mut v = BigInt::zero();
    let top = remaining.clone().min(cols[j].clone());
    while v <= top {
        let rest = remaining.clone() - &v;
        if rest <= capacity {
            row[j] = v.clone();
            cols[j] -= &v;
            fill_entries(r, cols, i, j + 1, m, n, rest, row, rows, out);
            cols[j] += &v;
            row[j] = BigInt::zero();
        }
        v += 1;
    }
}

/// Number of lattice points of the dilation `t * T(r, c)`; `t = 0` gives 1
/// (the polytope is nonempty, so its zero dilation is the origin).
pub fn count_dilated_lattice_points(margins: &Margins, t: u64) -> Result<BigInt, OracleError> {
    if t == 0 {
        return Ok(BigInt::one());
    }
    Ok(BigInt::from(
        brute_lattice_points(&margins.dilated(t))?.len(),
    ))
}

/// Sum of `prod_{i,j} z[i][j]^M(i,j)` over the given integer matrices — the
/// quantity a multivariate generating function evaluates to at `z`.
pub fn monomial_sum(points: &[TransportMatrix], z: &[Vec<BigRational>]) -> BigRational {
    let mut total = BigRational::zero();
    for point in points {
        let mut term = BigRational::one();
        for (i, row) in point.entries().iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                debug_assert!(rat::is_integer(entry), "lattice points are integral");
                let exp = entry.to_integer();
                let exp = i64::try_from(&exp).expect("exponent fits in i64");
                term *= rat::pow(&z[i][j], exp);
            }
        }
        total += term;
    }
    total
}

/// All vertices of `T(r, c)` by exhaustion: solve the margin system on
/// every spanning tree of the complete bipartite graph, keep the
/// nonnegative solutions, and deduplicate. Works for degenerate and
/// non-degenerate, integral and rational margins alike. Sorted
/// lexicographically by matrix.
pub fn brute_vertices(margins: &Margins) -> Result<Vec<VertexRecord>, OracleError> {
    check_size(margins)?;
    let shape = margins.shape();
    let all_edges = shape.all_edges();
    let tree_size = margins.m() + margins.n() - 1;
    let mut matrices: BTreeSet<TransportMatrix> = BTreeSet::new();
    for subset in all_edges.iter().copied().combinations(tree_size) {
        // A set of m + n - 1 acyclic edges on m + n vertices is a spanning
        // tree; solving on it gives a basic solution of the margin system.
        match crate::graph::LabeledForest::new(shape, subset) {
            Ok(tree) => match solve_on_forest(margins, &tree) {
                Ok(matrix) => {
                    matrices.insert(matrix);
                }
                Err(PolytopeError::Infeasible { .. }) => continue,
                Err(e) => return Err(e.into()),
            },
            Err(_) => continue, // contains a cycle
        }
    }
    let mut out = Vec::with_capacity(matrices.len());
    for matrix in matrices {
        out.push(VertexRecord::new(matrix)?);
    }
    Ok(out)
}

/// Deterministic matrices of small nonzero rationals for evaluating
/// generating functions: numerators in `[-9, 9] \ {0}`, denominators in
/// `[1, 9]`. The same seed always yields the same points; callers that hit
/// a pole should simply take more points and skip the offending one.
pub fn seeded_points(shape: BipartiteShape, seed: u64, count: usize) -> Vec<Vec<Vec<BigRational>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..shape.m)
                .map(|_| {
                    (0..shape.n)
                        .map(|_| {
                            let num = loop {
                                let v = rng.gen_range(-9i64..=9);
                                if v != 0 {
                                    break v;
                                }
                            };
                            let den = rng.gen_range(1i64..=9);
                            rat::ratio(num, den)
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Fits the unique polynomial of the given degree through the first
/// `degree + 1` samples `(x, value)` and checks it reproduces all remaining
/// samples. Returns coefficients in ascending order of exponent.
pub fn interpolate(
    samples: &[(BigRational, BigRational)],
    degree: usize,
) -> Result<Vec<BigRational>, OracleError> {
    let needed = degree + 1;
    if samples.len() < needed {
        return Err(OracleError::NotEnoughValues {
            degree,
            needed,
            got: samples.len(),
        });
    }
    let nodes = &samples[..needed];
    for (a, b) in nodes.iter().tuple_combinations() {
        if a.0 == b.0 {
            return Err(OracleError::RepeatedNode);
        }
    }

    // Lagrange interpolation, expanded to monomial coefficients.
    let mut coeffs = vec![BigRational::zero(); needed];
    for (k, (xk, yk)) in nodes.iter().enumerate() {
        // Basis polynomial prod_{l != k} (x - x_l) / (x_k - x_l).
        let mut basis = vec![BigRational::zero(); needed];
        basis[0] = BigRational::one();
        let mut top = 0;
        let mut denom = BigRational::one();
        for (l, (xl, _)) in nodes.iter().enumerate() {
            if l == k {
                continue;
            }
            denom *= xk - xl;
            // Multiply basis by (x - x_l).
            top += 1;
            for idx in (0..=top).rev() {
                let shifted = if idx > 0 {
                    basis[idx - 1].clone()
                } else {
                    BigRational::zero()
                };
                basis[idx] = shifted - xl * &basis[idx];
            }
        }
        let scale = yk / denom;
        for (c, b) in coeffs.iter_mut().zip(basis.iter()) {
            *c += b * &scale;
        }
    }

    // Verify the fit against every sample, including the extras.
    for (x, y) in samples {
        let mut value = BigRational::zero();
        for c in coeffs.iter().rev() {
            value = value * x + c;
        }
        if &value != y {
            return Err(OracleError::InconsistentTable {
                degree,
                at: x.clone(),
            });
        }
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, ratio};

    fn margins(r: &[i64], c: &[i64]) -> Margins {
        Margins::from_ints(r, c).unwrap()
    }

    #[test]
    fn lattice_points_of_birkhoff_2() {
        let points = brute_lattice_points(&margins(&[1, 1], &[1, 1])).unwrap();
        let b = margins(&[1, 1], &[1, 1]);
        assert_eq!(
            points,
            vec![
                TransportMatrix::from_ints(&b, &[&[0, 1], &[1, 0]]).unwrap(),
                TransportMatrix::from_ints(&b, &[&[1, 0], &[0, 1]]).unwrap(),
            ]
        );
    }

    #[test]
    fn lattice_point_counts_match_known_values() {
        // Dilations of the Birkhoff polytope B_3: 1, 6, 21, 55, 120, 231.
        let b3 = margins(&[1, 1, 1], &[1, 1, 1]);
        let expected: [i64; 6] = [1, 6, 21, 55, 120, 231];
        for (t, want) in expected.iter().enumerate() {
            assert_eq!(
                count_dilated_lattice_points(&b3, t as u64).unwrap(),
                BigInt::from(*want),
                "dilation {t}"
            );
        }

        // 2x2 with margins (2,1), (1,2): entries x11 in {0, 1}.
        assert_eq!(
            count_dilated_lattice_points(&margins(&[2, 1], &[1, 2]), 1).unwrap(),
            BigInt::from(2)
        );
    }

    #[test]
    fn lattice_points_reject_bad_inputs() {
        let rational = Margins::new(vec![ratio(1, 2)], vec![ratio(1, 2)]).unwrap();
        assert_eq!(
            brute_lattice_points(&rational),
            Err(OracleError::NonIntegral)
        );

        let wide = margins(&[1; 5], &[1, 1, 1, 1, 1]);
        assert!(brute_lattice_points(&wide).is_err());
        assert_eq!(
            brute_lattice_points(&wide),
            Err(OracleError::TooLarge { cells: 25, max: 20 })
        );
    }

    #[test]
    fn brute_vertices_of_the_central_3x3() {
        let m = margins(&[1, 1, 2], &[1, 1, 2]);
        let vertices = brute_vertices(&m).unwrap();
        let mats: Vec<&str> = vec![
            "0,0,1;0,0,1;1,1,0",
            "0,0,1;0,1,0;1,0,1",
            "0,0,1;1,0,0;0,1,1",
            "0,1,0;0,0,1;1,0,1",
            "0,1,0;1,0,0;0,0,2",
            "1,0,0;0,0,1;0,1,1",
            "1,0,0;0,1,0;0,0,2",
        ];
        assert_eq!(
            vertices
                .iter()
                .map(|v| v.matrix().key())
                .collect::<Vec<_>>(),
            mats
        );
        assert!(vertices.iter().all(|v| v.is_degenerate()));
    }

    #[test]
    fn brute_vertices_agree_with_pivoting_on_perturbed_margins() {
        let spec = crate::perturb::make_spec(&margins(&[1, 1, 2], &[1, 1, 2]));
        let perturbed_margins = spec.margins_at(spec.t0()).unwrap();
        let brute = brute_vertices(&perturbed_margins).unwrap();
        assert_eq!(brute.len(), 18);
        let pivoted = crate::perturb::enumerate_perturbed_vertices(&spec).unwrap();
        let brute_set: BTreeSet<&TransportMatrix> = brute.iter().map(|v| v.matrix()).collect();
        let pivot_set: BTreeSet<&TransportMatrix> =
            pivoted.iter().map(|pv| pv.matrix_at_t0()).collect();
        assert_eq!(brute_set, pivot_set);
        assert!(brute.iter().all(|v| !v.is_degenerate()));
    }

    #[test]
    fn monomial_sum_of_birkhoff_2() {
        let b = margins(&[1, 1], &[1, 1]);
        let points = brute_lattice_points(&b).unwrap();
        // z = [[2, 3], [5, 7]]: z^I + z^J = 2*7 + 3*5 = 29.
        let z = vec![vec![int(2), int(3)], vec![int(5), int(7)]];
        assert_eq!(monomial_sum(&points, &z), int(29));
    }

    #[test]
    fn counts_are_transpose_invariant() {
        let cases: [(&[i64], &[i64]); 3] = [
            (&[1, 1, 2], &[1, 1, 2]),
            (&[3, 1], &[2, 2]),
            (&[2, 2, 3], &[3, 2, 2]),
        ];
        for (r, c) in cases {
            for t in 1..=3u64 {
                assert_eq!(
                    count_dilated_lattice_points(&margins(r, c), t).unwrap(),
                    count_dilated_lattice_points(&margins(c, r), t).unwrap(),
                    "transpose count differs for r={r:?} c={c:?} t={t}"
                );
            }
        }
    }

    #[test]
    fn interpolation_recovers_polynomials() {
        // y = (x^2 + 3x + 2) / 2 through x = 0..4.
        let samples: Vec<(BigRational, BigRational)> = (0..5)
            .map(|x| {
                let x = int(x);
                let y = (&x * &x + int(3) * &x + int(2)) / int(2);
                (x, y)
            })
            .collect();
        let coeffs = interpolate(&samples, 2).unwrap();
        assert_eq!(coeffs, vec![int(1), ratio(3, 2), ratio(1, 2)]);

        // A quadratic cannot fit 1, 2, 4, 8.
        let bad: Vec<(BigRational, BigRational)> =
            (0..4).map(|x| (int(x), rat::pow(&int(2), x))).collect();
        assert!(matches!(
            interpolate(&bad, 2),
            Err(OracleError::InconsistentTable { .. })
        ));

        assert!(matches!(
            interpolate(&samples[..2], 2),
            Err(OracleError::NotEnoughValues { .. })
        ));
    }
}
