//! Ehrhart polynomials and normalized volumes from generating functions.
//!
//! Substituting `z_ij = exp(-c_ij * h)` into the generating function of
//! `t * P` turns each unimodular-cone term into a Laurent series in `h`
//! whose poles cancel across terms; the constant term is the lattice-point
//! count of the dilation — a polynomial in `t`, the Ehrhart polynomial.
//! With `d` rays per term and writing `y_i = <c, apex_i>` and
//! `x_ij = <c, ray_ij>`, the coefficient of `t^k` is
//!
//! ```text
//!   (1/k!) * sum_i sign_i * (-y_i)^k * td_{d-k}(x_i1, ..., x_id) / prod_j x_ij
//! ```
//!
//! where `td_p` collects the `h^p` coefficient of `prod_j Td(x_ij * h)` and
//! `Td(s) = s / (1 - exp(-s))` is the Todd series. The direction `c` must
//! keep every `x_ij` nonzero; powers of a small prime work because every
//! ray has entries in `{-1, 0, 1}`.
//!
//! The polynomial's leading coefficient is the volume of the polytope
//! (relative to the lattice of its affine span); multiplied by `d!` it
//! gives the integer normalized volume.

use num::{BigInt, BigRational, One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::mgf::{polytope_mgf, MgfError, MgfExpression};
use crate::polytope::{Margins, PolytopeError};
use crate::rat;

/// Bases tried for the direction vector, in order.
pub const DIRECTION_BASES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Errors for Ehrhart polynomial computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EhrhartError {
    #[error("terms have {got} rays where {expected} were expected; cones must all be simplicial of the polytope dimension")]
    MixedDimension { expected: usize, got: usize },
    #[error("direction base {base} hits a ray orthogonally")]
    PoleDirection { base: u64 },
    #[error("no direction base in {0:?} avoids all rays", DIRECTION_BASES)]
    DirectionExhausted,
    #[error(
        "singular part of the series did not cancel; generating function or direction is invalid"
    )]
    SingularPartRemains,
    #[error(transparent)]
    Mgf(#[from] MgfError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

/// Bernoulli numbers `B_0 ... B_upto` (convention `B_1 = -1/2`), by the
/// recurrence `sum_{j<=n} C(n+1, j) B_j = [n = 0]`.
pub fn bernoulli_numbers(upto: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(upto + 1);
    for n in 0..=upto {
        if n == 0 {
            b.push(BigRational::one());
            continue;
        }
        // C(n+1, j) running product: C(n+1, 0) = 1.
        let mut binom = BigInt::one();
        let mut acc = BigRational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += BigRational::from_integer(binom.clone()) * bj;
            // C(n+1, j+1) = C(n+1, j) * (n+1-j) / (j+1).
            binom = binom * BigInt::from(n + 1 - j) / BigInt::from(j + 1);
        }
        b.push(-acc / rat::int((n + 1) as i64));
    }
    b
}

/// Coefficients of the Todd series `Td(s) = s / (1 - exp(-s))`:
/// `Td(s) = sum_k (-1)^k B_k s^k / k!`.
pub fn todd_coefficients(upto: usize) -> Vec<BigRational> {
    bernoulli_numbers(upto)
        .into_iter()
        .enumerate()
        .map(|(k, bk)| {
            let signed = if k % 2 == 1 { -bk } else { bk };
            signed / BigRational::from_integer(rat::factorial(k))
        })
        .collect()
}

/// Coefficients in `h`, up to `h^degree`, of `prod_j Td(x_j * h)`.
pub fn todd_product(xs: &[BigRational], degree: usize) -> Vec<BigRational> {
    let td = todd_coefficients(degree);
    let mut acc = vec![BigRational::zero(); degree + 1];
    acc[0] = BigRational::one();
    for x in xs {
        // Series of Td(x h): td[k] * x^k at h^k.
        let mut powers = Vec::with_capacity(degree + 1);
        let mut xp = BigRational::one();
        for tdk in td.iter() {
            powers.push(tdk * &xp);
            xp *= x;
        }
        let mut next = vec![BigRational::zero(); degree + 1];
        for (a, va) in acc.iter().enumerate() {
            if va.is_zero() {
                continue;
            }
            for (b, vb) in powers.iter().enumerate().take(degree + 1 - a) {
                next[a + b] += va * vb;
            }
        }
        acc = next;
    }
    acc
}

/// A direction `c` with `c_ij = base^((i-1) n + (j-1))`, used to collapse a
/// multivariate generating function to one variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DirectionVector {
    base: u64,
    m: usize,
    n: usize,
}

impl DirectionVector {
    pub fn new(base: u64, m: usize, n: usize) -> Self {
        assert!(base >= 2);
        DirectionVector { base, m, n }
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    /// `<c, A>` for an integer matrix given by rows.
    fn dot<R: AsRef<[i64]>>(&self, rows: &[R]) -> BigInt {
        let base = BigInt::from(self.base);
        let mut acc = BigInt::zero();
        let mut pw = BigInt::one();
        for row in rows {
            for &a in row.as_ref() {
                if a != 0 {
                    acc += BigInt::from(a) * &pw;
                }
                pw = &pw * &base;
            }
        }
        acc
    }

    /// True when `<c, ray>` is nonzero for every ray of every term.
    pub fn avoids_all_rays(&self, mgf: &MgfExpression) -> bool {
        mgf.terms()
            .iter()
            .flat_map(|t| t.rays())
            .all(|r| !self.dot(r.entries()).is_zero())
    }
}

/// Picks the first direction base that avoids all rays of the expression.
pub fn pick_direction(mgf: &MgfExpression) -> Result<DirectionVector, EhrhartError> {
    let shape = mgf.shape();
    for base in DIRECTION_BASES {
        let dir = DirectionVector::new(base, shape.m, shape.n);
        if dir.avoids_all_rays(mgf) {
            return Ok(dir);
        }
    }
    Err(EhrhartError::DirectionExhausted)
}

/// An Ehrhart polynomial, coefficients in ascending order of exponent.
/// Serializes as the coefficient list of `"p/q"` strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct EhrhartPolynomial {
    #[serde(with = "rat::serde_rat_vec")]
    coeffs: Vec<BigRational>,
}

impl EhrhartPolynomial {
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &BigRational {
        self.coeffs.last().expect("coefficient list is never empty")
    }

    pub fn evaluate_at(&self, t: &BigRational) -> BigRational {
        let mut value = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            value = value * t + c;
        }
        value
    }

    /// Lattice-point count of the `t`-th dilation, for integer `t >= 0`.
    pub fn count_at(&self, t: u64) -> BigInt {
        let v = self.evaluate_at(&rat::int(t as i64));
        debug_assert!(
            rat::is_integer(&v),
            "Ehrhart values at integers are integers"
        );
        v.to_integer()
    }
}

/// Volume data read off an Ehrhart polynomial: the leading coefficient
/// (volume relative to the affine-span lattice) and `dim! *` it, the
/// normalized volume — an integer for integral polytopes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VolumeReport {
    dim: usize,
    #[serde(with = "rat::serde_rat")]
    leading: BigRational,
    #[serde(rename = "normalized_volume", with = "rat::serde_rat")]
    normalized: BigRational,
}

impl VolumeReport {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn leading(&self) -> &BigRational {
        &self.leading
    }

    pub fn normalized(&self) -> &BigRational {
        &self.normalized
    }
}

pub fn normalized_volume(poly: &EhrhartPolynomial) -> VolumeReport {
    let dim = poly.degree();
    let leading = poly.leading().clone();
    let normalized = &leading * BigRational::from_integer(rat::factorial(dim));
    VolumeReport {
        dim,
        leading,
        normalized,
    }
}

/// Computes the Ehrhart polynomial of the polytope behind a generating
/// function, along the given direction. Every term must have the same
/// number of rays (the dimension), and the direction must avoid all rays.
pub fn ehrhart_from_mgf(
    mgf: &MgfExpression,
    direction: &DirectionVector,
) -> Result<EhrhartPolynomial, EhrhartError> {
    let d = match mgf.terms().first() {
        Some(t) => t.rays().len(),
        None => 0,
    };
    for term in mgf.terms() {
        if term.rays().len() != d {
            return Err(EhrhartError::MixedDimension {
                expected: d,
                got: term.rays().len(),
            });
        }
    }

    // Accumulate, for every term, the coefficient of t^k h^(q-d) as
    // series[q][k]; only q = d survives, the rest must cancel to zero.
    let mut series = vec![vec![BigRational::zero(); d + 1]; d + 1];
    for term in mgf.terms() {
        let y = BigRational::from_integer(direction.dot(term.apex()));
        let mut denom = BigRational::one();
        let mut xs = Vec::with_capacity(d);
        for ray in term.rays() {
            let x = direction.dot(ray.entries());
            if x.is_zero() {
                return Err(EhrhartError::PoleDirection {
                    base: direction.base(),
                });
            }
            denom *= BigRational::from_integer(x.clone());
            xs.push(BigRational::from_integer(x));
        }
        let td = todd_product(&xs, d);
        // exp(-t y h) contributes (-y)^k / k! at t^k h^k.
        let mut exp_coeff = BigRational::one(); // (-y)^k / k!
        for k in 0..=d {
            if k > 0 {
                exp_coeff = exp_coeff * (-&y) / rat::int(k as i64);
            }
            for q in k..=d {
                let contribution = &exp_coeff * &td[q - k] / &denom;
                let signed = if term.sign() < 0 {
                    -contribution
                } else {
                    contribution
                };
                series[q][k] += signed;
            }
        }
    }

    // Poles h^(q-d) for q < d must vanish identically in t.
    for row in series.iter().take(d) {
        if row.iter().any(|c| !c.is_zero()) {
            return Err(EhrhartError::SingularPartRemains);
        }
    }
    Ok(EhrhartPolynomial {
        coeffs: series.pop().expect("series has d + 1 rows"),
    })
}

/// Full Ehrhart data of `T(r, c)` for integral margins: the polynomial,
/// the volume report, and the direction base used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EhrhartReport {
    ehrhart: EhrhartPolynomial,
    #[serde(flatten)]
    volume: VolumeReport,
    direction_base: u64,
}

impl EhrhartReport {
    pub fn polynomial(&self) -> &EhrhartPolynomial {
        &self.ehrhart
    }

    pub fn dim(&self) -> usize {
        self.volume.dim
    }

    pub fn direction_base(&self) -> u64 {
        self.direction_base
    }

    pub fn volume(&self) -> &VolumeReport {
        &self.volume
    }
}

/// Computes the Ehrhart polynomial and volume of `T(r, c)` via its
/// generating function.
pub fn ehrhart(margins: &Margins) -> Result<EhrhartReport, EhrhartError> {
    let mgf = polytope_mgf(margins)?;
    let direction = pick_direction(&mgf)?;
    let poly = ehrhart_from_mgf(&mgf, &direction)?;
    let volume = normalized_volume(&poly);
    Ok(EhrhartReport {
        direction_base: direction.base(),
        volume,
        ehrhart: poly,
    })
}

/// [`ehrhart`] for a pre-built generating function (e.g. the combinatorial
/// central-polytope construction).
pub fn ehrhart_report_from_mgf(mgf: &MgfExpression) -> Result<EhrhartReport, EhrhartError> {
    let direction = pick_direction(mgf)?;
    let poly = ehrhart_from_mgf(mgf, &direction)?;
    let volume = normalized_volume(&poly);
    Ok(EhrhartReport {
        direction_base: direction.base(),
        volume,
        ehrhart: poly,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::count_dilated_lattice_points;
    use crate::rat::{int, ratio};

    fn margins(r: &[i64], c: &[i64]) -> Margins {
        Margins::from_ints(r, c).unwrap()
    }

    #[test]
    fn bernoulli_goldens() {
        let b = bernoulli_numbers(8);
        assert_eq!(
            b,
            vec![
                int(1),
                ratio(-1, 2),
                ratio(1, 6),
                int(0),
                ratio(-1, 30),
                int(0),
                ratio(1, 42),
                int(0),
                ratio(-1, 30),
            ]
        );
    }

    #[test]
    fn todd_coefficient_goldens() {
        assert_eq!(
            todd_coefficients(6),
            vec![
                int(1),
                ratio(1, 2),
                ratio(1, 12),
                int(0),
                ratio(-1, 720),
                int(0),
                ratio(1, 30240),
            ]
        );
    }

    #[test]
    fn todd_matches_series_division() {
        // Independent route: Td(s) = s / (1 - exp(-s)) by power-series
        // inversion of (1 - exp(-s)) / s = sum_{k>=0} (-1)^k s^k / (k+1)!.
        let upto = 10;
        let denom: Vec<BigRational> = (0..=upto)
            .map(|k| {
                let v = BigRational::one() / BigRational::from_integer(rat::factorial(k + 1));
                if k % 2 == 1 {
                    -v
                } else {
                    v
                }
            })
            .collect();
        let mut inv = vec![BigRational::zero(); upto + 1];
        inv[0] = BigRational::one();
        for k in 1..=upto {
            let mut acc = BigRational::zero();
            for j in 0..k {
                acc += &inv[j] * &denom[k - j];
            }
            inv[k] = -acc;
        }
        assert_eq!(todd_coefficients(upto), inv);
    }

    #[test]
    fn todd_product_golden() {
        let xs = vec![int(1), int(1)];
        let coeffs = todd_product(&xs, 2);
        assert_eq!(coeffs, vec![int(1), int(1), ratio(5, 12)]);
    }

    #[test]
    fn birkhoff_2_ehrhart_is_t_plus_1() {
        let report = ehrhart(&margins(&[1, 1], &[1, 1])).unwrap();
        assert_eq!(report.polynomial().coeffs(), &[int(1), int(1)]);
        assert_eq!(report.dim(), 1);
        assert_eq!(report.volume().leading(), &int(1));
        assert_eq!(report.volume().normalized(), &int(1));
    }

    #[test]
    fn birkhoff_3_ehrhart_and_volume() {
        let report = ehrhart(&margins(&[1, 1, 1], &[1, 1, 1])).unwrap();
        // (t^4 + 6 t^3 + 15 t^2 + 18 t + 8) / 8.
        assert_eq!(
            report.polynomial().coeffs(),
            &[int(1), ratio(9, 4), ratio(15, 8), ratio(3, 4), ratio(1, 8)]
        );
        assert_eq!(report.dim(), 4);
        assert_eq!(report.volume().normalized(), &int(3));
        let counts: Vec<BigInt> = (0..=5).map(|t| report.polynomial().count_at(t)).collect();
        let expected: Vec<BigInt> = [1, 6, 21, 55, 120, 231].map(BigInt::from).into();
        assert_eq!(counts, expected);
    }

    #[test]
    fn point_polytope_has_constant_ehrhart() {
        let report = ehrhart(&margins(&[4], &[4])).unwrap();
        assert_eq!(report.polynomial().coeffs(), &[int(1)]);
        assert_eq!(report.dim(), 0);
        assert_eq!(report.volume().normalized(), &int(1));
    }

    #[test]
    fn polynomials_count_dilations_of_degenerate_and_nondegenerate_instances() {
        let cases = [
            margins(&[1, 1, 2], &[1, 1, 2]),
            margins(&[2, 1], &[1, 2]),
            margins(&[3, 1], &[2, 2]),
            margins(&[4, 2], &[3, 3]),
            margins(&[3, 3], &[1, 1, 4]),
        ];
        for m in cases {
            let report = ehrhart(&m).unwrap();
            assert_eq!(
                report.polynomial().coeffs()[0],
                int(1),
                "constant term of {m}"
            );
            for t in 0..=4u64 {
                assert_eq!(
                    report.polynomial().count_at(t),
                    count_dilated_lattice_points(&m, t).unwrap(),
                    "count at t = {t} for {m}"
                );
            }
        }
    }

    #[test]
    fn result_does_not_depend_on_the_direction_base() {
        let m = margins(&[1, 1, 2], &[1, 1, 2]);
        let mgf = crate::mgf::polytope_mgf(&m).unwrap();
        let shape = mgf.shape();
        let mut polys = Vec::new();
        for base in [2u64, 3, 5, 7] {
            let dir = DirectionVector::new(base, shape.m, shape.n);
            assert!(dir.avoids_all_rays(&mgf), "base {base} hits a ray");
            polys.push(ehrhart_from_mgf(&mgf, &dir).unwrap());
        }
        for p in &polys[1..] {
            assert_eq!(p, &polys[0]);
        }
    }

    #[test]
    fn direction_search_prefers_the_smallest_base() {
        let mgf = crate::mgf::polytope_mgf(&margins(&[1, 1], &[1, 1])).unwrap();
        let dir = pick_direction(&mgf).unwrap();
        // Entries of every ray are -1, 0, 1, so base 2 always works: the
        // lowest nonzero balanced-binary digit cannot be cancelled.
        assert_eq!(dir.base(), 2);
    }
}
